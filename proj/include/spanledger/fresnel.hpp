#pragma once

namespace spanledger {

// Fresnel cosine integral C(xi) = \int_0^xi cos(pi x^2 / 2) dx.
// Absolute error <= 1e-10 on [0, 100]. Throws model_error for negative or
// non-finite arguments.
double fresnel_c(double xi);

// value of the global maximum C(1)
inline constexpr double fresnel_c_max = 0.7798934003768229;

}  // namespace spanledger
