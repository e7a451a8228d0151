#include "spanledger/fresnel.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "spanledger/errors.hpp"

namespace spanledger {
namespace {

// Maclaurin series, good to full precision for xi < 1.6 (terms stay small,
// no destructive cancellation in that range).
double series_small(double xi) {
    const double q = (M_PI / 2.0) * (M_PI / 2.0) * xi * xi * xi * xi;
    double num = xi;  // (-1)^m (pi/2)^{2m} xi^{4m+1} / (2m)!
    double acc = xi;  // first term, m = 0, divided by (4m+1)=1
    for (int m = 0; m < 60; ++m) {
        num *= -q / ((2.0 * m + 1.0) * (2.0 * m + 2.0));
        const double term = num / (4.0 * m + 5.0);
        acc += term;
        if (std::abs(term) < 1e-18 * std::abs(acc) + 1e-300) return acc;
    }
    return acc;
}

// Mid range via the error-function identity
//   C(x) + i S(x) = (1+i)/2 * erf(w),  w = (sqrt(pi)/2)(1-i) x,
// with erfc evaluated by its continued fraction (modified Lentz). Note
// w^2 = -i pi x^2 / 2, so exp(-w^2) is a pure phase and nothing overflows.
double erfc_cf(double x) {
    using cd = std::complex<double>;
    const double s = std::sqrt(M_PI) / 2.0;
    const cd w(s * x, -s * x);

    // F = 1/(w+ (1/2)/(w+ 1/(w+ (3/2)/(w+ ...)))), so sqrt(pi) e^{w^2} erfc(w) = F
    const double tiny = 1e-290;
    cd f(tiny, 0.0), c(tiny, 0.0), d(0.0, 0.0);
    for (int k = 1; k < 300; ++k) {
        const cd a = (k == 1) ? cd(1.0, 0.0) : cd((k - 1) * 0.5, 0.0);
        const cd b = w;
        d = b + a * d;
        if (std::abs(d) < tiny) d = cd(tiny, 0.0);
        c = b + a / c;
        if (std::abs(c) < tiny) c = cd(tiny, 0.0);
        d = 1.0 / d;
        const cd delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }

    const double phi = M_PI * x * x / 2.0;                    // -w^2 = i phi
    const cd e_minus_w2(std::cos(phi), std::sin(phi));        // exp(-w^2)
    const cd erfc_w = e_minus_w2 * f / std::sqrt(M_PI);
    const cd efield = cd(0.5, 0.5) * (1.0 - erfc_w);          // C + iS
    return efield.real();
}

// Large-argument auxiliary expansion:
//   C(x) = 1/2 + f(x) sin(pi x^2/2) - g(x) cos(pi x^2/2)
// with the standard asymptotic series for f, g in u = 2/(pi x^2). The series
// are truncated at their smallest term; for x >= 8 that is far below 1e-14.
double asymptotic_large(double x) {
    const double u = 2.0 / (M_PI * x * x);
    double poch = 1.0;  // (1/2)_j
    double up = 1.0;    // u^j
    double fsum = 0.0, gsum = 0.0;
    double prev = std::numeric_limits<double>::max();
    for (int j = 0; j < 40; ++j) {
        const double term = poch * up;
        if (term > prev) break;  // asymptotic tail started growing
        prev = term;
        const int m = j / 2;
        const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
        if (j % 2 == 0) fsum += sgn * term; else gsum += sgn * term;
        if (term < 1e-18) break;
        poch *= (j + 0.5);
        up *= u;
    }
    const double pre = 1.0 / (M_PI * x);
    const double phi = M_PI * x * x / 2.0;
    return 0.5 + pre * (fsum * std::sin(phi) - gsum * std::cos(phi));
}

}  // namespace

double fresnel_c(double xi) {
    if (!std::isfinite(xi) || xi < 0.0)
        throw model_error("fresnel_c: argument must be finite and >= 0");
    if (xi == 0.0) return 0.0;
    if (xi < 1.6) return series_small(xi);
    if (xi < 8.0) return erfc_cf(xi);
    return asymptotic_large(xi);
}

}  // namespace spanledger
