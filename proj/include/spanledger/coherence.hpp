#pragma once
#include <Eigen/Dense>
#include <cstdint>

#include "spanledger/fresnel.hpp"
#include "spanledger/types.hpp"

// Dimensionless span-correlation mathematics: the factor theta, the pair
// coefficients rho_k, the cumulative coefficient C(n), its per-span increment,
// and the series limit with a certified truncation bound.
namespace spanledger {

// theta = pi * R_s^2 * |beta2| * L_s
double theta(double symbol_rate, double beta2_abs, double span_length);

inline double theta_of(const FiberSpan& span, const ChannelConfig& ch) {
    return theta(ch.symbol_rate, std::abs(span.beta2), span.length);
}

// rho_k = (6/5) (2/sqrt(theta)) C(sqrt(k theta)) / k^{3/2}
double rho(std::int64_t k, double theta);

// C(n) = sum_{k=1}^{n-1} (n-k) rho_k; C(1) = 0
double coherent_coefficient(std::int64_t n, double theta);

// Delta C(n) = C(n) - C(n-1) = sum_{k=1}^{n-1} rho_k, n >= 2
double per_span_increment(std::int64_t n, double theta);

struct CinfResult {
    double c_inf = 0;        // partial sum of rho_k, k = 1..terms_used
    double tail_bound = 0;   // certified bound on the dropped remainder
    std::int64_t terms_used = 0;
};

inline constexpr std::int64_t default_series_cap = 100000000;  // 1e8

// Smallest-K partial sum with tail bound <= tolerance. The remainder bound is
//   sum_{k>K} rho_k <= (6/5)(2/sqrt(theta)) Cmax * 2/sqrt(K)
// (integral comparison). Throws convergence_error when the required K exceeds
// the cap.
CinfResult asymptotic_coefficient(double theta, double tolerance,
                                  std::int64_t cap = default_series_cap);

struct CoherenceProfile {
    double theta = 0;
    Eigen::ArrayXd rho;      // rho_k, k = 1..n_max-1
    Eigen::ArrayXd c_n;      // C(n), n = 1..n_max
    Eigen::ArrayXd delta_c;  // Delta C(n), n = 2..n_max
    double c_inf = 0;
    double c_inf_tail_bound = 0;
    std::int64_t c_inf_terms = 0;
};

CoherenceProfile build_profile(const FiberSpan& span, const ChannelConfig& channel,
                               std::int64_t n_max, double tolerance,
                               std::int64_t cap = default_series_cap);

// same, from a precomputed theta
CoherenceProfile build_profile(double theta, std::int64_t n_max, double tolerance,
                               std::int64_t cap = default_series_cap);

}  // namespace spanledger
