#include "spanledger/coherence.hpp"

#include <cmath>

#include "spanledger/errors.hpp"

namespace spanledger {

namespace {
double prefactor(double th) { return 1.2 * 2.0 / std::sqrt(th); }

void check_theta(double th) {
    if (!(th > 0) || !std::isfinite(th))
        throw model_error("coherence: theta must be positive and finite "
                          "(zero-dispersion spans are outside the model)");
}
}  // namespace

double theta(double symbol_rate, double beta2_abs, double span_length) {
    if (!(symbol_rate > 0) || !(beta2_abs > 0) || !(span_length > 0))
        throw model_error("theta: all arguments must be positive");
    return M_PI * symbol_rate * symbol_rate * beta2_abs * span_length;
}

double rho(std::int64_t k, double th) {
    check_theta(th);
    if (k < 1) throw model_error("rho: k must be >= 1");
    const double kd = static_cast<double>(k);
    return prefactor(th) * fresnel_c(std::sqrt(kd * th)) / (kd * std::sqrt(kd));
}

double coherent_coefficient(std::int64_t n, double th) {
    check_theta(th);
    if (n < 1) throw model_error("coherent_coefficient: n must be >= 1");
    double acc = 0.0, comp = 0.0;  // Kahan: the sweep reuses this at many theta
    for (std::int64_t k = 1; k < n; ++k) {
        const double term = static_cast<double>(n - k) * rho(k, th);
        const double y = term - comp;
        const double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    return acc;
}

double per_span_increment(std::int64_t n, double th) {
    check_theta(th);
    if (n < 2) throw model_error("per_span_increment: n must be >= 2");
    double acc = 0.0, comp = 0.0;
    for (std::int64_t k = 1; k < n; ++k) {
        const double y = rho(k, th) - comp;
        const double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    return acc;
}

CinfResult asymptotic_coefficient(double th, double tolerance, std::int64_t cap) {
    check_theta(th);
    if (!(tolerance > 0)) throw model_error("asymptotic_coefficient: tolerance must be > 0");
    const double pref = prefactor(th);
    // tail(K) <= pref * Cmax * 2/sqrt(K) <= tolerance
    const double kreq = std::pow(2.0 * pref * fresnel_c_max / tolerance, 2.0);
    const std::int64_t K = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(kreq)));
    if (K > cap)
        throw convergence_error("asymptotic_coefficient: tolerance requires " +
                                std::to_string(K) + " terms, above the cap of " +
                                std::to_string(cap));
    CinfResult r;
    r.terms_used = K;
    r.tail_bound = pref * fresnel_c_max * 2.0 / std::sqrt(static_cast<double>(K));
    double acc = 0.0, comp = 0.0;
    for (std::int64_t k = 1; k <= K; ++k) {
        const double kd = static_cast<double>(k);
        const double y = pref * fresnel_c(std::sqrt(kd * th)) / (kd * std::sqrt(kd)) - comp;
        const double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    r.c_inf = acc;
    return r;
}

CoherenceProfile build_profile(double th, std::int64_t n_max, double tolerance,
                               std::int64_t cap) {
    check_theta(th);
    if (n_max < 1) throw model_error("build_profile: n_max must be >= 1");
    CoherenceProfile p;
    p.theta = th;
    p.rho.resize(n_max > 1 ? n_max - 1 : 0);
    for (std::int64_t k = 1; k < n_max; ++k) p.rho[k - 1] = rho(k, th);

    // C(n) via the exact recurrences: dC(n) = dC(n-1) + rho_{n-1}, C(n) = C(n-1) + dC(n)
    p.c_n.resize(n_max);
    p.delta_c.resize(n_max > 1 ? n_max - 1 : 0);
    p.c_n[0] = 0.0;
    double dc = 0.0;
    for (std::int64_t n = 2; n <= n_max; ++n) {
        dc += p.rho[n - 2];
        p.delta_c[n - 2] = dc;
        p.c_n[n - 1] = p.c_n[n - 2] + dc;
    }

    const CinfResult ci = asymptotic_coefficient(th, tolerance, cap);
    p.c_inf = ci.c_inf;
    p.c_inf_tail_bound = ci.tail_bound;
    p.c_inf_terms = ci.terms_used;
    return p;
}

CoherenceProfile build_profile(const FiberSpan& span, const ChannelConfig& channel,
                               std::int64_t n_max, double tolerance, std::int64_t cap) {
    return build_profile(theta_of(span, channel), n_max, tolerance, cap);
}

}  // namespace spanledger
