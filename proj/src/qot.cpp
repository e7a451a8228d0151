#include "spanledger/qot.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "spanledger/errors.hpp"
#include "spanledger/units.hpp"

namespace spanledger {

std::string to_string(LedgerMode m) {
    switch (m) {
        case LedgerMode::incoherent: return "incoherent";
        case LedgerMode::coherent: return "coherent";
        case LedgerMode::equivalent: return "equivalent";
    }
    return "?";
}

LedgerMode ledger_mode_from_string(const std::string& s) {
    if (s == "incoherent") return LedgerMode::incoherent;
    if (s == "coherent") return LedgerMode::coherent;
    if (s == "equivalent") return LedgerMode::equivalent;
    throw config_error("unknown accumulation mode '" + s +
                       "' (expected incoherent, coherent or equivalent)");
}

double ase_power(const Amplifier& amp, double reference_bandwidth, double carrier_frequency) {
    amp.validate();
    if (!(reference_bandwidth > 0) || !(carrier_frequency > 0))
        throw model_error("ase_power: bandwidth and frequency must be positive");
    return planck_h * carrier_frequency * amp.noise_figure * (amp.gain - 1.0) *
           reference_bandwidth;
}

double equivalent_spm(double p_spm_local, double c_inf) {
    if (p_spm_local < 0 || c_inf < 0)
        throw model_error("equivalent_spm: inputs must be non-negative");
    return p_spm_local * (1.0 + c_inf);
}

DisturbanceLedger ledger(const Route& route, const std::vector<double>& spm_inputs,
                         const std::vector<double>& xpm_inputs, const ModelOptions& opts) {
    try {
        route.validate();
    } catch (const model_error& e) {
        throw config_error(e.what());
    }
    const LedgerMode mode = opts.mode;
    const std::size_t n_spans = route.size();
    if (spm_inputs.size() != n_spans || xpm_inputs.size() != n_spans)
        throw config_error("ledger: spm/xpm input lengths must match the route");
    for (double p : spm_inputs)
        if (p < 0) throw config_error("ledger: negative SPM input");
    for (double p : xpm_inputs)
        if (p < 0) throw config_error("ledger: negative XPM input");

    // per-span coherent correction factors
    std::vector<double> corr_factor(n_spans, 0.0);
    if (mode == LedgerMode::coherent) {
        if (!route.is_periodic())
            throw mode_error("ledger: coherent mode holds only for periodic routes; "
                             "use equivalent mode for heterogeneous routes");
        const double p0 = spm_inputs.front();
        for (double p : spm_inputs)
            if (std::abs(p - p0) > 1e-9 * std::max(std::abs(p0), std::abs(p)))
                throw mode_error("ledger: coherent mode requires identical per-span "
                                 "SPM inputs on a periodic route");
        const double th = theta_of(route.elements.front().span, route.channel);
        // correction at span n is dC(n) = C(n) - C(n-1), so the running SPM
        // total after n spans is P_spm * (n + C(n))
        double dc = 0.0;
        for (std::size_t n = 2; n <= n_spans; ++n) {
            dc += rho(static_cast<std::int64_t>(n) - 1, th);
            corr_factor[n - 1] = dc;
        }
    } else if (mode == LedgerMode::equivalent) {
        // one series evaluation per distinct span geometry
        std::map<std::pair<double, double>, double> cache;  // (|beta2|, length) -> c_inf
        for (std::size_t i = 0; i < n_spans; ++i) {
            const auto& s = route.elements[i].span;
            const auto key = std::make_pair(std::abs(s.beta2), s.length);
            auto it = cache.find(key);
            if (it == cache.end()) {
                const double th = theta_of(s, route.channel);
                const double ci =
                    opts.cinf_mode == CinfMode::series_limit
                        ? asymptotic_coefficient(th, opts.tolerance, opts.cap).c_inf
                        : per_span_increment(opts.cinf_n, th);
                it = cache.emplace(key, ci).first;
            }
            corr_factor[i] = it->second;
        }
    }

    DisturbanceLedger led;
    led.mode = mode;
    led.launch_power = route.channel.launch_power;
    led.rows.resize(n_spans);
    double cum = 0.0, cum_spm = 0.0;
    for (std::size_t i = 0; i < n_spans; ++i) {
        LedgerRow& r = led.rows[i];
        const auto& e = route.elements[i];
        r.span_index = static_cast<int>(i) + 1;
        r.p_ase = ase_power(e.amp, e.amp.reference_bandwidth, route.channel.carrier_frequency);
        r.p_xpm = xpm_inputs[i];
        r.p_spm_local = spm_inputs[i];
        r.p_spm_correction = corr_factor[i] * spm_inputs[i];
        r.p_dist_total = r.p_ase + r.p_xpm + r.p_spm_local + r.p_spm_correction;
        cum += r.p_dist_total;
        cum_spm += r.p_spm_local + r.p_spm_correction;
        r.cum_dist = cum;
        const double inf = std::numeric_limits<double>::infinity();
        r.gsnr = cum > 0 ? led.launch_power / cum : inf;
        r.snr_spm = cum_spm > 0 ? led.launch_power / cum_spm : inf;
        r.gsnr_db = 10.0 * std::log10(r.gsnr);
        r.snr_spm_db = 10.0 * std::log10(r.snr_spm);
    }
    return led;
}

GsnrDecomposition gsnr_decomposition(const DisturbanceLedger& led) {
    double ase = 0, xpm = 0, spm = 0;
    for (const auto& r : led.rows) {
        ase += r.p_ase;
        xpm += r.p_xpm;
        spm += r.p_spm_local + r.p_spm_correction;
    }
    const double inf = std::numeric_limits<double>::infinity();
    GsnrDecomposition d;
    d.snr_ase = ase > 0 ? led.launch_power / ase : inf;
    d.snr_xpm = xpm > 0 ? led.launch_power / xpm : inf;
    d.snr_spm = spm > 0 ? led.launch_power / spm : inf;
    const double total = ase + xpm + spm;
    d.gsnr = total > 0 ? led.launch_power / total : inf;
    return d;
}

}  // namespace spanledger
