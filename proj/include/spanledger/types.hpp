#pragma once
#include <cmath>
#include <string>
#include <vector>

#include "spanledger/errors.hpp"
#include "spanledger/units.hpp"

namespace spanledger {

enum class Constellation { qpsk, qam16, gaussian };

struct ChannelConfig {
    double symbol_rate = 32e9;                 // Hz
    double carrier_frequency = speed_of_light / default_wavelength;  // Hz
    double launch_power = 1e-3;                // W
    Constellation constellation = Constellation::qpsk;
    double roll_off = 0.1;

    double wavelength() const { return speed_of_light / carrier_frequency; }

    void validate() const {
        if (!(symbol_rate > 0)) throw model_error("channel: symbol_rate must be > 0");
        if (!(carrier_frequency > 0)) throw model_error("channel: carrier_frequency must be > 0");
        if (!(launch_power > 0)) throw model_error("channel: launch_power must be > 0");
        if (!(roll_off >= 0 && roll_off <= 1)) throw model_error("channel: roll_off must be in [0,1]");
    }
};

struct FiberSpan {
    double length = 0;        // m
    double dispersion_D = 0;  // s/m^2
    double beta2 = 0;         // s^2/m, sign retained (negative for anomalous)
    double attenuation = 0;   // 1/m, power convention
    double gamma_nl = 0;      // 1/(W*m), oracle only
    std::string label;

    // engineering-unit constructor: km, ps/nm/km, dB/km, 1/(W*km)
    static FiberSpan from_engineering(double length_km, double D_ps_nm_km,
                                      double atten_db_km, double gamma_per_w_km,
                                      std::string label = {},
                                      double wavelength = default_wavelength) {
        FiberSpan s;
        s.length = length_km * 1e3;
        s.dispersion_D = dispersion_si(D_ps_nm_km);
        s.beta2 = beta2_from_D(s.dispersion_D, wavelength);
        s.attenuation = attenuation_si(atten_db_km);
        s.gamma_nl = gamma_per_w_km * 1e-3;
        s.label = std::move(label);
        s.validate();
        return s;
    }

    double loss_linear() const { return std::exp(attenuation * length); }
    double loss_db() const { return 10.0 * attenuation * length / std::log(10.0); }
    double effective_length(double dz) const {
        return attenuation > 0 ? (1.0 - std::exp(-attenuation * dz)) / attenuation : dz;
    }

    void validate() const {
        if (!(length > 0)) throw model_error("span: length must be > 0");
        if (!(attenuation >= 0)) throw model_error("span: attenuation must be >= 0");
        if (!(gamma_nl >= 0)) throw model_error("span: gamma_nl must be >= 0");
        if (!std::isfinite(beta2) || !std::isfinite(dispersion_D))
            throw model_error("span: non-finite dispersion");
    }
};

struct Amplifier {
    double gain = 1.0;                 // linear power ratio
    double noise_figure = 1.0;         // linear
    double reference_bandwidth = 32e9; // Hz

    void validate() const {
        if (!(gain >= 1.0)) throw model_error("amplifier: gain must be >= 1");
        if (!(noise_figure >= 1.0)) throw model_error("amplifier: noise_figure must be >= 1");
        if (!(reference_bandwidth > 0)) throw model_error("amplifier: reference_bandwidth must be > 0");
    }
};

struct RouteElement {
    FiberSpan span;
    Amplifier amp;
};

struct Route {
    std::vector<RouteElement> elements;
    ChannelConfig channel;

    std::size_t size() const { return elements.size(); }

    void validate() const {
        if (elements.empty()) throw model_error("route: must contain at least one span");
        channel.validate();
        for (const auto& e : elements) { e.span.validate(); e.amp.validate(); }
    }

    // field-wise identity of all spans and amplifiers
    bool is_periodic() const {
        if (elements.empty()) return false;
        const auto& s0 = elements.front().span;
        const auto& a0 = elements.front().amp;
        for (const auto& e : elements) {
            const auto& s = e.span;
            const auto& a = e.amp;
            if (s.length != s0.length || s.beta2 != s0.beta2 ||
                s.attenuation != s0.attenuation || s.gamma_nl != s0.gamma_nl)
                return false;
            if (a.gain != a0.gain || a.noise_figure != a0.noise_figure ||
                a.reference_bandwidth != a0.reference_bandwidth)
                return false;
        }
        return true;
    }
};

}  // namespace spanledger
