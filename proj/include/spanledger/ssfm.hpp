#pragma once
#include <Eigen/Dense>
#include <cstdint>

#include "spanledger/types.hpp"

// Single-channel split-step Fourier oracle with a data-aided receiver.
// Amplifiers are noiseless so the measured impairment is purely nonlinear.
namespace spanledger {

struct StepControl {
    enum class Mode { adaptive, fixed };
    Mode mode = Mode::adaptive;
    double max_phase = 1e-3;  // rad per step, adaptive
    double dz = 100.0;        // m, fixed

    void validate() const {
        if (mode == Mode::adaptive && !(max_phase > 0 && max_phase <= 1e-3))
            throw model_error("step_control: adaptive max phase must be in (0, 1e-3] rad");
        if (mode == Mode::fixed && !(dz > 0))
            throw model_error("step_control: fixed step must be positive");
    }
};

struct SimConfig {
    std::uint64_t seed = 1;
    std::int64_t n_symbols = 1 << 15;
    int samples_per_symbol = 16;
    StepControl step;
    Route route;
    bool measure_after_each_span = true;
    int edge_exclusion = 32;  // symbols dropped at each end before the error average

    void validate() const {
        if (n_symbols < (1 << 12)) throw model_error("sim: n_symbols must be >= 4096");
        if ((n_symbols & (n_symbols - 1)) != 0)
            throw model_error("sim: n_symbols must be a power of two");
        if (samples_per_symbol < 8) throw model_error("sim: samples_per_symbol must be >= 8");
        if (edge_exclusion < 0 || 2 * static_cast<std::int64_t>(edge_exclusion) >= n_symbols - 2)
            throw model_error("sim: edge_exclusion out of range");
        step.validate();
        route.validate();
    }
};

struct Waveform {
    Eigen::ArrayXcd samples;
    double fs = 0;  // Hz
};

struct TxFrame {
    Waveform wave;
    Eigen::ArrayXcd symbols;  // reference sequence, unit average power
};

struct SimRun {
    Eigen::ArrayXd snr_db;        // SNR_SPM(n), n = 1..N
    Eigen::ArrayXd delta_snr_db;  // snr(n-1) - snr(n); NaN at n = 1
    Eigen::ArrayXd c_hat;         // empirical coherence coefficients
    bool nonperturbative = false; // some span measured below 0 dB
    bool nonmonotone = false;     // noise power not increasing span over span
};

// root-raised-cosine amplitude response at frequency f
double rrc_amplitude(double f, double symbol_rate, double roll_off);

TxFrame generate_waveform(std::uint64_t seed, const ChannelConfig& channel,
                          std::int64_t n_symbols, int samples_per_symbol);

void propagate_span(Waveform& wave, const FiberSpan& span, const StepControl& step);

void amplify_noiseless(Waveform& wave, double gain);

// accumulated_dispersion = sum of beta2 * length over the traversed spans
double receive_and_measure(const Waveform& wave, const ChannelConfig& channel,
                           const Eigen::ArrayXcd& reference_symbols,
                           double accumulated_dispersion, int samples_per_symbol,
                           int edge_exclusion);

SimRun run_accumulation(const SimConfig& config);

// noise-power average of several runs with consecutive seeds
SimRun run_accumulation_averaged(const SimConfig& config, int n_seeds);

// c_hat(n) = N(n)/N(1) - n from the measured SNR series
Eigen::ArrayXd extract_coherence(const Eigen::ArrayXd& snr_db, bool* nonmonotone = nullptr);

struct CalibrationResult {
    double p_spm_w = 0;          // nonlinear noise power after one span at launch power
    double eta_w_per_w3 = 0;     // p_spm / launch_power^3
    double snr_db = 0;
    double cubic_ratio = 0;      // measured N(+3 dB)/N, ideal 8
};

// single-span SPM calibration with a +3 dB cubic-scaling cross-check
CalibrationResult calibrate_single_span_spm(const SimConfig& config);

}  // namespace spanledger
