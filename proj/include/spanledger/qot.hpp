#pragma once
#include <string>
#include <vector>

#include "spanledger/coherence.hpp"
#include "spanledger/types.hpp"

// Per-span disturbance ledger: ASE + XPM + SPM + coherent-SPM correction,
// folded into cumulative GSNR along a route.
namespace spanledger {

enum class LedgerMode { incoherent, coherent, equivalent };
enum class CinfMode { series_limit, at_n };

std::string to_string(LedgerMode m);
LedgerMode ledger_mode_from_string(const std::string& s);

struct ModelOptions {
    LedgerMode mode = LedgerMode::equivalent;
    double tolerance = 1e-3;              // c_inf series tolerance
    std::int64_t cap = default_series_cap;
    CinfMode cinf_mode = CinfMode::series_limit;
    std::int64_t cinf_n = 20;             // increment order when cinf_mode = at_n
};

struct LedgerRow {
    int span_index = 0;        // 1-based
    double p_ase = 0;          // W
    double p_xpm = 0;          // W
    double p_spm_local = 0;    // W
    double p_spm_correction = 0;  // W, coherent accumulation excess
    double p_dist_total = 0;   // W, sum of the four terms
    double cum_dist = 0;       // W, running total
    double gsnr = 0;           // linear
    double gsnr_db = 0;
    double snr_spm = 0;        // linear, SPM terms only
    double snr_spm_db = 0;
};

struct DisturbanceLedger {
    LedgerMode mode = LedgerMode::incoherent;
    double launch_power = 0;  // W
    std::vector<LedgerRow> rows;
};

// single-polarization ASE: h * f * NF * (G - 1) * B_ref
double ase_power(const Amplifier& amp, double reference_bandwidth, double carrier_frequency);

// equivalent-local SPM: p * (1 + c_inf)
double equivalent_spm(double p_spm_local, double c_inf);

// Builds the ledger. spm/xpm inputs are per-span generated powers (W), one per
// route element. Coherent mode requires a periodic route with identical SPM
// inputs; equivalent mode evaluates each span's own theta.
DisturbanceLedger ledger(const Route& route, const std::vector<double>& spm_inputs,
                         const std::vector<double>& xpm_inputs, const ModelOptions& opts);

inline DisturbanceLedger ledger(const Route& route, const std::vector<double>& spm,
                                const std::vector<double>& xpm, LedgerMode mode) {
    ModelOptions o;
    o.mode = mode;
    return ledger(route, spm, xpm, o);
}

struct GsnrDecomposition {
    double snr_ase = 0;   // linear; may be +inf when the contribution is zero
    double snr_xpm = 0;
    double snr_spm = 0;
    double gsnr = 0;
};

// end-of-route split: 1/gsnr = 1/snr_ase + 1/snr_xpm + 1/snr_spm
GsnrDecomposition gsnr_decomposition(const DisturbanceLedger& ledger);

}  // namespace spanledger
