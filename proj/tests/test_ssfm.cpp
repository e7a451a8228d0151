#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <unsupported/Eigen/FFT>

#include "spanledger/errors.hpp"
#include "spanledger/ssfm.hpp"
#include "spanledger/units.hpp"

using namespace spanledger;

namespace {

Route small_route(int n_spans, double gamma_per_w_km = 1.27, double atten_db_km = 0.2,
                  Constellation c = Constellation::gaussian) {
    Route r;
    FiberSpan s = FiberSpan::from_engineering(80.0, 16.7, atten_db_km, gamma_per_w_km, "smf");
    Amplifier a;
    a.gain = s.loss_linear();
    a.noise_figure = 1.0;
    for (int i = 0; i < n_spans; ++i) r.elements.push_back({s, a});
    r.channel.symbol_rate = 32e9;
    r.channel.launch_power = 1e-3;
    r.channel.constellation = c;
    r.channel.roll_off = 0.1;
    return r;
}

SimConfig small_sim(int n_spans, std::uint64_t seed = 7,
                    Constellation c = Constellation::gaussian) {
    SimConfig cfg;
    cfg.seed = seed;
    cfg.n_symbols = 1 << 12;
    cfg.samples_per_symbol = 8;
    cfg.route = small_route(n_spans, 1.27, 0.2, c);
    return cfg;
}

}  // namespace

TEST_CASE("rrc amplitude: flat passband, raised-cosine skirt, zero stopband") {
    const double rs = 32e9, b = 0.1;
    CHECK(rrc_amplitude(0.0, rs, b) == 1.0);
    CHECK(rrc_amplitude(0.44 * rs, rs, b) == 1.0);                 // inside (1-b)Rs/2
    CHECK(rrc_amplitude(0.5 * rs, rs, b) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(rrc_amplitude(0.56 * rs, rs, b) == 0.0);                 // beyond (1+b)Rs/2
    CHECK(rrc_amplitude(-0.5 * rs, rs, b) == rrc_amplitude(0.5 * rs, rs, b));
}

TEST_CASE("generated waveform: exact launch power and bandlimited spectrum") {
    ChannelConfig ch;
    ch.symbol_rate = 32e9;
    ch.launch_power = 2e-3;
    ch.constellation = Constellation::gaussian;
    const auto tx = generate_waveform(11, ch, 1 << 12, 8);
    const auto N = tx.wave.samples.size();
    REQUIRE(N == (1 << 12) * 8);
    CHECK(tx.wave.fs == doctest::Approx(8 * 32e9).epsilon(1e-15));
    const double power = tx.wave.samples.abs2().mean();
    CHECK(power == doctest::Approx(2e-3).epsilon(1e-12));

    // out-of-band content below -40 dB of total (it is spectrally shaped, so
    // in exact arithmetic it would be zero)
    Eigen::FFT<double> fft;
    Eigen::VectorXcd t = tx.wave.samples.matrix();
    Eigen::VectorXcd F(N);
    fft.fwd(F.data(), t.data(), static_cast<int>(N));
    double in_band = 0.0, out_band = 0.0;
    const double f_edge = 0.5 * (1.0 + ch.roll_off) * ch.symbol_rate;
    for (Eigen::Index i = 0; i < N; ++i) {
        const double f = (i <= N / 2 ? double(i) : double(i) - double(N)) * tx.wave.fs / double(N);
        (std::abs(f) <= f_edge ? in_band : out_band) += std::norm(F[i]);
    }
    CHECK(out_band < 1e-4 * in_band);
}

TEST_CASE("qpsk symbols have unit modulus, gaussian matches unit power") {
    ChannelConfig ch;
    ch.constellation = Constellation::qpsk;
    auto tx = generate_waveform(3, ch, 1 << 12, 8);
    for (Eigen::Index i = 0; i < 64; ++i)
        CHECK(std::abs(tx.symbols[i]) == doctest::Approx(1.0).epsilon(1e-12));
    ch.constellation = Constellation::gaussian;
    tx = generate_waveform(3, ch, 1 << 12, 8);
    CHECK(tx.symbols.abs2().mean() == doctest::Approx(1.0).epsilon(0.1));
    ch.constellation = Constellation::qam16;
    tx = generate_waveform(3, ch, 1 << 13, 8);
    CHECK(tx.symbols.abs2().mean() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("linear-only propagation is transparent to the receiver") {
    SimConfig cfg = small_sim(3);
    for (auto& e : cfg.route.elements) e.span.gamma_nl = 0.0;
    const SimRun run = run_accumulation(cfg);
    for (Eigen::Index i = 0; i < run.snr_db.size(); ++i) CHECK(run.snr_db[i] > 50.0);
    CHECK_FALSE(run.nonperturbative);
}

TEST_CASE("zero-dispersion pure-SPM span preserves the envelope") {
    ChannelConfig ch;
    ch.constellation = Constellation::gaussian;
    auto tx = generate_waveform(5, ch, 1 << 12, 8);
    const Eigen::ArrayXd before = tx.wave.samples.abs2();
    FiberSpan s;
    s.length = 80e3;
    s.beta2 = 0.0;
    s.dispersion_D = 0.0;
    s.attenuation = 0.0;
    s.gamma_nl = 1.27e-3;
    StepControl step;
    propagate_span(tx.wave, s, step);
    const Eigen::ArrayXd after = tx.wave.samples.abs2();
    CHECK(((after - before).abs() / before.maxCoeff()).maxCoeff() < 1e-9);
}

TEST_CASE("lossless nonlinear propagation conserves energy") {
    ChannelConfig ch;
    ch.constellation = Constellation::gaussian;
    auto tx = generate_waveform(5, ch, 1 << 12, 8);
    const double before = tx.wave.samples.abs2().sum();
    FiberSpan s = FiberSpan::from_engineering(40.0, 16.7, 0.0, 1.27, "lossless");
    StepControl step;
    propagate_span(tx.wave, s, step);
    CHECK(tx.wave.samples.abs2().sum() == doctest::Approx(before).epsilon(1e-9));
}

TEST_CASE("amplifier gain restores launch power exactly") {
    SimConfig cfg = small_sim(1);
    auto tx = generate_waveform(cfg.seed, cfg.route.channel, cfg.n_symbols,
                                cfg.samples_per_symbol);
    propagate_span(tx.wave, cfg.route.elements[0].span, cfg.step);
    amplify_noiseless(tx.wave, cfg.route.elements[0].amp.gain);
    CHECK(tx.wave.samples.abs2().mean() ==
          doctest::Approx(cfg.route.channel.launch_power).epsilon(1e-9));
}

TEST_CASE("same seed reproduces the run bit for bit, different seed does not") {
    SimConfig cfg = small_sim(2);
    const SimRun a = run_accumulation(cfg);
    const SimRun b = run_accumulation(cfg);
    REQUIRE(a.snr_db.size() == b.snr_db.size());
    for (Eigen::Index i = 0; i < a.snr_db.size(); ++i) CHECK(a.snr_db[i] == b.snr_db[i]);
    cfg.seed = 8;
    const SimRun c = run_accumulation(cfg);
    CHECK(a.snr_db[0] != c.snr_db[0]);
}

TEST_CASE("halving the phase budget leaves the answer in place") {
    SimConfig cfg = small_sim(2);
    cfg.step.max_phase = 1e-3;
    const SimRun coarse = run_accumulation(cfg);
    cfg.step.max_phase = 5e-4;
    const SimRun fine = run_accumulation(cfg);
    for (Eigen::Index i = 0; i < coarse.snr_db.size(); ++i)
        CHECK(std::abs(coarse.snr_db[i] - fine.snr_db[i]) < 0.05);
}

TEST_CASE("fixed-step mode agrees with adaptive when steps are short") {
    SimConfig cfg = small_sim(1);
    const SimRun adaptive = run_accumulation(cfg);
    cfg.step.mode = StepControl::Mode::fixed;
    cfg.step.dz = 50.0;
    const SimRun fixed = run_accumulation(cfg);
    CHECK(std::abs(adaptive.snr_db[0] - fixed.snr_db[0]) < 0.05);
}

TEST_CASE("fixed steps that rotate too far per step are refused") {
    SimConfig cfg = small_sim(1);
    cfg.route.channel.launch_power = 0.5;  // strongly nonlinear on purpose
    cfg.step.mode = StepControl::Mode::fixed;
    cfg.step.dz = 80e3;
    CHECK_THROWS_AS(run_accumulation(cfg), model_error);
}

TEST_CASE("snr falls monotonically while nli accumulates") {
    SimConfig cfg = small_sim(4);
    const SimRun run = run_accumulation(cfg);
    REQUIRE(run.snr_db.size() == 4);
    for (Eigen::Index i = 1; i < 4; ++i) CHECK(run.snr_db[i] < run.snr_db[i - 1]);
    CHECK(std::isnan(run.delta_snr_db[0]));
    for (Eigen::Index i = 1; i < 4; ++i)
        CHECK(run.delta_snr_db[i] ==
              doctest::Approx(run.snr_db[i - 1] - run.snr_db[i]).epsilon(1e-12));
    CHECK(run.c_hat[0] == 0.0);
    CHECK_FALSE(run.nonperturbative);
}

TEST_CASE("extract_coherence undoes a synthetic accumulation law") {
    // build snr for N(n) = K (n + 0.1 (n-1)^2), recover c_hat = 0.1 (n-1)^2
    Eigen::ArrayXd snr(5);
    for (int n = 1; n <= 5; ++n) {
        const double noise = 2e-3 * (n + 0.1 * (n - 1) * (n - 1));
        snr[n - 1] = 10.0 * std::log10(1.0 / noise);
    }
    bool nonmono = true;
    const Eigen::ArrayXd c = extract_coherence(snr, &nonmono);
    CHECK_FALSE(nonmono);
    for (int n = 1; n <= 5; ++n)
        CHECK(c[n - 1] == doctest::Approx(0.1 * (n - 1) * (n - 1)).epsilon(1e-10));

    Eigen::ArrayXd bad(3);
    bad << 20.0, 14.0, 15.0;  // noise shrinks from span 2 to 3
    extract_coherence(bad, &nonmono);
    CHECK(nonmono);
}

TEST_CASE("seed averaging matches a single run when n_seeds is one") {
    SimConfig cfg = small_sim(2);
    const SimRun one = run_accumulation(cfg);
    const SimRun avg = run_accumulation_averaged(cfg, 1);
    for (Eigen::Index i = 0; i < one.snr_db.size(); ++i)
        CHECK(one.snr_db[i] == doctest::Approx(avg.snr_db[i]).epsilon(1e-12));
}

TEST_CASE("calibration returns a cubic-scaling nonlinear power") {
    SimConfig cfg = small_sim(1);
    const CalibrationResult r = calibrate_single_span_spm(cfg);
    CHECK(r.p_spm_w > 0.0);
    CHECK(r.eta_w_per_w3 ==
          doctest::Approx(r.p_spm_w / std::pow(1e-3, 3)).epsilon(1e-12));
    CHECK(r.cubic_ratio == doctest::Approx(8.0).epsilon(0.10));
    CHECK(r.snr_db == doctest::Approx(10.0 * std::log10(1e-3 / r.p_spm_w)).epsilon(1e-9));
}

TEST_CASE("calibration refuses a nonperturbative operating point") {
    SimConfig cfg = small_sim(1);
    cfg.route.channel.launch_power = 0.02;  // ~0.5 rad mean phase, scaling breaks
    CHECK_THROWS_AS(calibrate_single_span_spm(cfg), nonperturbative_error);
}

TEST_CASE("config invariants are enforced") {
    SimConfig cfg = small_sim(1);
    cfg.n_symbols = 1000;  // not a power of two and too small
    CHECK_THROWS_AS(run_accumulation(cfg), model_error);
    cfg = small_sim(1);
    cfg.samples_per_symbol = 4;
    CHECK_THROWS_AS(run_accumulation(cfg), model_error);
    cfg = small_sim(1);
    cfg.step.max_phase = 5e-3;  // looser than the documented ceiling
    CHECK_THROWS_AS(run_accumulation(cfg), model_error);
    cfg = small_sim(1);
    cfg.route.elements.clear();
    CHECK_THROWS_AS(run_accumulation(cfg), std::exception);
}
