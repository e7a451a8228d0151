// spanledger: per-span GSNR budgeting with coherent SPM accumulation,
// plus a split-step oracle for validating the analytic model.
#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "spanledger/coherence.hpp"
#include "spanledger/errors.hpp"
#include "spanledger/qot.hpp"
#include "spanledger/scenario.hpp"
#include "spanledger/ssfm.hpp"
#include "spanledger/table.hpp"
#include "spanledger/units.hpp"

using nlohmann::json;
using namespace spanledger;

namespace {

int thread_budget() {
    if (const char* env = std::getenv("SPANLEDGER_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

double nan_d() { return std::numeric_limits<double>::quiet_NaN(); }

struct CommonOpts {
    bool as_json = false;
    bool strict = false;
    std::string output_dir;  // overrides [output] directory when set
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_flag("--json", c.as_json, "emit results as a JSON document on stdout");
    cmd->add_flag("--strict", c.strict, "escalate nonperturbative warnings to errors");
    cmd->add_option("-o,--output-dir", c.output_dir, "directory for emitted files");
}

std::string out_dir(const CommonOpts& c, const ScenarioConfig& cfg) {
    return c.output_dir.empty() ? cfg.output_dir : c.output_dir;
}

void emit(const ScenarioConfig& cfg, const CommonOpts& c, const std::string& name,
          const Table& t, const json& j) {
    const std::string dir = out_dir(c, cfg);
    if (cfg.emit_csv) atomic_write(dir + "/" + name + ".csv", t.to_csv());
    if (cfg.emit_json) atomic_write(dir + "/" + name + ".json", j.dump(2) + "\n");
}

// ---------------------------------------------------------------- estimate
int cmd_estimate(const std::string& config_path, const CommonOpts& c) {
    ScenarioConfig cfg = parse_scenario_file(config_path);
    cfg.require_route("estimate");
    const DisturbanceLedger led = ledger(cfg.route, cfg.spm_inputs, cfg.xpm_inputs, cfg.model);
    const GsnrDecomposition dec = gsnr_decomposition(led);

    Table t;
    t.comments = {"spanledger estimate", "mode = " + to_string(led.mode),
                  "launch_power_w = " + num9(led.launch_power)};
    t.header = {"span_index", "p_ase_w",  "p_xpm_w", "p_spm_w",
                "coh_spm_w",  "p_dist_w", "gsnr_db", "snr_spm_db"};
    json jrows = json::array();
    for (const auto& r : led.rows) {
        t.add_row({intstr(r.span_index), num9(r.p_ase), num9(r.p_xpm), num9(r.p_spm_local),
                   num9(r.p_spm_correction), num9(r.p_dist_total), num9(r.gsnr_db),
                   num9(r.snr_spm_db)});
        jrows.push_back({{"span_index", r.span_index},
                         {"p_ase_w", r.p_ase},
                         {"p_xpm_w", r.p_xpm},
                         {"p_spm_w", r.p_spm_local},
                         {"coh_spm_w", r.p_spm_correction},
                         {"p_dist_w", r.p_dist_total},
                         {"gsnr_db", r.gsnr_db},
                         {"snr_spm_db", r.snr_spm_db}});
    }
    auto db_or_inf = [](double lin) {
        return std::isinf(lin) ? std::numeric_limits<double>::infinity()
                               : 10.0 * std::log10(lin);
    };
    json j = {{"command", "estimate"},
              {"mode", to_string(led.mode)},
              {"launch_power_w", led.launch_power},
              {"spans", jrows},
              {"decomposition",
               {{"snr_ase_db", db_or_inf(dec.snr_ase)},
                {"snr_xpm_db", db_or_inf(dec.snr_xpm)},
                {"snr_spm_db", db_or_inf(dec.snr_spm)},
                {"gsnr_db", db_or_inf(dec.gsnr)}}}};
    emit(cfg, c, "estimate", t, j);

    if (c.as_json) {
        std::cout << j.dump(2) << "\n";
    } else {
        const auto& last = led.rows.back();
        std::cout << "mode " << to_string(led.mode) << ", " << led.rows.size()
                  << " spans: GSNR " << num9(last.gsnr_db) << " dB (ASE "
                  << num9(db_or_inf(dec.snr_ase)) << " / XPM " << num9(db_or_inf(dec.snr_xpm))
                  << " / SPM " << num9(db_or_inf(dec.snr_spm)) << " dB)\n"
                  << "wrote " << out_dir(c, cfg) << "/estimate.csv\n";
    }
    return 0;
}

// ---------------------------------------------------------------- coherence
struct SweepSpec {
    double lo = 0, hi = 0;
    int points = 0;
    bool log = true;
};

SweepSpec parse_sweep(const std::string& s) {
    // "0.5:10:log25" or "0.5:10:lin25"
    SweepSpec sp;
    const auto c1 = s.find(':');
    const auto c2 = s.find(':', c1 == std::string::npos ? std::string::npos : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw config_error("--sweep-theta expects LO:HI:logN or LO:HI:linN");
    try {
        sp.lo = std::stod(s.substr(0, c1));
        sp.hi = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
        std::string grid = s.substr(c2 + 1);
        if (grid.rfind("log", 0) == 0) sp.log = true;
        else if (grid.rfind("lin", 0) == 0) sp.log = false;
        else throw config_error("sweep grid must start with log or lin");
        sp.points = std::stoi(grid.substr(3));
    } catch (const config_error&) {
        throw;
    } catch (const std::exception&) {
        throw config_error("cannot parse sweep spec '" + s + "'");
    }
    if (!(sp.lo > 0) || !(sp.hi > sp.lo) || sp.points < 2)
        throw config_error("sweep needs 0 < LO < HI and at least 2 points");
    return sp;
}

int cmd_coherence(std::optional<double> theta_opt, double symbol_rate_ghz, double length_km,
                  double dispersion, std::int64_t n_max, double tolerance, std::int64_t cap,
                  const std::string& sweep_spec, const CommonOpts& c) {
    double th = 0;
    if (theta_opt) {
        th = *theta_opt;
    } else if (dispersion > 0 && length_km > 0) {
        const double b2 = std::abs(beta2_from_D(dispersion_si(dispersion), default_wavelength));
        th = theta(symbol_rate_ghz * 1e9, b2, length_km * 1e3);
    } else if (sweep_spec.empty()) {
        throw config_error("coherence: give --theta, or --dispersion-ps-nm-km with --length-km");
    }

    ScenarioConfig sink;  // defaults only; coherence runs without a scenario file
    sink.emit_csv = true;

    if (!sweep_spec.empty()) {
        const SweepSpec sp = parse_sweep(sweep_spec);
        std::vector<double> thetas(sp.points);
        for (int i = 0; i < sp.points; ++i) {
            const double f = static_cast<double>(i) / (sp.points - 1);
            thetas[i] = sp.log ? sp.lo * std::pow(sp.hi / sp.lo, f)
                               : sp.lo + (sp.hi - sp.lo) * f;
        }
        struct Point { double c20, dc20, cinf; };
        std::vector<Point> pts(sp.points);
        const int workers = std::min<int>(thread_budget(), sp.points);
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        std::exception_ptr first_error;
        std::mutex err_mu;
        auto work = [&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= sp.points) return;
                try {
                    pts[i].c20 = coherent_coefficient(n_max, thetas[i]);
                    pts[i].dc20 = n_max >= 2 ? per_span_increment(n_max, thetas[i]) : 0.0;
                    pts[i].cinf = asymptotic_coefficient(thetas[i], tolerance, cap).c_inf;
                } catch (...) {
                    std::scoped_lock lk(err_mu);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        if (workers > 1) {
            for (int w = 0; w < workers; ++w) pool.emplace_back(work);
            for (auto& t : pool) t.join();
        } else {
            work();
        }
        if (first_error) std::rethrow_exception(first_error);

        const std::string nm = std::to_string(n_max);
        Table t;
        t.comments = {"spanledger coherence sweep", "n = " + nm,
                      "tolerance = " + num9(tolerance)};
        t.header = {"theta", "c_at_n" + nm, "delta_c_at_n" + nm, "c_inf"};
        json jpts = json::array();
        for (int i = 0; i < sp.points; ++i) {
            t.add_row({num9(thetas[i]), num9(pts[i].c20), num9(pts[i].dc20), num9(pts[i].cinf)});
            jpts.push_back({{"theta", thetas[i]},
                            {"c_at_n", pts[i].c20},
                            {"delta_c_at_n", pts[i].dc20},
                            {"c_inf", pts[i].cinf}});
        }
        json j = {{"command", "coherence-sweep"}, {"n", n_max}, {"points", jpts}};
        emit(sink, c, "sweep", t, j);
        if (c.as_json) std::cout << j.dump(2) << "\n";
        else std::cout << "wrote " << out_dir(c, sink) << "/sweep.csv (" << sp.points
                       << " theta points)\n";
        return 0;
    }

    const CoherenceProfile p = build_profile(th, n_max, tolerance, cap);
    Table t;
    t.comments = {"spanledger coherence", "theta = " + num9(th)};
    t.header = {"n", "c_n", "delta_c_n", "rho_n"};
    json jrows = json::array();
    for (std::int64_t n = 1; n <= n_max; ++n) {
        const double cn = p.c_n[n - 1];
        const double dc = n >= 2 ? p.delta_c[n - 2] : nan_d();
        const double rh = rho(n, th);
        t.add_row({intstr(n), num9(cn), num9(dc), num9(rh)});
        jrows.push_back({{"n", n}, {"c_n", cn}, {"delta_c_n", n >= 2 ? json(dc) : json()},
                         {"rho_n", rh}});
    }
    // footer row: series limit with its certificate
    t.add_row({"inf", num9(p.c_inf), num9(p.c_inf_tail_bound), intstr(p.c_inf_terms)});
    json j = {{"command", "coherence"},
              {"theta", th},
              {"rows", jrows},
              {"c_inf", p.c_inf},
              {"tail_bound", p.c_inf_tail_bound},
              {"terms_used", p.c_inf_terms}};
    emit(sink, c, "coherence", t, j);
    if (c.as_json) std::cout << j.dump(2) << "\n";
    else std::cout << "theta " << num9(th) << ": C(" << n_max << ") = " << num9(p.c_n[n_max - 1])
                   << ", c_inf = " << num9(p.c_inf) << " (+/- " << num9(p.c_inf_tail_bound)
                   << ", " << p.c_inf_terms << " terms)\nwrote " << out_dir(c, sink)
                   << "/coherence.csv\n";
    return 0;
}

// ---------------------------------------------------------------- validate
int cmd_validate(const std::string& config_path, const CommonOpts& c) {
    ScenarioConfig cfg = parse_scenario_file(config_path);
    cfg.require_route("validate");
    if (!cfg.has_simulation)
        throw config_error("validate: the scenario needs a [simulation] section");
    if (!cfg.route.is_periodic())
        throw mode_error("validate: accumulation validation requires a periodic route");

    const SimRun run = run_accumulation_averaged(cfg.sim, cfg.seeds);
    const std::int64_t n_spans = run.snr_db.size();

    const bool linear_link = cfg.route.elements.front().span.gamma_nl == 0.0;
    const double inf = std::numeric_limits<double>::infinity();
    const double th = theta_of(cfg.route.elements.front().span, cfg.channel);
    const CoherenceProfile prof = build_profile(th, n_spans, cfg.model.tolerance, cfg.model.cap);
    const double c_inf = cfg.model.cinf_mode == CinfMode::series_limit
                             ? prof.c_inf
                             : per_span_increment(cfg.model.cinf_n, th);

    // models share the simulator's single-span noise power as their scale
    const double p = cfg.channel.launch_power;
    const double n1 = p / std::pow(10.0, run.snr_db[0] / 10.0);

    Table t;
    t.comments = {"spanledger validate", "theta = " + num9(th),
                  "seed = " + std::to_string(cfg.sim.seed) +
                      (cfg.seeds > 1 ? " (x" + std::to_string(cfg.seeds) + " averaged)" : "")};
    if (run.nonperturbative) {
        std::string spans;
        for (Eigen::Index i = 0; i < run.snr_db.size(); ++i)
            if (run.snr_db[i] < 0.0) spans += (spans.empty() ? "" : ",") + std::to_string(i + 1);
        t.comments.push_back("warning: nonperturbative regime (SNR below 0 dB) at spans " +
                             spans);
    }
    if (run.nonmonotone)
        t.comments.push_back("warning: measured noise power not monotone; averaging too thin");
    t.header = {"n", "snr_sim_db", "snr_incoherent_db", "snr_coherent_db", "snr_equivalent_db",
                "delta_snr_sim_db", "delta_snr_model_db", "c_hat_n", "c_model_n"};

    json jrows = json::array();
    double prev_coh = nan_d();
    for (std::int64_t n = 1; n <= n_spans; ++n) {
        const double nd = static_cast<double>(n);
        const double snr_inc = linear_link ? inf : 10.0 * std::log10(p / (nd * n1));
        const double snr_coh =
            linear_link ? inf : 10.0 * std::log10(p / ((nd + prof.c_n[n - 1]) * n1));
        const double snr_eq =
            linear_link ? inf : 10.0 * std::log10(p / (nd * (1.0 + c_inf) * n1));
        const double dmodel = n >= 2 ? prev_coh - snr_coh : nan_d();
        prev_coh = snr_coh;
        t.add_row({intstr(n), num9(run.snr_db[n - 1]), num9(snr_inc), num9(snr_coh),
                   num9(snr_eq), num9(run.delta_snr_db[n - 1]), num9(dmodel),
                   num9(run.c_hat[n - 1]), num9(prof.c_n[n - 1])});
        jrows.push_back({{"n", n},
                         {"snr_sim_db", run.snr_db[n - 1]},
                         {"snr_incoherent_db", snr_inc},
                         {"snr_coherent_db", snr_coh},
                         {"snr_equivalent_db", snr_eq},
                         {"c_hat_n", run.c_hat[n - 1]},
                         {"c_model_n", prof.c_n[n - 1]}});
    }
    json j = {{"command", "validate"},
              {"theta", th},
              {"c_inf", c_inf},
              {"nonperturbative", run.nonperturbative},
              {"rows", jrows}};
    emit(cfg, c, "validate", t, j);

    if (run.nonperturbative)
        std::cerr << "warning: simulation left the perturbative regime (SNR < 0 dB)\n";
    if (c.as_json) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "theta " << num9(th) << ", " << n_spans << " spans: sim SNR "
                  << num9(run.snr_db[n_spans - 1]) << " dB, c_hat(" << n_spans << ") = "
                  << num9(run.c_hat[n_spans - 1]) << " vs model " << num9(prof.c_n[n_spans - 1])
                  << "\nwrote " << out_dir(c, cfg) << "/validate.csv\n";
    }
    if (run.nonperturbative && c.strict) return 4;
    return 0;
}

// ---------------------------------------------------------------- calibrate
int cmd_calibrate(const std::string& config_path, const CommonOpts& c) {
    ScenarioConfig cfg = parse_scenario_file(config_path);
    cfg.require_route("calibrate");
    if (!cfg.has_simulation)
        throw config_error("calibrate: the scenario needs a [simulation] section");
    if (cfg.route.size() != 1)
        throw model_error("calibrate: use a single-span route (spans = TYPE*1)");

    CalibrationResult r;
    try {
        r = calibrate_single_span_spm(cfg.sim);
    } catch (const nonperturbative_error& e) {
        std::cerr << "warning: " << e.what() << "\n";
        return c.strict ? 4 : 0;
    }

    const std::string snippet = "# single-span SPM calibration; merge into [route]\n"
                                "spm_w = " + num9(r.p_spm_w) + "\n";
    const std::string dir = out_dir(c, cfg);
    atomic_write(dir + "/calibration.ini", snippet);
    json j = {{"command", "calibrate"},
              {"p_spm_w", r.p_spm_w},
              {"eta_w_per_w3", r.eta_w_per_w3},
              {"snr_spm_db", r.snr_db},
              {"cubic_ratio", r.cubic_ratio}};
    if (cfg.emit_json) atomic_write(dir + "/calibrate.json", j.dump(2) + "\n");
    if (c.as_json)
        std::cout << j.dump(2) << "\n";
    else
        std::cout << "single-span SPM: " << num9(r.p_spm_w) << " W at launch ("
                  << num9(r.snr_db) << " dB), +3 dB scaling x" << num9(r.cubic_ratio)
                  << "\nwrote " << dir << "/calibration.ini\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"disaggregated QoT estimation with coherent SPM accumulation"};
    app.require_subcommand(1);

    std::string est_cfg, val_cfg, cal_cfg;
    CommonOpts est_c, coh_c, val_c, cal_c;

    auto* est = app.add_subcommand("estimate", "per-span GSNR ledger from a scenario");
    est->add_option("config", est_cfg, "scenario file")->required();
    add_common(est, est_c);

    auto* coh = app.add_subcommand("coherence", "coherence coefficient tables");
    std::optional<double> th_opt;
    double sr_ghz = 32.0, len_km = 0.0, disp = 0.0, tol = 1e-3;
    std::int64_t n_max = 20, cap = default_series_cap;
    std::string sweep;
    coh->add_option("--theta", th_opt, "dimensionless theta");
    coh->add_option("--symbol-rate-ghz", sr_ghz, "symbol rate, GHz (with span parameters)");
    coh->add_option("--length-km", len_km, "span length, km");
    coh->add_option("--dispersion-ps-nm-km", disp, "dispersion D, ps/nm/km");
    coh->add_option("--n-max", n_max, "largest span count tabulated");
    coh->add_option("--tolerance", tol, "series tail tolerance");
    coh->add_option("--cap", cap, "series term cap");
    coh->add_option("--sweep-theta", sweep, "LO:HI:logN (or linN) theta sweep");
    add_common(coh, coh_c);

    auto* val = app.add_subcommand("validate", "split-step oracle vs analytic model");
    val->add_option("config", val_cfg, "scenario file")->required();
    add_common(val, val_c);

    auto* cal = app.add_subcommand("calibrate", "single-span SPM power from the oracle");
    cal->add_option("config", cal_cfg, "scenario file")->required();
    add_common(cal, cal_c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (est->parsed()) return cmd_estimate(est_cfg, est_c);
        if (coh->parsed())
            return cmd_coherence(th_opt, sr_ghz, len_km, disp, n_max, tol, cap, sweep, coh_c);
        if (val->parsed()) return cmd_validate(val_cfg, val_c);
        if (cal->parsed()) return cmd_calibrate(cal_cfg, cal_c);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nonperturbative_error& e) {
        std::cerr << "nonperturbative: " << e.what() << "\n";
        return 4;
    } catch (const model_error& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
