#include "spanledger/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "spanledger/units.hpp"

namespace spanledger {

namespace {

struct Entry {
    std::string value;
    int line = 0;
    int col = 0;
    bool used = false;
};

using Section = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& doc, int line, int col, const std::string& msg) {
    throw config_error(doc + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
}

struct Doc {
    std::string name;
    std::map<std::string, Section> sections;
    std::map<std::string, int> section_lines;

    bool has(const std::string& sec) const { return sections.count(sec) != 0; }

    Entry* find(const std::string& sec, const std::string& key) {
        auto s = sections.find(sec);
        if (s == sections.end()) return nullptr;
        auto k = s->second.find(key);
        if (k == s->second.end()) return nullptr;
        k->second.used = true;
        return &k->second;
    }

    double number(const std::string& sec, const std::string& key, double fallback) {
        Entry* e = find(sec, key);
        if (!e) return fallback;
        double v = 0;
        const char* b = e->value.data();
        const char* end = b + e->value.size();
        auto [p, ec] = std::from_chars(b, end, v);
        if (ec != std::errc() || p != end)
            fail(name, e->line, e->col, "expected a number for '" + key + "', got '" + e->value + "'");
        return v;
    }

    std::int64_t integer(const std::string& sec, const std::string& key, std::int64_t fallback) {
        Entry* e = find(sec, key);
        if (!e) return fallback;
        std::int64_t v = 0;
        const char* b = e->value.data();
        const char* end = b + e->value.size();
        auto [p, ec] = std::from_chars(b, end, v);
        if (ec != std::errc() || p != end)
            fail(name, e->line, e->col, "expected an integer for '" + key + "', got '" + e->value + "'");
        return v;
    }

    std::string text(const std::string& sec, const std::string& key, const std::string& fallback) {
        Entry* e = find(sec, key);
        return e ? e->value : fallback;
    }

    double required_number(const std::string& sec, const std::string& key) {
        if (!find(sec, key))
            throw config_error(name + ": [" + sec + "] is missing required key '" + key + "'");
        return number(sec, key, 0);
    }

    void reject_unused(const std::string& sec, const std::set<std::string>& known) {
        auto s = sections.find(sec);
        if (s == sections.end()) return;
        for (auto& [key, e] : s->second)
            if (!known.count(key))
                fail(name, e.line, e.col, "unknown key '" + key + "' in [" + sec + "]");
    }
};

Doc tokenize(const std::string& text, const std::string& doc_name) {
    Doc doc;
    doc.name = doc_name;
    std::istringstream in(text);
    std::string raw;
    std::string current;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        // strip comments ('#' or ';'), then whitespace
        std::string line = raw;
        if (const auto pos = line.find_first_of("#;"); pos != std::string::npos)
            line = line.substr(0, pos);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                fail(doc_name, line_no, 1, "malformed section header '" + raw + "'");
            current = trim(line.substr(1, line.size() - 2));
            if (current.empty()) fail(doc_name, line_no, 1, "empty section name");
            if (doc.sections.count(current))
                fail(doc_name, line_no, 1, "duplicate section [" + current + "]");
            doc.sections[current];
            doc.section_lines[current] = line_no;
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(doc_name, line_no, 1, "expected 'key = value', got '" + raw + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(doc_name, line_no, 1, "empty key");
        if (current.empty())
            fail(doc_name, line_no, 1, "key '" + key + "' appears before any [section]");
        const int col = static_cast<int>(raw.find(key.front())) + 1;
        if (doc.sections[current].count(key))
            fail(doc_name, line_no, col, "duplicate key '" + key + "' in [" + current + "]");
        if (value.empty()) fail(doc_name, line_no, col, "empty value for '" + key + "'");
        doc.sections[current][key] = Entry{value, line_no, col, false};
    }
    return doc;
}

Constellation constellation_from(const std::string& s, const Doc& d) {
    if (s == "qpsk") return Constellation::qpsk;
    if (s == "16qam") return Constellation::qam16;
    if (s == "gaussian") return Constellation::gaussian;
    throw config_error(d.name + ": unknown constellation '" + s +
                       "' (expected qpsk, 16qam or gaussian)");
}

// "smf*20, leaf*2, smf" -> expanded name list
std::vector<std::string> expand_span_list(const std::string& value, const Doc& d, int line) {
    std::vector<std::string> out;
    std::istringstream in(value);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) fail(d.name, line, 1, "empty entry in spans list");
        std::string name = tok;
        std::int64_t count = 1;
        if (const auto star = tok.find('*'); star != std::string::npos) {
            name = trim(tok.substr(0, star));
            const std::string cnt = trim(tok.substr(star + 1));
            const char* b = cnt.data();
            auto [p, ec] = std::from_chars(b, b + cnt.size(), count);
            if (ec != std::errc() || p != b + cnt.size() || count < 1)
                fail(d.name, line, 1, "bad repeat count in '" + tok + "'");
        }
        for (std::int64_t i = 0; i < count; ++i) out.push_back(name);
    }
    if (out.empty()) fail(d.name, line, 1, "spans list is empty");
    return out;
}

}  // namespace

ScenarioConfig parse_scenario_text(const std::string& text, const std::string& doc_name) {
    Doc doc = tokenize(text, doc_name);
    ScenarioConfig cfg;

    static const std::set<std::string> top_sections = {"channel", "route", "model",
                                                       "simulation", "output"};
    for (const auto& [sec, _] : doc.sections) {
        if (top_sections.count(sec)) continue;
        if (sec.rfind("spans.", 0) == 0 && sec.size() > 6) continue;
        fail(doc.name, doc.section_lines.at(sec), 1, "unknown section [" + sec + "]");
    }

    // [channel]
    if (doc.has("channel")) {
        cfg.channel.symbol_rate = doc.number("channel", "symbol_rate_ghz", 32.0) * 1e9;
        if (doc.find("channel", "carrier_thz"))
            cfg.channel.carrier_frequency = doc.number("channel", "carrier_thz", 0) * 1e12;
        cfg.channel.launch_power = dbm_to_watt(doc.number("channel", "launch_power_dbm", 0.0));
        cfg.channel.roll_off = doc.number("channel", "roll_off", 0.1);
        cfg.channel.constellation =
            constellation_from(doc.text("channel", "constellation", "qpsk"), doc);
        doc.reject_unused("channel", {"symbol_rate_ghz", "carrier_thz", "launch_power_dbm",
                                      "roll_off", "constellation"});
        try {
            cfg.channel.validate();
        } catch (const model_error& e) {
            throw config_error(doc.name + ": " + e.what());
        }
    }

    // [spans.NAME]
    for (auto& [sec, entries] : doc.sections) {
        if (sec.rfind("spans.", 0) != 0) continue;
        const std::string name = sec.substr(6);
        const double length = doc.required_number(sec, "length_km");
        const double disp = doc.required_number(sec, "dispersion_ps_nm_km");
        const double atten = doc.number(sec, "attenuation_db_km", 0.2);
        const double gamma = doc.number(sec, "gamma_per_w_km", 0.0);
        try {
            cfg.span_types[name] = FiberSpan::from_engineering(length, disp, atten, gamma, name,
                                                               cfg.channel.wavelength());
        } catch (const model_error& e) {
            throw config_error(doc.name + ": [" + sec + "]: " + e.what());
        }
        if (doc.find(sec, "spm_w")) cfg.type_spm[name] = doc.number(sec, "spm_w", 0.0);
        if (doc.find(sec, "xpm_w")) cfg.type_xpm[name] = doc.number(sec, "xpm_w", 0.0);
        doc.reject_unused(sec, {"length_km", "dispersion_ps_nm_km", "attenuation_db_km",
                                "gamma_per_w_km", "spm_w", "xpm_w"});
    }

    // [route]
    if (doc.has("route")) {
        Entry* spans = doc.find("route", "spans");
        if (!spans) throw config_error(doc.name + ": [route] is missing required key 'spans'");
        const auto names = expand_span_list(spans->value, doc, spans->line);

        const std::string gain = doc.text("route", "gain_db", "auto");
        const double nf_db = doc.number("route", "noise_figure_db", 5.0);
        const double bref =
            doc.number("route", "reference_bandwidth_ghz", cfg.channel.symbol_rate / 1e9) * 1e9;
        const bool route_spm = doc.find("route", "spm_w") != nullptr;
        const bool route_xpm = doc.find("route", "xpm_w") != nullptr;
        const double spm_w = doc.number("route", "spm_w", 0.0);
        const double xpm_w = doc.number("route", "xpm_w", 0.0);
        doc.reject_unused("route", {"spans", "gain_db", "noise_figure_db",
                                    "reference_bandwidth_ghz", "spm_w", "xpm_w"});

        cfg.route.channel = cfg.channel;
        for (const auto& n : names) {
            auto it = cfg.span_types.find(n);
            if (it == cfg.span_types.end())
                fail(doc.name, spans->line, spans->col,
                     "route references undefined span type '" + n + "'");
            RouteElement el;
            el.span = it->second;
            el.amp.noise_figure = db_to_linear(nf_db);
            el.amp.reference_bandwidth = bref;
            if (gain == "auto") {
                el.amp.gain = el.span.loss_linear();
            } else {
                double g = 0;
                const char* b = gain.data();
                auto [p, ec] = std::from_chars(b, b + gain.size(), g);
                if (ec != std::errc() || p != b + gain.size())
                    throw config_error(doc.name + ": gain_db must be a number or 'auto'");
                el.amp.gain = db_to_linear(g);
            }
            cfg.route.elements.push_back(el);
            const double tspm = cfg.type_spm.count(n) ? cfg.type_spm[n] : 0.0;
            const double txpm = cfg.type_xpm.count(n) ? cfg.type_xpm[n] : 0.0;
            cfg.spm_inputs.push_back(route_spm ? spm_w : tspm);
            cfg.xpm_inputs.push_back(route_xpm ? xpm_w : txpm);
        }
        try {
            cfg.route.validate();
        } catch (const model_error& e) {
            throw config_error(doc.name + ": " + e.what());
        }
    }

    // [model]
    if (doc.has("model")) {
        cfg.model.mode = ledger_mode_from_string(doc.text("model", "mode", "equivalent"));
        cfg.model.tolerance = doc.number("model", "tolerance", 1e-3);
        cfg.model.cap = doc.integer("model", "cap", default_series_cap);
        const std::string cm = doc.text("model", "cinf_mode", "series_limit");
        if (cm == "series_limit") cfg.model.cinf_mode = CinfMode::series_limit;
        else if (cm == "at_n") cfg.model.cinf_mode = CinfMode::at_n;
        else throw config_error(doc.name + ": cinf_mode must be series_limit or at_n");
        cfg.model.cinf_n = doc.integer("model", "cinf_n", 20);
        doc.reject_unused("model", {"mode", "tolerance", "cap", "cinf_mode", "cinf_n"});
    }

    // [simulation]
    if (doc.has("simulation")) {
        cfg.has_simulation = true;
        cfg.sim.seed = static_cast<std::uint64_t>(doc.integer("simulation", "seed", 1));
        cfg.sim.n_symbols = doc.integer("simulation", "n_symbols", 1 << 15);
        cfg.sim.samples_per_symbol =
            static_cast<int>(doc.integer("simulation", "samples_per_symbol", 16));
        const std::string sm = doc.text("simulation", "step", "adaptive");
        if (sm == "adaptive") cfg.sim.step.mode = StepControl::Mode::adaptive;
        else if (sm == "fixed") cfg.sim.step.mode = StepControl::Mode::fixed;
        else throw config_error(doc.name + ": step must be adaptive or fixed");
        cfg.sim.step.max_phase = doc.number("simulation", "max_phase_rad", 1e-3);
        cfg.sim.step.dz = doc.number("simulation", "dz_m", 100.0);
        cfg.sim.edge_exclusion =
            static_cast<int>(doc.integer("simulation", "edge_exclusion", 32));
        cfg.seeds = static_cast<int>(doc.integer("simulation", "seeds", 1));
        if (cfg.seeds < 1) throw config_error(doc.name + ": seeds must be >= 1");
        doc.reject_unused("simulation", {"seed", "n_symbols", "samples_per_symbol", "step",
                                         "max_phase_rad", "dz_m", "edge_exclusion", "seeds"});
        cfg.sim.route = cfg.route;
        if (!cfg.route.elements.empty()) {
            try {
                cfg.sim.validate();
            } catch (const model_error& e) {
                throw config_error(doc.name + ": " + e.what());
            }
        }
    }

    // [output]
    if (doc.has("output")) {
        cfg.output_dir = doc.text("output", "directory", "out");
        const std::string fm = doc.text("output", "formats", "csv");
        cfg.emit_csv = fm.find("csv") != std::string::npos;
        cfg.emit_json = fm.find("json") != std::string::npos;
        if (!cfg.emit_csv && !cfg.emit_json)
            throw config_error(doc.name + ": formats must include csv and/or json");
        doc.reject_unused("output", {"directory", "formats"});
    }

    return cfg;
}

ScenarioConfig parse_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open scenario file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario_text(ss.str(), path);
}

}  // namespace spanledger
