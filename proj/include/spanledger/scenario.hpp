#pragma once
#include <map>
#include <string>
#include <vector>

#include "spanledger/qot.hpp"
#include "spanledger/ssfm.hpp"
#include "spanledger/types.hpp"

// Declarative scenario documents: sectioned key = value text with strict
// (unknown keys rejected) parsing. Engineering units live in the key names;
// everything is converted to SI on ingestion.
namespace spanledger {

struct ScenarioConfig {
    ChannelConfig channel;

    std::map<std::string, FiberSpan> span_types;
    std::map<std::string, double> type_spm;  // optional per-type SPM input, W
    std::map<std::string, double> type_xpm;

    Route route;  // expanded; empty if the document has no [route]
    std::vector<double> spm_inputs;
    std::vector<double> xpm_inputs;

    ModelOptions model;

    SimConfig sim;  // sim.route mirrors route
    bool has_simulation = false;
    int seeds = 1;

    std::string output_dir = "out";
    bool emit_csv = true;
    bool emit_json = false;

    void require_route(const std::string& for_what) const {
        if (route.elements.empty())
            throw config_error("scenario: [route] with a spans list is required for " + for_what);
    }
};

ScenarioConfig parse_scenario_text(const std::string& text, const std::string& doc_name);
ScenarioConfig parse_scenario_file(const std::string& path);

}  // namespace spanledger
