#pragma once
#include <stdexcept>
#include <string>

namespace spanledger {

// configuration / input-document problems (CLI exit 2)
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// model/domain problems: bad parameter domains, unsupported mode combinations,
// convergence budget exhausted (CLI exit 3)
struct model_error : std::runtime_error {
    explicit model_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct convergence_error : model_error {
    explicit convergence_error(const std::string& msg) : model_error(msg) {}
};

struct mode_error : model_error {
    explicit mode_error(const std::string& msg) : model_error(msg) {}
};

// simulation left the perturbative regime; a warning unless --strict (CLI exit 4)
struct nonperturbative_error : std::runtime_error {
    explicit nonperturbative_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace spanledger
