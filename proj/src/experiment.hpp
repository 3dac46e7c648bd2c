#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "error.hpp"

namespace shum {

// A finished run: tabular or CSV text plus a status. Verification-style
// subcommands can fail while still producing their table; hard errors
// (bad config, numerical guards) throw instead.
struct RunOutcome {
    std::string output;
    errc status = errc::ok;
    std::string message;
};

const std::vector<std::string>& subcommand_names();

// Dispatch on the subcommand name; the config must already be finalized.
RunOutcome run_subcommand(const std::string& name, const ExperimentConfig& cfg);

} // namespace shum
