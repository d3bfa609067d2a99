#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "gcnet/cli/config.hpp"
#include "gcnet/common/problem.hpp"

namespace gcnet::cli {

/// "paper" holds the published hyperparameters; "desk" is a reduced setting that runs on one CPU.
std::vector<std::string> profile_names();

/// Built-in defaults for a problem and profile as INI text. Throws ConfigError for an unknown profile.
std::string profile_ini(Problem problem, std::string_view profile);
Config::Sections profile_defaults(Problem problem, std::string_view profile);

}  // namespace gcnet::cli
