#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace gcnet {

enum class Problem : std::uint8_t {
  Drone = 0,
  Landing = 1,
  Transfer = 2,
};

std::string_view to_string(Problem p);
Problem parse_problem(std::string_view name);

/// Network input width / state dimension per problem (16, 7, 6).
std::size_t state_dim(Problem p);
/// Control width per problem: 4 rotor commands, throttle + direction, direction.
std::size_t control_dim(Problem p);

}  // namespace gcnet
