#include "gcnet/common/problem.hpp"

#include "gcnet/common/error.hpp"

namespace gcnet {

std::string_view to_string(Problem p) {
  switch (p) {
    case Problem::Drone: return "drone";
    case Problem::Landing: return "landing";
    case Problem::Transfer: return "transfer";
  }
  return "unknown";
}

Problem parse_problem(std::string_view name) {
  if (name == "drone") return Problem::Drone;
  if (name == "landing") return Problem::Landing;
  if (name == "transfer") return Problem::Transfer;
  throw ConfigError("unknown problem '" + std::string(name) + "' (expected drone, landing or transfer)");
}

std::size_t state_dim(Problem p) {
  switch (p) {
    case Problem::Drone: return 16;
    case Problem::Landing: return 7;
    case Problem::Transfer: return 6;
  }
  return 0;
}

std::size_t control_dim(Problem p) {
  switch (p) {
    case Problem::Drone: return 4;
    case Problem::Landing: return 4;
    case Problem::Transfer: return 3;
  }
  return 0;
}

}  // namespace gcnet
