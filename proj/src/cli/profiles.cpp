#include "gcnet/cli/profiles.hpp"

#include "gcnet/common/error.hpp"

namespace gcnet::cli {

namespace {

// Settings shared by every profile of a problem. Units are normalized (mu = 1).
constexpr const char* kTransferCommon = R"([transfer]
mu = 1
radius = 1
gamma = 0.1

[generate]
samples = 100
nominal = -0.6242202548207136, 1.3639461402385225, 0.05, 0.6215079001889743, 0.2844377856160826, 0
perturb_absolute = 0.05, 0.05, 0.05, 0.02, 0.02, 0.02
perturb_relative = 0, 0, 0, 0, 0, 0
steps = 3960
max_retries = 8
continuation_substeps = 4
hamiltonian_tolerance = 1e-9
max_refinements = 3
restarts = 64
newton_tolerance = 1e-10

[train]
activation = sine
omega0 = 30
loss = cosine
learning_rate = 5e-5
scheduler_factor = 0.9
scheduler_patience = 10
scheduler_threshold = 0
scheduler_monitor = training
weight_decay = 0
train_fraction = 0.8

[compare]
activations = sine, relu, softplus

[eval]
checkpoint = final
steps = 1000
feedback = continuous
update_rate = 0
)";

constexpr const char* kLandingCommon = R"([landing]
mu = 1
omega = 0.4
c1 = 2
isp = 10
g0 = 1
target = 1, 0, 0
target_velocity = 0, 0, 0

[generate]
samples = 100
nominal = 1.3, 0.2, 0.1, 0, 0, 0, 1
perturb_absolute = 0.1, 0.1, 0.1, 0.05, 0.05, 0.05, 0
perturb_relative = 0, 0, 0, 0, 0, 0, 0
steps = 990
homotopy = 1, 0.5, 0.2, 0.1, 0.05, 0.01, 0.005, 0.002, 0.001
max_retries = 8
continuation_substeps = 4
hamiltonian_tolerance = 1e-9
max_refinements = 3
restarts = 64
newton_tolerance = 1e-10

[train]
activation = sine
omega0 = 30
loss = throttle_direction
learning_rate = 5e-5
scheduler_factor = 0.9
scheduler_patience = 10
scheduler_threshold = 0
scheduler_monitor = training
weight_decay = 0
train_fraction = 0.8

[compare]
activations = sine, relu, softplus

[eval]
checkpoint = final
steps = 1000
feedback = continuous
update_rate = 0
)";

constexpr const char* kDroneCommon = R"([train]
activation = sine
omega0 = 30
loss = mse
hidden = 128, 128, 128
learning_rate = 5e-5
batch_size = 1024
scheduler_factor = 0.9
scheduler_patience = 10
scheduler_threshold = 0
scheduler_monitor = training
weight_decay = 0
train_fraction = 0.8

[compare]
activations = sine, relu, softplus

[eval]
checkpoint = final
steps = 1000
feedback = continuous
update_rate = 0
)";

constexpr const char* kTransferPaper = R"(
[generate]
trajectories = 400000

[train]
hidden = 128, 128, 128
epochs = 300
batch_size = 4096

[eval]
cases = 500
)";

constexpr const char* kTransferDesk = R"(
[generate]
trajectories = 2000

[train]
hidden = 64, 64, 64
epochs = 100
batch_size = 256

[eval]
cases = 100
)";

constexpr const char* kLandingPaper = R"(
[generate]
trajectories = 300000

[train]
hidden = 128, 128, 128
epochs = 500
batch_size = 2048

[eval]
cases = 500
)";

constexpr const char* kLandingDesk = R"(
[generate]
trajectories = 2000

[train]
hidden = 64, 64, 64
epochs = 100
batch_size = 256

[eval]
cases = 100
)";

constexpr const char* kDronePaper = R"(
[train]
epochs = 50

[eval]
cases = 500
)";

constexpr const char* kDroneDesk = R"(
[train]
epochs = 10

[eval]
cases = 100
)";

}  // namespace

std::vector<std::string> profile_names() { return {"desk", "paper"}; }

Config::Sections profile_defaults(Problem problem, std::string_view profile) {
  const bool paper = profile == "paper";
  if (!paper && profile != "desk")
    throw ConfigError("unknown profile '" + std::string(profile) + "' (expected desk or paper)");
  const char* common = kDroneCommon;
  const char* specific = paper ? kDronePaper : kDroneDesk;
  if (problem == Problem::Transfer) {
    common = kTransferCommon;
    specific = paper ? kTransferPaper : kTransferDesk;
  } else if (problem == Problem::Landing) {
    common = kLandingCommon;
    specific = paper ? kLandingPaper : kLandingDesk;
  }
  Config::Sections merged = Config::parse_ini(common, "profile").sections();
  const Config overlay = Config::parse_ini(specific, "profile");
  for (const auto& [name, section] : overlay.sections())
    for (const auto& [key, value] : section) merged[name][key] = value;
  return merged;
}

std::string profile_ini(Problem problem, std::string_view profile) {
  const Config::Sections merged = profile_defaults(problem, profile);
  std::string out = "; profile " + std::string(profile) + " for " + std::string(to_string(problem)) + "\n";
  for (const auto& [name, section] : merged) {
    out += "\n[" + name + "]\n";
    for (const auto& [key, value] : section) out += key + " = " + value + "\n";
  }
  return out;
}

}  // namespace gcnet::cli
