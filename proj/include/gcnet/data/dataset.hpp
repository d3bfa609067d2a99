#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "gcnet/common/binary_io.hpp"
#include "gcnet/common/error.hpp"
#include "gcnet/common/problem.hpp"

namespace gcnet::data {

inline constexpr char kDatasetMagic[4] = {'G', 'C', 'D', 'T'};
inline constexpr std::uint32_t kDatasetVersion = 1;

/// Bundle of optimal trajectories stored as flat (state, control) samples.
///
/// Records are trajectory-major: all samples of trajectory 0 first. Every trajectory has
/// the same number of samples. `aux` optionally carries `aux_dim` values per trajectory
/// (for generated bundles: the converged shooting unknowns, the homotopy parameter and
/// the RK4 step count used for the trajectory), which lets evaluation replay the exact
/// extremal.
struct TrajectoryDataset {
  Problem problem = Problem::Transfer;
  std::size_t state_dim = 0;
  std::size_t control_dim = 0;
  std::size_t samples_per_trajectory = 0;
  std::size_t aux_dim = 0;

  std::vector<std::uint64_t> trajectory_ids;  // per record
  std::vector<double> times;                  // per record
  std::vector<double> states;                 // record_count x state_dim
  std::vector<double> controls;               // record_count x control_dim
  std::vector<double> final_times;            // per record, t_f of the parent trajectory
  std::vector<double> aux;                    // trajectory_count x aux_dim

  static TrajectoryDataset empty_for(Problem p, std::size_t samples_per_trajectory, std::size_t aux_dim = 0);

  std::size_t record_count() const { return times.size(); }
  std::size_t trajectory_count() const {
    return samples_per_trajectory == 0 ? 0 : record_count() / samples_per_trajectory;
  }
  std::span<const double> state(std::size_t record) const { return {states.data() + record * state_dim, state_dim}; }
  std::span<const double> control(std::size_t record) const {
    return {controls.data() + record * control_dim, control_dim};
  }
  std::span<const double> trajectory_aux(std::size_t traj) const { return {aux.data() + traj * aux_dim, aux_dim}; }
  /// Index of the first record of trajectory slot `traj`.
  std::size_t first_record(std::size_t traj) const { return traj * samples_per_trajectory; }

  /// Appends one trajectory. `states`/`controls` are samples_per_trajectory rows each.
  void append_trajectory(std::uint64_t id, std::span<const double> sample_times, std::span<const double> traj_states,
                         std::span<const double> traj_controls, double tf, std::span<const double> traj_aux = {});

  /// Copies whole trajectories (by slot index) into a new dataset.
  TrajectoryDataset select_trajectories(std::span<const std::size_t> slots) const;

  /// Checks counts, finiteness and per-problem control constraints; throws ConfigError
  /// naming the first offending record.
  void validate() const;

  friend bool operator==(const TrajectoryDataset&, const TrajectoryDataset&) = default;
};

/// Checks one control vector against the problem's admissible set.
/// Returns an empty string when valid, otherwise a description.
std::string control_violation(Problem p, std::span<const double> control);

using TruncatedError = io::TruncatedError;

class BadHeaderError : public IoError {
 public:
  using IoError::IoError;
};
class DimensionMismatchError : public IoError {
 public:
  using IoError::IoError;
};
class ProblemMismatchError : public IoError {
 public:
  using IoError::IoError;
};

/// Binary layout, little-endian:
///   "GCDT" | u32 version | u8 problem | u32 state_dim | u32 control_dim |
///   u32 samples_per_trajectory | u64 trajectory_count | u32 aux_dim |
///   records: u64 trajectory_id, f64 time, f64 state[state_dim], f64 control[control_dim], f64 t_f |
///   aux: f64[trajectory_count * aux_dim]
void write_dataset(std::ostream& out, const TrajectoryDataset& ds);
TrajectoryDataset read_dataset(std::istream& in, std::optional<Problem> expected = std::nullopt);

void write_dataset(const std::filesystem::path& path, const TrajectoryDataset& ds);
TrajectoryDataset read_dataset(const std::filesystem::path& path, std::optional<Problem> expected = std::nullopt);

}  // namespace gcnet::data
