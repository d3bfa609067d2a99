#include "gcnet/data/dataset.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include <fmt/format.h>

#include "gcnet/common/binary_io.hpp"

namespace gcnet::data {

TrajectoryDataset TrajectoryDataset::empty_for(Problem p, std::size_t samples, std::size_t aux_dim) {
  TrajectoryDataset ds;
  ds.problem = p;
  ds.state_dim = gcnet::state_dim(p);
  ds.control_dim = gcnet::control_dim(p);
  ds.samples_per_trajectory = samples;
  ds.aux_dim = aux_dim;
  return ds;
}

void TrajectoryDataset::append_trajectory(std::uint64_t id, std::span<const double> sample_times,
                                          std::span<const double> traj_states, std::span<const double> traj_controls,
                                          double tf, std::span<const double> traj_aux) {
  const std::size_t n = samples_per_trajectory;
  if (sample_times.size() != n || traj_states.size() != n * state_dim || traj_controls.size() != n * control_dim ||
      traj_aux.size() != aux_dim)
    throw ConfigError("append_trajectory: shape mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    trajectory_ids.push_back(id);
    final_times.push_back(tf);
  }
  times.insert(times.end(), sample_times.begin(), sample_times.end());
  states.insert(states.end(), traj_states.begin(), traj_states.end());
  controls.insert(controls.end(), traj_controls.begin(), traj_controls.end());
  aux.insert(aux.end(), traj_aux.begin(), traj_aux.end());
}

TrajectoryDataset TrajectoryDataset::select_trajectories(std::span<const std::size_t> slots) const {
  TrajectoryDataset out = empty_for(problem, samples_per_trajectory, aux_dim);
  out.state_dim = state_dim;
  out.control_dim = control_dim;
  const std::size_t n = samples_per_trajectory;
  for (std::size_t slot : slots) {
    if (slot >= trajectory_count()) throw ConfigError("select_trajectories: slot out of range");
    const std::size_t r0 = slot * n;
    out.append_trajectory(trajectory_ids[r0], std::span(times).subspan(r0, n),
                          std::span(states).subspan(r0 * state_dim, n * state_dim),
                          std::span(controls).subspan(r0 * control_dim, n * control_dim), final_times[r0],
                          aux_dim ? trajectory_aux(slot) : std::span<const double>{});
  }
  return out;
}

std::string control_violation(Problem p, std::span<const double> u) {
  constexpr double kUnitTol = 1e-9;
  auto unit_error = [](std::span<const double> d) {
    double n2 = 0.0;
    for (double x : d) n2 += x * x;
    return std::abs(std::sqrt(n2) - 1.0);
  };
  switch (p) {
    case Problem::Drone:
      for (std::size_t i = 0; i < u.size(); ++i)
        if (!(u[i] >= 0.0 && u[i] <= 1.0)) return fmt::format("control {} = {} outside [0, 1]", i, u[i]);
      return {};
    case Problem::Landing:
      if (!(u[0] >= 0.0 && u[0] <= 1.0)) return fmt::format("throttle {} outside [0, 1]", u[0]);
      if (unit_error(u.subspan(1)) > kUnitTol) return "thrust direction is not a unit vector";
      return {};
    case Problem::Transfer:
      if (unit_error(u) > kUnitTol) return "thrust direction is not a unit vector";
      return {};
  }
  return {};
}

void TrajectoryDataset::validate() const {
  const std::size_t n = record_count();
  if (state_dim != gcnet::state_dim(problem) || control_dim != gcnet::control_dim(problem))
    throw ConfigError(fmt::format("dataset dims {}x{} do not match problem {}", state_dim, control_dim,
                                  to_string(problem)));
  if (samples_per_trajectory == 0 || n % samples_per_trajectory != 0)
    throw ConfigError("record count is not a multiple of samples per trajectory");
  if (trajectory_ids.size() != n || final_times.size() != n || states.size() != n * state_dim ||
      controls.size() != n * control_dim || aux.size() != trajectory_count() * aux_dim)
    throw ConfigError("dataset arrays have inconsistent lengths");
  for (std::size_t r = 0; r < n; ++r) {
    bool finite = std::isfinite(times[r]) && std::isfinite(final_times[r]);
    for (double v : state(r)) finite = finite && std::isfinite(v);
    for (double v : control(r)) finite = finite && std::isfinite(v);
    if (!finite) throw ConfigError(fmt::format("record {} has non-finite values", r));
    if (auto why = control_violation(problem, control(r)); !why.empty())
      throw ConfigError(fmt::format("record {}: {}", r, why));
  }
  for (double v : aux)
    if (!std::isfinite(v)) throw ConfigError("non-finite auxiliary trajectory data");
}

void write_dataset(std::ostream& out, const TrajectoryDataset& ds) {
  out.write(kDatasetMagic, sizeof(kDatasetMagic));
  io::write_le<std::uint32_t>(out, kDatasetVersion);
  io::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(ds.problem));
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(ds.state_dim));
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(ds.control_dim));
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(ds.samples_per_trajectory));
  io::write_le<std::uint64_t>(out, ds.trajectory_count());
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(ds.aux_dim));
  for (std::size_t r = 0; r < ds.record_count(); ++r) {
    io::write_le<std::uint64_t>(out, ds.trajectory_ids[r]);
    io::write_le<double>(out, ds.times[r]);
    io::write_le_span(out, ds.state(r));
    io::write_le_span(out, ds.control(r));
    io::write_le<double>(out, ds.final_times[r]);
  }
  io::write_le_span(out, ds.aux);
}

TrajectoryDataset read_dataset(std::istream& in, std::optional<Problem> expected) {
  char magic[sizeof(kDatasetMagic)];
  in.read(magic, sizeof(magic));
  if (in.gcount() != sizeof(magic) || std::memcmp(magic, kDatasetMagic, sizeof(magic)) != 0)
    throw BadHeaderError("not a GCDT dataset (bad magic)");
  const auto version = io::read_le<std::uint32_t>(in, "version");
  if (version != kDatasetVersion) throw BadHeaderError(fmt::format("unsupported dataset version {}", version));
  const auto problem_id = io::read_le<std::uint8_t>(in, "problem id");
  if (problem_id > static_cast<std::uint8_t>(Problem::Transfer))
    throw BadHeaderError(fmt::format("unknown problem id {}", problem_id));
  const auto problem = static_cast<Problem>(problem_id);
  if (expected && *expected != problem)
    throw ProblemMismatchError(fmt::format("dataset holds problem '{}' but '{}' was requested", to_string(problem),
                                           to_string(*expected)));
  TrajectoryDataset ds;
  ds.problem = problem;
  ds.state_dim = io::read_le<std::uint32_t>(in, "state_dim");
  ds.control_dim = io::read_le<std::uint32_t>(in, "control_dim");
  if (ds.state_dim != state_dim(problem) || ds.control_dim != control_dim(problem))
    throw DimensionMismatchError(fmt::format("dims {}x{} do not match problem '{}' ({}x{})", ds.state_dim,
                                             ds.control_dim, to_string(problem), state_dim(problem),
                                             control_dim(problem)));
  ds.samples_per_trajectory = io::read_le<std::uint32_t>(in, "samples per trajectory");
  const auto trajectories = io::read_le<std::uint64_t>(in, "trajectory count");
  ds.aux_dim = io::read_le<std::uint32_t>(in, "aux_dim");
  if (ds.samples_per_trajectory == 0 && trajectories != 0) throw BadHeaderError("zero samples per trajectory");
  if (ds.aux_dim > 64) throw BadHeaderError("implausible aux_dim");
  const std::uint64_t records = trajectories * ds.samples_per_trajectory;
  if (trajectories > (1ULL << 32) || records > (1ULL << 36)) throw BadHeaderError("implausible record count");

  ds.trajectory_ids.resize(records);
  ds.times.resize(records);
  ds.states.resize(records * ds.state_dim);
  ds.controls.resize(records * ds.control_dim);
  ds.final_times.resize(records);
  for (std::size_t r = 0; r < records; ++r) {
    ds.trajectory_ids[r] = io::read_le<std::uint64_t>(in, "record");
    ds.times[r] = io::read_le<double>(in, "record");
    io::read_le_span(in, std::span(ds.states).subspan(r * ds.state_dim, ds.state_dim), "record");
    io::read_le_span(in, std::span(ds.controls).subspan(r * ds.control_dim, ds.control_dim), "record");
    ds.final_times[r] = io::read_le<double>(in, "record");
  }
  ds.aux.resize(trajectories * ds.aux_dim);
  io::read_le_span(in, ds.aux, "auxiliary block");
  return ds;
}

void write_dataset(const std::filesystem::path& path, const TrajectoryDataset& ds) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_dataset(out, ds);
  if (!out) throw IoError("write failed for " + path.string());
}

TrajectoryDataset read_dataset(const std::filesystem::path& path, std::optional<Problem> expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset " + path.string());
  return read_dataset(in, expected);
}

}  // namespace gcnet::data
