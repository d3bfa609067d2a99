#include "gcnet/data/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <fmt/format.h>

namespace gcnet::data {

CsvRowError::CsvRowError(std::size_t line, const std::string& what)
    : IoError(fmt::format("line {}: {}", line, what)), line_(line) {}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_double(std::string_view field, std::size_t line, std::size_t column) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
  // from_chars for double is not available everywhere with GCC 11 in all modes; strtod is fine here.
  std::string copy(field);
  char* end = nullptr;
  const double v = std::strtod(copy.c_str(), &end);
  if (copy.empty() || end != copy.c_str() + copy.size())
    throw CsvRowError(line, fmt::format("column {}: '{}' is not a number", column + 1, copy));
  if (!std::isfinite(v)) throw CsvRowError(line, fmt::format("column {}: non-finite value", column + 1));
  return v;
}

}  // namespace

TrajectoryDataset read_csv(std::istream& in, Problem problem) {
  const std::size_t sd = state_dim(problem);
  const std::size_t cd = control_dim(problem);
  const std::size_t width = 3 + sd + cd;

  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  struct Row {
    std::uint64_t traj;
    double time;
    std::vector<double> state, control;
    double tf;
    std::size_t line;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    if (!have_header) {
      have_header = true;
      if (split_fields(line).size() != width)
        throw CsvRowError(line_no, fmt::format("header has {} columns, expected {} for problem '{}'",
                                               split_fields(line).size(), width, to_string(problem)));
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != width)
      throw CsvRowError(line_no, fmt::format("{} columns, expected {}", fields.size(), width));
    Row row;
    row.line = line_no;
    const double traj = parse_double(fields[0], line_no, 0);
    if (traj < 0.0 || traj != std::floor(traj)) throw CsvRowError(line_no, "trajectory index must be a non-negative integer");
    row.traj = static_cast<std::uint64_t>(traj);
    row.time = parse_double(fields[1], line_no, 1);
    for (std::size_t i = 0; i < sd; ++i) row.state.push_back(parse_double(fields[2 + i], line_no, 2 + i));
    for (std::size_t i = 0; i < cd; ++i) row.control.push_back(parse_double(fields[2 + sd + i], line_no, 2 + sd + i));
    row.tf = parse_double(fields[width - 1], line_no, width - 1);
    if (auto why = control_violation(problem, row.control); !why.empty()) throw CsvRowError(line_no, why);
    rows.push_back(std::move(row));
  }
  if (!have_header || rows.empty()) throw EmptyInputError("CSV input contains no samples");

  // Group contiguous rows by trajectory index.
  std::vector<std::pair<std::size_t, std::size_t>> groups;  // [begin, end)
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i == 0 || rows[i].traj != rows[i - 1].traj) groups.emplace_back(i, i + 1);
    else groups.back().second = i + 1;
  }
  const std::size_t samples = groups.front().second - groups.front().first;
  TrajectoryDataset ds = TrajectoryDataset::empty_for(problem, samples);
  for (const auto& [b, e] : groups) {
    if (e - b != samples)
      throw CsvRowError(rows[b].line, fmt::format("trajectory {} has {} samples, expected {}", rows[b].traj, e - b, samples));
    std::vector<double> times, states, controls;
    for (std::size_t i = b; i < e; ++i) {
      if (rows[i].tf != rows[b].tf) throw CsvRowError(rows[i].line, "t_f differs within one trajectory");
      times.push_back(rows[i].time);
      states.insert(states.end(), rows[i].state.begin(), rows[i].state.end());
      controls.insert(controls.end(), rows[i].control.begin(), rows[i].control.end());
    }
    ds.append_trajectory(rows[b].traj, times, states, controls, rows[b].tf);
  }
  return ds;
}

TrajectoryDataset read_csv(const std::filesystem::path& path, Problem problem) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open CSV " + path.string());
  return read_csv(in, problem);
}

void write_csv(std::ostream& out, const TrajectoryDataset& ds) {
  out << "trajectory,time";
  for (std::size_t i = 0; i < ds.state_dim; ++i) out << ",s" << i;
  for (std::size_t i = 0; i < ds.control_dim; ++i) out << ",u" << i;
  out << ",tf\n";
  for (std::size_t r = 0; r < ds.record_count(); ++r) {
    out << ds.trajectory_ids[r] << fmt::format(",{:.17g}", ds.times[r]);
    for (double v : ds.state(r)) out << fmt::format(",{:.17g}", v);
    for (double v : ds.control(r)) out << fmt::format(",{:.17g}", v);
    out << fmt::format(",{:.17g}\n", ds.final_times[r]);
  }
}

void write_csv(const std::filesystem::path& path, const TrajectoryDataset& ds) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_csv(out, ds);
}

}  // namespace gcnet::data
