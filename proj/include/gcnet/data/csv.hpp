#pragma once

#include <filesystem>
#include <iosfwd>

#include "gcnet/data/dataset.hpp"

// CSV exchange format, one sample per row with a header line:
//   trajectory,time,s0..s{n-1},u0..u{m-1},tf
// Rows of one trajectory must be contiguous and every trajectory must have the same
// number of rows. Used to ingest externally produced drone data.
namespace gcnet::data {

class EmptyInputError : public IoError {
 public:
  using IoError::IoError;
};

/// Parse/validation failure tied to a 1-based line number of the CSV file.
class CsvRowError : public IoError {
 public:
  CsvRowError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

TrajectoryDataset read_csv(std::istream& in, Problem problem);
TrajectoryDataset read_csv(const std::filesystem::path& path, Problem problem);

void write_csv(std::ostream& out, const TrajectoryDataset& ds);
void write_csv(const std::filesystem::path& path, const TrajectoryDataset& ds);

}  // namespace gcnet::data
