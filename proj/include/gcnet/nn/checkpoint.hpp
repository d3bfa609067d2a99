#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "gcnet/nn/network.hpp"

namespace gcnet::nn {

inline constexpr char kCheckpointMagic[5] = {'G', 'C', 'N', 'E', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary layout, all little-endian:
///   "GCNET" | u32 version | u32 input_dim | u32 output_dim | u32 hidden_count |
///   u32 widths[hidden_count] | u8 hidden_kind | f64 omega0 | u8 heads[output_dim] |
///   per layer: f64 weights[fan_out*fan_in] (row-major), f64 biases[fan_out]
void write_checkpoint(std::ostream& out, const Network& net);
Network read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Network& net);
Network load_checkpoint(const std::filesystem::path& path);

/// Human-diffable dump: a header block with the spec, then one labelled block per tensor
/// with one row per line.
std::string export_text(const Network& net);

}  // namespace gcnet::nn
