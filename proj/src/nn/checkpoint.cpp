#include "gcnet/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "gcnet/common/binary_io.hpp"
#include "gcnet/common/error.hpp"

namespace gcnet::nn {

void write_checkpoint(std::ostream& out, const Network& net) {
  const NetworkSpec& spec = net.spec();
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  io::write_le<std::uint32_t>(out, kCheckpointVersion);
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(spec.input_dim));
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(spec.output_dim));
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(spec.hidden_widths.size()));
  for (std::size_t w : spec.hidden_widths) io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(w));
  io::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(spec.hidden_activation.kind));
  io::write_le<double>(out, spec.hidden_activation.omega0);
  for (ActivationKind h : spec.output_heads) io::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(h));
  for (const Layer& l : net.layers()) {
    io::write_le_span(out, l.weights);
    io::write_le_span(out, l.biases);
  }
}

Network read_checkpoint(std::istream& in) {
  char magic[sizeof(kCheckpointMagic)];
  in.read(magic, sizeof(magic));
  if (in.gcount() != sizeof(magic) || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
    throw IoError("not a GCNET checkpoint (bad magic)");
  const auto version = io::read_le<std::uint32_t>(in, "version");
  if (version != kCheckpointVersion) throw IoError(fmt::format("unsupported checkpoint version {}", version));

  NetworkSpec spec;
  spec.input_dim = io::read_le<std::uint32_t>(in, "input_dim");
  spec.output_dim = io::read_le<std::uint32_t>(in, "output_dim");
  const auto hidden = io::read_le<std::uint32_t>(in, "hidden count");
  if (hidden > 1024) throw IoError("implausible hidden layer count in checkpoint");
  for (std::uint32_t i = 0; i < hidden; ++i) spec.hidden_widths.push_back(io::read_le<std::uint32_t>(in, "width"));
  const auto kind = io::read_le<std::uint8_t>(in, "activation");
  if (kind > static_cast<std::uint8_t>(ActivationKind::Linear)) throw IoError("bad activation id in checkpoint");
  spec.hidden_activation.kind = static_cast<ActivationKind>(kind);
  spec.hidden_activation.omega0 = io::read_le<double>(in, "omega0");
  for (std::size_t i = 0; i < spec.output_dim; ++i) {
    const auto h = io::read_le<std::uint8_t>(in, "head");
    if (h > static_cast<std::uint8_t>(ActivationKind::Linear)) throw IoError("bad head id in checkpoint");
    spec.output_heads.push_back(static_cast<ActivationKind>(h));
  }
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    throw IoError(std::string("invalid network spec in checkpoint: ") + e.what());
  }
  Network net(spec);
  for (Layer& l : net.layers()) {
    io::read_le_span(in, l.weights, "weights");
    io::read_le_span(in, l.biases, "biases");
  }
  return net;
}

void save_checkpoint(const std::filesystem::path& path, const Network& net) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_checkpoint(out, net);
  if (!out) throw IoError("write failed for " + path.string());
}

Network load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

std::string export_text(const Network& net) {
  const NetworkSpec& spec = net.spec();
  std::ostringstream os;
  os << "# GCNET text export v" << kCheckpointVersion << '\n';
  os << "input_dim " << spec.input_dim << '\n';
  os << "hidden_widths";
  for (std::size_t w : spec.hidden_widths) os << ' ' << w;
  os << '\n';
  os << "output_dim " << spec.output_dim << '\n';
  os << "hidden_activation " << to_string(spec.hidden_activation.kind) << '\n';
  os << fmt::format("omega0 {:.17g}\n", spec.hidden_activation.omega0);
  os << "output_heads";
  for (ActivationKind h : spec.output_heads) os << ' ' << to_string(h);
  os << '\n';
  const auto layers = net.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& l = layers[i];
    os << fmt::format("\n[layer {} weights {} x {}]\n", i, l.fan_out, l.fan_in);
    for (std::size_t o = 0; o < l.fan_out; ++o) {
      for (std::size_t k = 0; k < l.fan_in; ++k) os << (k ? " " : "") << fmt::format("{:.17g}", l.weight(o, k));
      os << '\n';
    }
    os << fmt::format("\n[layer {} biases {}]\n", i, l.fan_out);
    for (std::size_t o = 0; o < l.fan_out; ++o) os << (o ? " " : "") << fmt::format("{:.17g}", l.biases[o]);
    os << '\n';
  }
  return os.str();
}

}  // namespace gcnet::nn
