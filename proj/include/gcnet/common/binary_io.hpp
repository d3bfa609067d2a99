#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <type_traits>

#include "gcnet/common/error.hpp"

// Little-endian primitive read/write used by the checkpoint and dataset containers.
namespace gcnet::io {

template <class T>
constexpr T to_little(T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  if constexpr (std::endian::native == std::endian::little || sizeof(T) == 1) {
    return v;
  } else {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    std::memcpy(&v, bytes, sizeof(T));
    return v;
  }
}

template <class T>
void write_le(std::ostream& out, T value) {
  value = to_little(value);
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

inline void write_le_span(std::ostream& out, std::span<const double> values) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size_bytes()));
  } else {
    for (double v : values) write_le(out, v);
  }
}

/// Thrown when the stream ends before a complete field could be read.
class TruncatedError : public IoError {
 public:
  using IoError::IoError;
};

template <class T>
T read_le(std::istream& in, const char* what) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(T)))
    throw TruncatedError(std::string("truncated input while reading ") + what);
  return to_little(value);
}

inline void read_le_span(std::istream& in, std::span<double> values, const char* what) {
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
  if (in.gcount() != static_cast<std::streamsize>(values.size_bytes()))
    throw TruncatedError(std::string("truncated input while reading ") + what);
  if constexpr (std::endian::native != std::endian::little) {
    for (double& v : values) v = to_little(v);
  }
}

}  // namespace gcnet::io
