#pragma once

//---------------------------------------------------------------------------
// Binary run snapshots with a bit-exact round trip.
//
// Layout (all integers and floats little-endian):
//   bytes 0..3    magic "OBKM"
//   bytes 4..7    format version, uint32 (currently 1)
//   bytes 8..11   grid resolution n, uint32
//   bytes 12..51  five float64 values: box length, time, nu_s, nu_p, lambda
//   bytes 52..    payload: six arrays of n^3 float64, stress components in
//                 the order 11, 22, 33, 12, 13, 23, each row-major with x
//                 fastest (the in-memory component layout, dumped directly)
//
// Reading validates magic, version and exact payload length; a short or
// oversized file is rejected without returning partial state.  lambda may
// be +infinity (the elastic limit) — IEEE bit patterns pass through.
//---------------------------------------------------------------------------

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "obkm/field.hpp"
#include "obkm/grid.hpp"

namespace obkm {

inline constexpr std::uint32_t checkpoint_version = 1;
inline constexpr char checkpoint_magic[4] = {'O', 'B', 'K', 'M'};

struct Checkpoint {
  double t = 0.0;
  double nu_s = 0.0;
  double nu_p = 0.0;
  double lambda = 0.0;
  SymTensorField sigma;

  Checkpoint() : sigma(Grid::make(8)) {}
  explicit Checkpoint(SymTensorField s) : sigma(std::move(s)) {}
};

namespace detail {

inline void put_u32_le(std::ostream& os, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                              static_cast<unsigned char>((v >> 8) & 0xff),
                              static_cast<unsigned char>((v >> 16) & 0xff),
                              static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32_le(const unsigned char* b) {
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline void put_f64_le(std::ostream& os, double d) {
  const std::uint64_t v = std::bit_cast<std::uint64_t>(d);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline double get_f64_le(const unsigned char* b) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

// bulk little-endian double output; direct dump on little-endian hosts
inline void put_f64_block_le(std::ostream& os, const double* vals, std::size_t count) {
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(vals), static_cast<std::streamsize>(count * 8));
  } else {
    for (std::size_t i = 0; i < count; ++i) put_f64_le(os, vals[i]);
  }
}

inline void get_f64_block_le(const unsigned char* bytes, double* vals, std::size_t count) {
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(vals, bytes, count * 8);
  } else {
    for (std::size_t i = 0; i < count; ++i) vals[i] = get_f64_le(bytes + 8 * i);
  }
}

}  // namespace detail

inline void write_checkpoint(std::ostream& os, const Checkpoint& ck) {
  const Grid& g = ck.sigma.grid();
  os.write(checkpoint_magic, 4);
  detail::put_u32_le(os, checkpoint_version);
  detail::put_u32_le(os, static_cast<std::uint32_t>(g.n()));
  detail::put_f64_le(os, g.length());
  detail::put_f64_le(os, ck.t);
  detail::put_f64_le(os, ck.nu_s);
  detail::put_f64_le(os, ck.nu_p);
  detail::put_f64_le(os, ck.lambda);
  for (int c = 0; c < 6; ++c) {
    auto comp = ck.sigma.comp(c);
    detail::put_f64_block_le(os, comp.data(), comp.size());
  }
  if (!os) throw std::runtime_error("checkpoint: write failed");
}

inline Checkpoint read_checkpoint(std::istream& is) {
  constexpr std::size_t header_bytes = 4 + 4 + 4 + 5 * 8;
  std::array<unsigned char, header_bytes> head{};
  is.read(reinterpret_cast<char*>(head.data()), header_bytes);
  if (static_cast<std::size_t>(is.gcount()) != header_bytes)
    throw std::runtime_error("checkpoint: truncated header (expected " +
                             std::to_string(header_bytes) + " bytes, got " +
                             std::to_string(is.gcount()) + ")");
  if (std::memcmp(head.data(), checkpoint_magic, 4) != 0)
    throw std::runtime_error("checkpoint: bad magic (not a checkpoint file)");
  const std::uint32_t version = detail::get_u32_le(head.data() + 4);
  if (version != checkpoint_version)
    throw std::runtime_error("checkpoint: unsupported format version " + std::to_string(version) +
                             " (expected " + std::to_string(checkpoint_version) + ")");
  const std::uint32_t n = detail::get_u32_le(head.data() + 8);
  if (n < 4 || n > 4096 || (n % 2) != 0)
    throw std::runtime_error("checkpoint: implausible resolution " + std::to_string(n));
  const double length = detail::get_f64_le(head.data() + 12);
  if (!(length > 0.0)) throw std::runtime_error("checkpoint: nonpositive box length");

  Checkpoint ck{SymTensorField(Grid::make(static_cast<int>(n), length))};
  ck.t = detail::get_f64_le(head.data() + 20);
  ck.nu_s = detail::get_f64_le(head.data() + 28);
  ck.nu_p = detail::get_f64_le(head.data() + 36);
  ck.lambda = detail::get_f64_le(head.data() + 44);

  const std::size_t np = ck.sigma.grid().num_points();
  const std::size_t payload_bytes = 6 * np * 8;
  std::vector<unsigned char> payload(payload_bytes);
  is.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload_bytes));
  if (static_cast<std::size_t>(is.gcount()) != payload_bytes)
    throw std::runtime_error("checkpoint: truncated payload (expected " +
                             std::to_string(payload_bytes) + " bytes, got " +
                             std::to_string(is.gcount()) + ")");
  if (is.peek() != std::char_traits<char>::eof())
    throw std::runtime_error("checkpoint: trailing data after payload");

  for (int c = 0; c < 6; ++c) {
    auto comp = ck.sigma.comp(c);
    detail::get_f64_block_le(payload.data() + static_cast<std::size_t>(c) * np * 8, comp.data(),
                             np);
  }
  return ck;
}

inline void write_checkpoint(const Checkpoint& ck, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("checkpoint: cannot open for writing: " + path);
  write_checkpoint(os, ck);
  os.flush();
  if (!os) throw std::runtime_error("checkpoint: write failed: " + path);
}

inline Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open for reading: " + path);
  return read_checkpoint(is);
}

}  // namespace obkm
