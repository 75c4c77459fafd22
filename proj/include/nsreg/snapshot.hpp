#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "nsreg/error.hpp"
#include "nsreg/field.hpp"

namespace nsreg {

// Binary layout, all little-endian:
//   "NSRG" | u32 version | u32 n | f64 time | f64[n^3] u1 | f64[n^3] u2 | f64[n^3] u3
inline constexpr std::array<char, 4> kSnapshotMagic{'N', 'S', 'R', 'G'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

struct Snapshot {
  double time = 0.0;
  VectorField velocity;
};

namespace detail {

inline void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<unsigned char>((v >> (8 * b)) & 0xffu));
}
inline void put_f64(std::vector<unsigned char>& out, double d) {
  const auto bits = std::bit_cast<std::uint64_t>(d);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>((bits >> (8 * b)) & 0xffu));
}
inline std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(p[b]) << (8 * b);
  return v;
}
inline double get_f64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  return std::bit_cast<double>(v);
}

}  // namespace detail

inline std::vector<unsigned char> encode_snapshot(double time, const VectorField& u) {
  const std::size_t points = u.grid().points();
  std::vector<unsigned char> out;
  out.reserve(4 + 4 + 4 + 8 + 3 * 8 * points);
  out.insert(out.end(), kSnapshotMagic.begin(), kSnapshotMagic.end());
  detail::put_u32(out, kSnapshotVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(u.grid().n()));
  detail::put_f64(out, time);
  for (int c = 0; c < 3; ++c) {
    for (double v : u[c].values()) detail::put_f64(out, v);
  }
  return out;
}

inline Snapshot decode_snapshot(const std::vector<unsigned char>& bytes) {
  constexpr std::size_t header = 4 + 4 + 4 + 8;
  if (bytes.size() < header || std::memcmp(bytes.data(), kSnapshotMagic.data(), 4) != 0) {
    throw IoError("snapshot: missing NSRG magic");
  }
  const std::uint32_t version = detail::get_u32(bytes.data() + 4);
  if (version != kSnapshotVersion) {
    throw IoError("snapshot: unsupported version " + std::to_string(version));
  }
  const std::uint32_t n = detail::get_u32(bytes.data() + 8);
  Grid grid = [n] {
    try {
      return Grid(n);
    } catch (const std::invalid_argument& e) {
      throw IoError(std::string("snapshot: ") + e.what());
    }
  }();
  const std::size_t points = grid.points();
  if (bytes.size() != header + 3 * 8 * points) {
    throw IoError("snapshot: size " + std::to_string(bytes.size()) + " does not match n = " + std::to_string(n));
  }
  Snapshot snap{detail::get_f64(bytes.data() + 12), VectorField(grid)};
  const unsigned char* p = bytes.data() + header;
  for (int c = 0; c < 3; ++c) {
    auto values = snap.velocity[c].values();
    for (std::size_t i = 0; i < points; ++i, p += 8) values[i] = detail::get_f64(p);
  }
  return snap;
}

inline void write_snapshot(const std::string& path, double time, const VectorField& u) {
  const auto bytes = encode_snapshot(time, u);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open snapshot for writing: " + path);
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError("failed writing snapshot: " + path);
}

inline Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open snapshot: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace nsreg
