#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "meanvort/field.hpp"

namespace meanvort {

// Binary field snapshot, format MVF1:
//   magic "MVF1" | u32 n (LE) | f64 l | f64 t | u8 kind | payload
// kind 0: scalar, one n*n row-major f64 plane; kind 1: vector, two planes.

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline void put_f64(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline double get_f64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

inline void put_plane(std::ostream& os, const std::vector<double>& data) {
  for (double v : data) put_f64(os, v);
}

inline void get_plane(std::istream& is, std::vector<double>& data) {
  for (double& v : data) v = get_f64(is);
}

}  // namespace detail

inline void write_snapshot(const std::string& path, const ScalarField& f, double t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os.write("MVF1", 4);
  detail::put_u32(os, static_cast<std::uint32_t>(f.grid.n));
  detail::put_f64(os, f.grid.l);
  detail::put_f64(os, t);
  os.put(static_cast<char>(0));
  detail::put_plane(os, f.data);
  if (!os) throw IoError("short write to '" + path + "'");
}

inline void write_snapshot(const std::string& path, const VectorField& v, double t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os.write("MVF1", 4);
  detail::put_u32(os, static_cast<std::uint32_t>(v.grid.n));
  detail::put_f64(os, v.grid.l);
  detail::put_f64(os, t);
  os.put(static_cast<char>(1));
  detail::put_plane(os, v.u.data);
  detail::put_plane(os, v.w.data);
  if (!os) throw IoError("short write to '" + path + "'");
}

struct SnapshotHeader {
  int n = 0;
  double l = 0.0;
  double t = 0.0;
  int kind = 0;  // 0 scalar, 1 vector
};

inline SnapshotHeader read_snapshot_header(std::istream& is, const std::string& path) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "MVF1", 4) != 0)
    throw IoError("'" + path + "' is not an MVF1 snapshot");
  SnapshotHeader h;
  h.n = static_cast<int>(detail::get_u32(is));
  h.l = detail::get_f64(is);
  h.t = detail::get_f64(is);
  h.kind = is.get();
  if (!is) throw IoError("truncated snapshot header in '" + path + "'");
  return h;
}

inline std::pair<ScalarField, double> read_scalar_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  SnapshotHeader h = read_snapshot_header(is, path);
  if (h.kind != 0) throw IoError("'" + path + "' holds a vector field, expected scalar");
  ScalarField f(Grid2D(h.n, h.l));
  detail::get_plane(is, f.data);
  if (!is) throw IoError("truncated snapshot payload in '" + path + "'");
  return {std::move(f), h.t};
}

inline std::pair<VectorField, double> read_vector_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  SnapshotHeader h = read_snapshot_header(is, path);
  if (h.kind != 1) throw IoError("'" + path + "' holds a scalar field, expected vector");
  VectorField v(Grid2D(h.n, h.l));
  detail::get_plane(is, v.u.data);
  detail::get_plane(is, v.w.data);
  if (!is) throw IoError("truncated snapshot payload in '" + path + "'");
  return {std::move(v), h.t};
}

}  // namespace meanvort
