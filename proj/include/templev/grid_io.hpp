// Density-grid cache: flat little-endian binary file plus a JSON sidecar
// header {model_hash, t, x_range, n_points, tolerance}.
#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "templev/common.hpp"
#include "templev/density.hpp"

namespace templev {

namespace detail {

inline constexpr char kGridMagic[8] = {'T', 'L', 'E', 'V', 'G', 'R', 'D', '1'};

template <class T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
void read_pod(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

inline void write_vec(std::ofstream& out, const std::vector<double>& v) {
  const std::uint64_t n = v.size();
  write_pod(out, n);
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
}

inline std::vector<double> read_vec(std::ifstream& in) {
  std::uint64_t n = 0;
  read_pod(in, n);
  if (n > (1ULL << 28)) throw GridError("grid file: implausible array length");
  std::vector<double> v(n);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  return v;
}

}  // namespace detail

// Writes <path> (binary) and <path>.json (sidecar).
inline void save_grid(const DensityGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw GridError("save_grid: cannot open " + path);
  out.write(detail::kGridMagic, sizeof(detail::kGridMagic));
  detail::write_pod(out, grid.t);
  const std::uint8_t one_sided = grid.one_sided ? 1 : 0;
  detail::write_pod(out, one_sided);
  detail::write_pod(out, grid.tolerance_achieved);
  for (const TailModel* tm : {&grid.right_tail, &grid.left_tail}) {
    detail::write_pod(out, tm->anchor_x);
    detail::write_pod(out, tm->mass);
    detail::write_pod(out, tm->exponent);
    detail::write_pod(out, tm->rate);
  }
  detail::write_vec(out, grid.x);
  detail::write_vec(out, grid.pdf_values);
  detail::write_vec(out, grid.cdf_values);
  detail::write_vec(out, grid.cdf_slopes);
  if (!out) throw GridError("save_grid: write failed for " + path);

  nlohmann::json sidecar;
  sidecar["model_hash"] = grid.model_hash;
  sidecar["t"] = grid.t;
  sidecar["x_range"] = {grid.x.front(), grid.x.back()};
  sidecar["n_points"] = grid.x.size();
  sidecar["tolerance"] = grid.tolerance_achieved;
  std::ofstream side(path + ".json");
  side << sidecar.dump(2) << "\n";
}

inline DensityGrid load_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GridError("load_grid: cannot open " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (std::memcmp(magic, detail::kGridMagic, sizeof(magic)) != 0)
    throw GridError("load_grid: bad magic in " + path);
  DensityGrid grid;
  detail::read_pod(in, grid.t);
  std::uint8_t one_sided = 0;
  detail::read_pod(in, one_sided);
  grid.one_sided = one_sided != 0;
  detail::read_pod(in, grid.tolerance_achieved);
  for (TailModel* tm : {&grid.right_tail, &grid.left_tail}) {
    detail::read_pod(in, tm->anchor_x);
    detail::read_pod(in, tm->mass);
    detail::read_pod(in, tm->exponent);
    detail::read_pod(in, tm->rate);
  }
  grid.x = detail::read_vec(in);
  grid.pdf_values = detail::read_vec(in);
  grid.cdf_values = detail::read_vec(in);
  grid.cdf_slopes = detail::read_vec(in);
  if (!in) throw GridError("load_grid: truncated file " + path);

  std::ifstream side(path + ".json");
  if (side) {
    nlohmann::json sidecar;
    side >> sidecar;
    grid.model_hash = sidecar.value("model_hash", std::string{});
  }
  return grid;
}

}  // namespace templev
