#pragma once

// Wave field checkpoints.
//
// Binary layout (little-endian):
//   8 bytes  magic "NLQGWF01"
//   u32      dim
//   u32      points
//   u32      particle_count
//   u32      reserved (0)
//   f64      length
//   f64[2*N] amplitudes, row-major over axes, real/imag interleaved
//
// CSV layout: one comment header line
//   # nlqg-wavefield dim=<d> points=<n> length=<L> particles=<p>
// then a column header `i,re,im` (rank 1) or `i,j,re,im` (rank 2) and one
// row per node in row-major order. Values use 17 significant digits, which
// round-trips IEEE doubles exactly.

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "nlqg/error.hpp"
#include "nlqg/field/wave_field.hpp"

namespace nlqg::io {

static_assert(std::endian::native == std::endian::little,
              "binary checkpoints assume a little-endian host");

inline constexpr char kFieldMagic[8] = {'N', 'L', 'Q', 'G', 'W', 'F', '0', '1'};

inline void write_field_binary(const WaveField& f, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  const std::uint32_t header[4] = {static_cast<std::uint32_t>(f.grid().dim),
                                   static_cast<std::uint32_t>(f.grid().points),
                                   static_cast<std::uint32_t>(f.particle_count()), 0u};
  const double length = f.grid().length;
  out.write(kFieldMagic, sizeof kFieldMagic);
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  out.write(reinterpret_cast<const char*>(&length), sizeof length);
  out.write(reinterpret_cast<const char*>(f.values().data()),
            static_cast<std::streamsize>(f.size() * sizeof(Complex)));
  if (!out) throw Error("write failed for " + path.string());
}

inline WaveField read_field_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  char magic[8];
  std::uint32_t header[4];
  double length = 0.0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(header), sizeof header);
  in.read(reinterpret_cast<char*>(&length), sizeof length);
  if (!in || std::memcmp(magic, kFieldMagic, sizeof magic) != 0)
    throw ValidationError(path.string() + " is not an nlqg wave field checkpoint");
  GridSpec grid{static_cast<int>(header[0]), header[1], length};
  WaveField f(grid, static_cast<int>(header[2]));
  in.read(reinterpret_cast<char*>(f.values().data()),
          static_cast<std::streamsize>(f.size() * sizeof(Complex)));
  if (!in) throw ValidationError(path.string() + ": truncated amplitude block");
  return f;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_field_csv(const WaveField& f, std::ostream& out) {
  out << "# nlqg-wavefield dim=" << f.grid().dim << " points=" << f.grid().points
      << " length=" << format_double(f.grid().length) << " particles=" << f.particle_count()
      << '\n';
  const std::size_t n = f.extent();
  if (f.rank() == 1) {
    out << "i,re,im\n";
    for (std::size_t i = 0; i < n; ++i)
      out << i << ',' << format_double(f[i].real()) << ',' << format_double(f[i].imag()) << '\n';
  } else {
    out << "i,j,re,im\n";
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        out << i << ',' << j << ',' << format_double(f(i, j).real()) << ','
            << format_double(f(i, j).imag()) << '\n';
  }
}

inline WaveField read_field_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# nlqg-wavefield", 0) != 0)
    throw ValidationError("missing nlqg-wavefield header line");
  int dim = 0, particles = 0;
  std::size_t points = 0;
  double length = 0.0;
  std::istringstream hdr(line.substr(16));
  std::string token;
  while (hdr >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = token.substr(0, eq), value = token.substr(eq + 1);
    if (key == "dim") dim = std::stoi(value);
    else if (key == "points") points = std::stoul(value);
    else if (key == "length") length = std::stod(value);
    else if (key == "particles") particles = std::stoi(value);
  }
  WaveField f(GridSpec{dim, points, length}, particles);
  std::getline(in, line);  // column header
  const int cols = f.rank() == 1 ? 3 : 4;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (!std::getline(in, line)) throw ValidationError("wave field CSV is truncated");
    std::istringstream row(line);
    std::string cell[4];
    for (int c = 0; c < cols; ++c) std::getline(row, cell[c], ',');
    f[k] = Complex{std::stod(cell[cols - 2]), std::stod(cell[cols - 1])};
  }
  return f;
}

}  // namespace nlqg::io
