#include "vexp/grid.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <fmt/format.h>
#include <fmt/os.h>

#include "vexp/fft.hpp"
#include "vexp/simd.hpp"

namespace vexp {

std::string_view to_string(GridMode mode) { return mode == GridMode::Box ? "box" : "torus"; }

GridMode parse_grid_mode(std::string_view text) {
  if (text == "box" || text == "Box") return GridMode::Box;
  if (text == "torus" || text == "Torus") return GridMode::Torus;
  throw InputError(fmt::format("unknown grid mode '{}'", text));
}

Grid::Grid(int dim, double extent, int points_per_axis, GridMode mode, std::size_t max_points)
    : dim_(dim), extent_(extent), n_(points_per_axis), mode_(mode) {
  if (dim < 1 || dim > 3) throw InputError(fmt::format("grid dimension must be 1, 2 or 3 (got {})", dim));
  if (!(extent > 0.0) || !std::isfinite(extent)) throw InputError("grid extent must be positive and finite");
  if (points_per_axis < 2 || !std::has_single_bit(static_cast<unsigned>(points_per_axis))) {
    throw InputError(fmt::format("points per axis must be a power of two >= 2 (got {})", points_per_axis));
  }
  size_ = 1;
  for (int a = 0; a < dim; ++a) size_ *= static_cast<std::size_t>(points_per_axis);
  if (size_ > max_points) {
    throw InputError(fmt::format("grid of {} points exceeds the memory budget of {} points", size_, max_points));
  }
}

std::size_t Grid::stride(int axis) const noexcept {
  std::size_t s = 1;
  for (int a = dim_ - 1; a > axis; --a) s *= static_cast<std::size_t>(n_);
  return s;
}

std::size_t Grid::flatten(const Index& idx) const noexcept {
  std::size_t flat = 0;
  for (int a = 0; a < dim_; ++a) flat = flat * static_cast<std::size_t>(n_) + static_cast<std::size_t>(idx[a]);
  return flat;
}

Index Grid::unflatten(std::size_t flat) const noexcept {
  Index idx{0, 0, 0};
  for (int a = dim_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % static_cast<std::size_t>(n_));
    flat /= static_cast<std::size_t>(n_);
  }
  return idx;
}

Point Grid::point(std::size_t flat) const noexcept {
  const Index idx = unflatten(flat);
  Point p{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) p[a] = coordinate(idx[a]);
  return p;
}

double Grid::radius(std::size_t flat) const noexcept {
  const Point p = point(flat);
  return std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
}

Grid Grid::with_mode(GridMode mode) const {
  Grid g = *this;
  g.mode_ = mode;
  return g;
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw InputError("grid functions live on different grids");
}

double integrate(const GridFunction& f) { return simd::active().sum(f.values()) * f.grid().cell_volume(); }

namespace {

// Moves the zero frequency between index 0 and index N/2 along every axis.
// N is even, so the shift is its own inverse.
void swap_halves(std::span<std::complex<double>> data, const Grid& grid) {
  const int n = grid.points_per_axis();
  std::vector<std::complex<double>> tmp(data.begin(), data.end());
  for (std::size_t flat = 0; flat < data.size(); ++flat) {
    Index idx = grid.unflatten(flat);
    for (int a = 0; a < grid.dim(); ++a) idx[a] = (idx[a] + n / 2) % n;
    data[grid.flatten(idx)] = tmp[flat];
  }
}

std::vector<int> shape_of(const Grid& grid) { return std::vector<int>(grid.dim(), grid.points_per_axis()); }

void require_torus(const Grid& grid) {
  if (grid.mode() != GridMode::Torus) throw ModeError("the discrete Fourier transform requires a Torus grid");
}

}  // namespace

ComplexGridFunction dft(const ComplexGridFunction& f) {
  require_torus(f.grid());
  ComplexGridFunction out = f;
  const auto dims = shape_of(f.grid());
  fft_inplace(out.values(), dims, false);
  const double scale = 1.0 / std::sqrt(static_cast<double>(f.size()));
  for (auto& v : out.values()) v *= scale;
  swap_halves(out.values(), f.grid());
  return out;
}

ComplexGridFunction dft(const GridFunction& f) { return dft(to_complex(f)); }

ComplexGridFunction idft(const ComplexGridFunction& spectrum) {
  require_torus(spectrum.grid());
  ComplexGridFunction out = spectrum;
  swap_halves(out.values(), spectrum.grid());
  const auto dims = shape_of(spectrum.grid());
  fft_inplace(out.values(), dims, true);
  const double scale = 1.0 / std::sqrt(static_cast<double>(spectrum.size()));
  for (auto& v : out.values()) v *= scale;
  return out;
}

double frequency(const Grid& grid, int k) noexcept {
  return static_cast<double>(k - grid.points_per_axis() / 2) / grid.extent();
}

Point frequency_vector(const Grid& grid, std::size_t flat) noexcept {
  const Index idx = grid.unflatten(flat);
  Point xi{0.0, 0.0, 0.0};
  for (int a = 0; a < grid.dim(); ++a) xi[a] = frequency(grid, idx[a]);
  return xi;
}

double frequency_modulus(const Grid& grid, std::size_t flat) noexcept {
  const Point xi = frequency_vector(grid, flat);
  return std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
}

ComplexGridFunction to_complex(const GridFunction& f) {
  std::vector<std::complex<double>> v(f.values().begin(), f.values().end());
  return ComplexGridFunction(f.grid(), std::move(v));
}

GridFunction real_part(const ComplexGridFunction& f) {
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f[i].real();
  return GridFunction(f.grid(), std::move(v));
}

GridFunction modulus(const ComplexGridFunction& f) {
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::abs(f[i]);
  return GridFunction(f.grid(), std::move(v));
}

GridFunction abs(const GridFunction& f) {
  GridFunction out = f;
  for (auto& v : out.values()) v = std::fabs(v);
  return out;
}

GridFunction abs_pow(const GridFunction& f, double e) {
  GridFunction out = f;
  for (auto& v : out.values()) v = std::pow(std::fabs(v), e);
  return out;
}

GridFunction scaled(const GridFunction& f, double c) {
  GridFunction out = f;
  for (auto& v : out.values()) v *= c;
  return out;
}

GridFunction pointwise_max(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a.grid(), b.grid());
  GridFunction out = a;
  simd::active().max_inplace(out.values(), b.values());
  return out;
}

double sup_norm(const GridFunction& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::fabs(v));
  return m;
}

double min_value(const GridFunction& f) { return *std::min_element(f.values().begin(), f.values().end()); }

double max_value(const GridFunction& f) { return *std::max_element(f.values().begin(), f.values().end()); }

void append_binary(const GridFunction& f, std::vector<unsigned char>& out) {
  const std::size_t start = out.size();
  out.resize(start + f.size() * sizeof(double));
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto bits = std::bit_cast<std::uint64_t>(f[i]);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    std::memcpy(out.data() + start + i * sizeof(double), &bits, sizeof(bits));
  }
}

void write_binary(const GridFunction& f, const std::filesystem::path& path) {
  std::vector<unsigned char> bytes;
  append_binary(f, bytes);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(fmt::format("cannot open '{}' for writing", path.string()));
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

GridFunction read_binary(const Grid& grid, const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError(fmt::format("cannot open '{}'", path.string()));
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (bytes.size() != grid.size() * sizeof(double)) {
    throw InputError(fmt::format("'{}' holds {} bytes, expected {}", path.string(), bytes.size(),
                                 grid.size() * sizeof(double)));
  }
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, bytes.data() + i * sizeof(double), sizeof(bits));
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    values[i] = std::bit_cast<double>(bits);
  }
  return GridFunction(grid, std::move(values));
}

void write_csv(const GridFunction& f, const std::filesystem::path& path) {
  auto out = fmt::output_file(path.string());
  const Grid& g = f.grid();
  static constexpr const char* kAxes[] = {"x", "y", "z"};
  for (int a = 0; a < g.dim(); ++a) out.print("{},", kAxes[a]);
  out.print("value\n");
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Point p = g.point(i);
    for (int a = 0; a < g.dim(); ++a) out.print("{:.17g},", p[a]);
    out.print("{:.17g}\n", f[i]);
  }
}

}  // namespace vexp
