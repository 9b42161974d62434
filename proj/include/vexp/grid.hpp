#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vexp/errors.hpp"

namespace vexp {

/// Box: cubes are clipped at the boundary and reads outside the box are zero.
/// Torus: periodic; required by the Fourier operators.
enum class GridMode { Box, Torus };

std::string_view to_string(GridMode mode);
GridMode parse_grid_mode(std::string_view text);

using Point = std::array<double, 3>;
using Index = std::array<int, 3>;

/// Uniform cell-centred grid on [-L/2, L/2)^dim with N points per axis.
///
/// Sample i along an axis sits at -L/2 + (i + 1/2) h, h = L / N, so the
/// grid is symmetric about the origin and no sample lies on it. Storage is
/// row-major with the last axis contiguous.
class Grid {
 public:
  static constexpr std::size_t kDefaultMaxPoints = std::size_t{1} << 26;

  Grid() = default;
  Grid(int dim, double extent, int points_per_axis, GridMode mode = GridMode::Box,
       std::size_t max_points = kDefaultMaxPoints);

  int dim() const noexcept { return dim_; }
  double extent() const noexcept { return extent_; }
  int points_per_axis() const noexcept { return n_; }
  GridMode mode() const noexcept { return mode_; }
  double spacing() const noexcept { return extent_ / n_; }
  double cell_volume() const noexcept { return std::pow(spacing(), dim_); }
  double measure() const noexcept { return std::pow(extent_, dim_); }
  std::size_t size() const noexcept { return size_; }

  double coordinate(int i) const noexcept { return -0.5 * extent_ + (i + 0.5) * spacing(); }

  std::size_t stride(int axis) const noexcept;
  std::size_t flatten(const Index& idx) const noexcept;
  Index unflatten(std::size_t flat) const noexcept;
  /// Coordinates of sample `flat`; unused trailing components are zero.
  Point point(std::size_t flat) const noexcept;
  double radius(std::size_t flat) const noexcept;

  /// Same grid with a different mode.
  Grid with_mode(GridMode mode) const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int dim_ = 1;
  double extent_ = 1.0;
  int n_ = 1;
  GridMode mode_ = GridMode::Box;
  std::size_t size_ = 1;
};

/// Samples of a real or complex function on a Grid.
template <class T>
class BasicGridFunction {
 public:
  using value_type = T;

  BasicGridFunction() = default;
  explicit BasicGridFunction(const Grid& grid, T fill = T{}) : grid_(grid), values_(grid.size(), fill) {}
  BasicGridFunction(const Grid& grid, std::vector<T> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw InputError("grid function length does not match grid size");
    for (const T& v : values_) {
      if (!is_finite(v)) throw InputError("grid function samples must be finite");
    }
  }

  /// Samples `fn(Point)` at every grid point.
  template <class F>
  static BasicGridFunction sample(const Grid& grid, F&& fn) {
    std::vector<T> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<T>(fn(grid.point(i)));
    return BasicGridFunction(grid, std::move(v));
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const T> values() const noexcept { return values_; }
  std::span<T> values() noexcept { return values_; }
  const T& operator[](std::size_t i) const noexcept { return values_[i]; }
  T& operator[](std::size_t i) noexcept { return values_[i]; }

 private:
  static bool is_finite(double v) { return std::isfinite(v); }
  static bool is_finite(const std::complex<double>& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

  Grid grid_;
  std::vector<T> values_;
};

using GridFunction = BasicGridFunction<double>;
using ComplexGridFunction = BasicGridFunction<std::complex<double>>;

void require_same_grid(const Grid& a, const Grid& b);

/// Midpoint rule: sum of samples times h^dim.
double integrate(const GridFunction& f);

/// Unitary DFT. Output index k along each axis holds frequency
/// (k - N/2) / L, i.e. the spectrum is stored centred, k in {-N/2, ..., N/2-1}.
/// Requires a Torus grid.
ComplexGridFunction dft(const ComplexGridFunction& f);
ComplexGridFunction dft(const GridFunction& f);
ComplexGridFunction idft(const ComplexGridFunction& spectrum);

/// Physical frequency (cycles per unit length) for centred spectral index k.
double frequency(const Grid& grid, int k) noexcept;
/// |xi| for the centred spectral sample `flat`.
double frequency_modulus(const Grid& grid, std::size_t flat) noexcept;
/// Frequency vector for the centred spectral sample `flat`.
Point frequency_vector(const Grid& grid, std::size_t flat) noexcept;

ComplexGridFunction to_complex(const GridFunction& f);
GridFunction real_part(const ComplexGridFunction& f);
GridFunction modulus(const ComplexGridFunction& f);
GridFunction abs(const GridFunction& f);
/// |f|^e pointwise.
GridFunction abs_pow(const GridFunction& f, double e);
GridFunction scaled(const GridFunction& f, double c);
GridFunction pointwise_max(const GridFunction& a, const GridFunction& b);
double sup_norm(const GridFunction& f);
double min_value(const GridFunction& f);
double max_value(const GridFunction& f);

// Flat binary: little-endian IEEE-754 doubles, row-major. CSV: one row per
// sample, coordinates then value.
void write_binary(const GridFunction& f, const std::filesystem::path& path);
void append_binary(const GridFunction& f, std::vector<unsigned char>& out);
GridFunction read_binary(const Grid& grid, const std::filesystem::path& path);
void write_csv(const GridFunction& f, const std::filesystem::path& path);

}  // namespace vexp
