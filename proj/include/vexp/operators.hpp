#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "vexp/grid.hpp"
#include "vexp/report.hpp"

namespace vexp {

/// K(y) = h(|y|) Omega(y/|y|) / |y|^n, truncated to eps < |y| < rmax.
struct RoughKernel {
  /// Omega on the unit sphere; the argument has unit length in the first dim components.
  std::function<double(const Point&)> omega;
  std::function<double(double)> radial;
  /// Integrability index r of Omega on the sphere.
  double r_exponent = 2.0;
  double eps = 0.0;
  double rmax = 0.0;
};

/// Fills in eps = h and rmax = L/4 when they are zero and validates
/// h <= eps < rmax <= L/4 and r > 1. Throws InvariantError unless Omega
/// has mean zero on the sphere to 1e-10.
RoughKernel make_rough_kernel(const Grid& grid, std::function<double(const Point&)> omega,
                              std::function<double(double)> radial, double r_exponent, double eps = 0.0,
                              double rmax = 0.0);

/// Average of Omega over the unit sphere: 4096 equally spaced angles in 2-D,
/// Gauss-Legendre in cos(theta) times 256 equally spaced azimuths in 3-D.
double sphere_average(int dim, const std::function<double(const Point&)>& omega);

/// sup over dyadic R in [eps, rmax/2] of (1/R) int_R^{2R} |h(t)|^r dt (Simpson's rule).
double dini_constant(const RoughKernel& kernel);

enum class ConvolutionMethod { Automatic, Direct, Fft };

/// Truncated lattice sum  sum_{eps < |y| < rmax} K(y) f(x - y) h^n  over grid
/// offsets y, with zero outside the box. Requires a Box grid (dim 1 to 3);
/// meaningful for f supported in the central half. The FFT path zero-pads
/// to a linear convolution and agrees with the direct sum to rounding.
GridFunction rough_singular_apply(const GridFunction& f, const RoughKernel& kernel,
                                  ConvolutionMethod method = ConvolutionMethod::Automatic);

/// Principal-value convergence: the truncation at eps against 2 eps.
struct TruncationReport {
  GridFunction at_eps;
  GridFunction at_2eps;
  /// ||at_eps - at_2eps||_2 / ||at_eps||_2.
  double relative_change = 0.0;
};

TruncationReport rough_singular_convergence(const GridFunction& f, const RoughKernel& kernel);

/// Summary of a kernel: sphere mean of Omega and the Dini-type constant.
CheckReport rough_kernel_check(const Grid& grid, const RoughKernel& kernel);

/// theta(s) = smooth_step((s - 1/2) / (1/2)): 0 for s <= 1/2, 1 for s >= 1.
double frequency_cutoff(double s) noexcept;

/// Multiplies the centred spectrum of f by m(xi) and transforms back. Requires a Torus grid.
ComplexGridFunction apply_multiplier(const ComplexGridFunction& f,
                                     const std::function<std::complex<double>(const Point&, double)>& m);

/// theta(|xi|) e^{i |xi|^b} |xi|^{-a}. Requires 0 < b < 1 and 0 < a < n b / 2.
ComplexGridFunction strongly_singular_apply(const ComplexGridFunction& f, double b, double a);
ComplexGridFunction strongly_singular_apply(const GridFunction& f, double b, double a);

/// (1 - |xi|^2 / r^2)_+^beta. Requires beta > 0 and r > 0.
ComplexGridFunction bochner_riesz_apply(const ComplexGridFunction& f, double beta, double r);
ComplexGridFunction bochner_riesz_apply(const GridFunction& f, double beta, double r);

/// max over r of |T_beta^r f|: one forward transform, one inverse per radius.
GridFunction bochner_riesz_maximal(const ComplexGridFunction& f, double beta, const std::vector<double>& r_grid);
GridFunction bochner_riesz_maximal(const GridFunction& f, double beta, const std::vector<double>& r_grid);

/// Geometric radii with ratio 2^{1/8} from 1/L up to the largest sampled
/// frequency modulus sqrt(n) / (2h).
std::vector<double> default_r_grid(const Grid& grid);

}  // namespace vexp
