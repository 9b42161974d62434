#include "vexp/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

#include "vexp/exponent.hpp"
#include "vexp/fft.hpp"
#include "vexp/parallel.hpp"

namespace vexp {

namespace {

constexpr double kMeanTolerance = 1e-10;
constexpr double kDirectCostLimit = 2e7;

double squared_l2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

}  // namespace

double sphere_average(int dim, const std::function<double(const Point&)>& omega) {
  if (dim == 1) return 0.5 * (omega({1.0, 0.0, 0.0}) + omega({-1.0, 0.0, 0.0}));
  if (dim == 2) {
    constexpr int kAngles = 4096;
    double s = 0.0;
    for (int i = 0; i < kAngles; ++i) {
      const double th = 2.0 * std::numbers::pi * i / kAngles;
      s += omega({std::cos(th), std::sin(th), 0.0});
    }
    return s / kAngles;
  }
  if (dim != 3) throw DomainError("sphere averages exist for dimension 1 to 3");
  constexpr int kAzimuths = 256;
  using Rule = boost::math::quadrature::gauss<double, 64>;
  double total = 0.0;
  for (int sign : {-1, 1}) {
    for (std::size_t j = 0; j < Rule::abscissa().size(); ++j) {
      const double z = sign * Rule::abscissa()[j];
      if (sign < 0 && z == 0.0) continue;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      double ring = 0.0;
      for (int i = 0; i < kAzimuths; ++i) {
        const double phi = 2.0 * std::numbers::pi * i / kAzimuths;
        ring += omega({rho * std::cos(phi), rho * std::sin(phi), z});
      }
      total += Rule::weights()[j] * ring / kAzimuths;
    }
  }
  // Gauss-Legendre weights integrate over [-1, 1], total mass 2.
  return 0.5 * total;
}

RoughKernel make_rough_kernel(const Grid& grid, std::function<double(const Point&)> omega,
                              std::function<double(double)> radial, double r_exponent, double eps, double rmax) {
  if (!omega || !radial) throw InputError("rough kernel needs both Omega and the radial factor");
  RoughKernel k{std::move(omega), std::move(radial), r_exponent, eps, rmax};
  const double h = grid.spacing();
  if (k.eps == 0.0) k.eps = h;
  if (k.rmax == 0.0) k.rmax = 0.25 * grid.extent();
  if (!(r_exponent > 1.0)) throw DomainError(fmt::format("kernel index r must exceed 1 (got {})", r_exponent));
  if (!(k.eps >= h)) throw DomainError(fmt::format("truncation eps = {} is below the spacing {}", k.eps, h));
  if (!(k.rmax <= 0.25 * grid.extent() && k.eps < k.rmax)) {
    throw DomainError(fmt::format("need eps < rmax <= L/4 (eps = {}, rmax = {}, L/4 = {})", k.eps, k.rmax,
                                  0.25 * grid.extent()));
  }
  const double mean = sphere_average(grid.dim(), k.omega);
  if (!(std::fabs(mean) <= kMeanTolerance)) {
    throw InvariantError(fmt::format("Omega must have mean zero on the sphere (mean = {:.3e})", mean));
  }
  return k;
}

double dini_constant(const RoughKernel& kernel) {
  constexpr int kPanels = 256;
  double best = 0.0;
  for (double R = kernel.eps; 2.0 * R <= kernel.rmax * (1.0 + 1e-12); R *= 2.0) {
    const double step = R / kPanels;
    double s = 0.0;
    for (int i = 0; i <= kPanels; ++i) {
      const double w = (i == 0 || i == kPanels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      s += w * std::pow(std::fabs(kernel.radial(R + i * step)), kernel.r_exponent);
    }
    best = std::max(best, s * step / 3.0 / R);
  }
  return best;
}

namespace {

struct KernelTable {
  int m = 0;  // offsets -m .. m per axis
  int width = 1;
  std::vector<double> values;  // row-major over (2m+1)^dim, weighted by h^n
};

KernelTable tabulate(const Grid& grid, const RoughKernel& kernel, double eps) {
  const int dim = grid.dim();
  const double h = grid.spacing();
  KernelTable t;
  t.m = std::min(static_cast<int>(std::floor(kernel.rmax / h)), grid.points_per_axis() - 1);
  t.width = 2 * t.m + 1;
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= t.width;
  t.values.assign(total, 0.0);
  const double vol = grid.cell_volume();
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    Point y{0.0, 0.0, 0.0};
    for (int a = dim - 1; a >= 0; --a) {
      y[a] = (static_cast<int>(rest % t.width) - t.m) * h;
      rest /= t.width;
    }
    const double r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
    if (!(r > eps && r < kernel.rmax)) continue;
    const Point u{y[0] / r, y[1] / r, y[2] / r};
    t.values[flat] = kernel.radial(r) * kernel.omega(u) / std::pow(r, dim) * vol;
  }
  return t;
}

GridFunction convolve_direct(const GridFunction& f, const KernelTable& t) {
  const Grid& g = f.grid();
  const int dim = g.dim();
  const int n = g.points_per_axis();
  GridFunction out(g, 0.0);
  parallel_for(g.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Index x = g.unflatten(i);
      double acc = 0.0;
      for (std::size_t flat = 0; flat < t.values.size(); ++flat) {
        const double kv = t.values[flat];
        if (kv == 0.0) continue;
        std::size_t rest = flat;
        Index src{0, 0, 0};
        bool inside = true;
        for (int a = dim - 1; a >= 0; --a) {
          const int off = static_cast<int>(rest % t.width) - t.m;
          rest /= t.width;
          const int j = x[a] - off;
          if (j < 0 || j >= n) {
            inside = false;
            break;
          }
          src[a] = j;
        }
        if (inside) acc += kv * f[g.flatten(src)];
      }
      out[i] = acc;
    }
  });
  return out;
}

GridFunction convolve_fft(const GridFunction& f, const KernelTable& t) {
  const Grid& g = f.grid();
  const int dim = g.dim();
  const int n = g.points_per_axis();
  int padded = 1;
  while (padded < n + t.width - 1) padded *= 2;
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= padded;
  std::vector<int> dims(dim, padded);

  auto place = [&](std::vector<std::complex<double>>& buf, const Index& idx, double v) {
    std::size_t flat = 0;
    for (int a = 0; a < dim; ++a) flat = flat * padded + idx[a];
    buf[flat] = v;
  };
  std::vector<std::complex<double>> fb(total), kb(total);
  for (std::size_t i = 0; i < g.size(); ++i) place(fb, g.unflatten(i), f[i]);
  for (std::size_t flat = 0; flat < t.values.size(); ++flat) {
    std::size_t rest = flat;
    Index idx{0, 0, 0};
    for (int a = dim - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rest % t.width);
      rest /= t.width;
    }
    place(kb, idx, t.values[flat]);
  }
  fft_inplace(fb, dims, false);
  fft_inplace(kb, dims, false);
  for (std::size_t i = 0; i < total; ++i) fb[i] *= kb[i];
  fft_inplace(fb, dims, true);
  const double scale = 1.0 / static_cast<double>(total);
  // Output x sits at padded index x + m.
  GridFunction out(g, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Index x = g.unflatten(i);
    std::size_t flat = 0;
    for (int a = 0; a < dim; ++a) flat = flat * padded + (x[a] + t.m);
    out[i] = fb[flat].real() * scale;
  }
  return out;
}

GridFunction rough_apply_at(const GridFunction& f, const RoughKernel& kernel, double eps, ConvolutionMethod method) {
  if (f.grid().mode() != GridMode::Box) throw ModeError("rough singular integrals need a Box grid");
  const KernelTable t = tabulate(f.grid(), kernel, eps);
  if (method == ConvolutionMethod::Automatic) {
    std::size_t nonzero = 0;
    for (double v : t.values) nonzero += v != 0.0;
    const double cost = static_cast<double>(nonzero) * static_cast<double>(f.size());
    method = cost <= kDirectCostLimit ? ConvolutionMethod::Direct : ConvolutionMethod::Fft;
  }
  return method == ConvolutionMethod::Direct ? convolve_direct(f, t) : convolve_fft(f, t);
}

}  // namespace

GridFunction rough_singular_apply(const GridFunction& f, const RoughKernel& kernel, ConvolutionMethod method) {
  return rough_apply_at(f, kernel, kernel.eps, method);
}

TruncationReport rough_singular_convergence(const GridFunction& f, const RoughKernel& kernel) {
  if (!(2.0 * kernel.eps < kernel.rmax)) throw DomainError("2 eps must stay below rmax");
  TruncationReport rep{rough_apply_at(f, kernel, kernel.eps, ConvolutionMethod::Automatic),
                       rough_apply_at(f, kernel, 2.0 * kernel.eps, ConvolutionMethod::Automatic), 0.0};
  double diff = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) diff += std::pow(rep.at_eps[i] - rep.at_2eps[i], 2);
  const double base = squared_l2(rep.at_eps.values());
  rep.relative_change = base > 0.0 ? std::sqrt(diff / base) : std::sqrt(diff);
  return rep;
}

CheckReport rough_kernel_check(const Grid& grid, const RoughKernel& kernel) {
  CheckReport rep{.id = "rough_kernel", .verdict = Verdict::Pass, .witness = {}, .notes = {}};
  const double mean = sphere_average(grid.dim(), kernel.omega);
  rep.add("omega_mean", mean).add("dini_constant", dini_constant(kernel));
  rep.add("r", kernel.r_exponent).add("eps", kernel.eps).add("rmax", kernel.rmax);
  if (!(std::fabs(mean) <= kMeanTolerance)) {
    rep.verdict = Verdict::Fail;
    rep.note("Omega does not have mean zero");
  }
  return rep;
}

double frequency_cutoff(double s) noexcept { return smooth_step((s - 0.5) / 0.5); }

ComplexGridFunction apply_multiplier(const ComplexGridFunction& f,
                                     const std::function<std::complex<double>(const Point&, double)>& m) {
  ComplexGridFunction spec = dft(f);
  const Grid& g = f.grid();
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const Point xi = frequency_vector(g, i);
    spec[i] *= m(xi, frequency_modulus(g, i));
  }
  return idft(spec);
}

ComplexGridFunction strongly_singular_apply(const ComplexGridFunction& f, double b, double a) {
  const int n = f.grid().dim();
  if (!(b > 0.0 && b < 1.0)) throw DomainError(fmt::format("need 0 < b < 1 (got b = {})", b));
  if (!(a > 0.0 && a < n * b / 2.0)) {
    throw DomainError(fmt::format("need 0 < a < n b / 2 = {} (got a = {})", n * b / 2.0, a));
  }
  return apply_multiplier(f, [&](const Point&, double s) -> std::complex<double> {
    const double theta = frequency_cutoff(s);
    if (theta == 0.0) return 0.0;
    return theta * std::polar(std::pow(s, -a), std::pow(s, b));
  });
}

ComplexGridFunction strongly_singular_apply(const GridFunction& f, double b, double a) {
  return strongly_singular_apply(to_complex(f), b, a);
}

namespace {

void require_bochner(double beta) {
  if (!(beta > 0.0)) throw DomainError(fmt::format("Bochner-Riesz order must be positive (got {})", beta));
}

double bochner_factor(double s, double beta, double r) {
  const double t = 1.0 - (s * s) / (r * r);
  return t > 0.0 ? std::pow(t, beta) : 0.0;
}

}  // namespace

ComplexGridFunction bochner_riesz_apply(const ComplexGridFunction& f, double beta, double r) {
  require_bochner(beta);
  if (!(r > 0.0)) throw DomainError(fmt::format("Bochner-Riesz radius must be positive (got {})", r));
  return apply_multiplier(f, [&](const Point&, double s) -> std::complex<double> { return bochner_factor(s, beta, r); });
}

ComplexGridFunction bochner_riesz_apply(const GridFunction& f, double beta, double r) {
  return bochner_riesz_apply(to_complex(f), beta, r);
}

GridFunction bochner_riesz_maximal(const ComplexGridFunction& f, double beta, const std::vector<double>& r_grid) {
  require_bochner(beta);
  if (r_grid.empty()) throw InputError("r grid is empty");
  for (double r : r_grid) {
    if (!(r > 0.0)) throw DomainError("Bochner-Riesz radii must be positive");
  }
  const Grid& g = f.grid();
  const ComplexGridFunction spec = dft(f);
  std::vector<double> moduli(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) moduli[i] = frequency_modulus(g, i);
  GridFunction out(g, 0.0);
  ComplexGridFunction work(g);
  for (double r : r_grid) {
    for (std::size_t i = 0; i < g.size(); ++i) work[i] = spec[i] * bochner_factor(moduli[i], beta, r);
    const ComplexGridFunction back = idft(work);
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = std::max(out[i], std::abs(back[i]));
  }
  return out;
}

GridFunction bochner_riesz_maximal(const GridFunction& f, double beta, const std::vector<double>& r_grid) {
  return bochner_riesz_maximal(to_complex(f), beta, r_grid);
}

std::vector<double> default_r_grid(const Grid& grid) {
  std::vector<double> rs;
  const double top = std::sqrt(static_cast<double>(grid.dim())) / (2.0 * grid.spacing());
  const double ratio = std::exp2(1.0 / 8.0);
  for (double r = 1.0 / grid.extent(); r < top * ratio; r *= ratio) rs.push_back(r);
  return rs;
}

}  // namespace vexp
