#include "rwf/wavelets.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "rwf/errors.hpp"
#include "rwf/quadrature.hpp"

namespace rwf {

namespace {

constexpr double kRadiusThreshold = 1e-8;
constexpr double kGridStep = 1e-3;
constexpr double kGridHalfWidth = 12.0;

// Golden-section refinement of a grid maximum inside [a - h, a + h].
double refine_max(const std::function<double(double)>& f, double a, double h) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = a - h;
  double hi = a + h;
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < 60; ++i) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = f(x1);
    }
  }
  return std::max({f(a), f1, f2});
}

// Dense grid maximum of f on [-half, half] followed by local refinement.
double grid_max(const std::function<double(double)>& f, double half) {
  const int n = static_cast<int>(std::lround(2.0 * half / kGridStep));
  double best = -std::numeric_limits<double>::infinity();
  double arg = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double a = -half + i * kGridStep;
    const double v = f(a);
    if (v > best) {
      best = v;
      arg = a;
    }
  }
  return std::max(best, refine_max(f, arg, kGridStep));
}

void check_dim(const MotherWavelet& w, std::size_t n, const char* what) {
  if (static_cast<int>(n) != w.dim()) {
    throw ArgumentError(std::string(what) + ": expected dimension " + std::to_string(w.dim()) +
                        ", got " + std::to_string(n));
  }
}

}  // namespace

std::string_view family_name(WaveletFamily family) {
  switch (family) {
    case WaveletFamily::MexicanHat:
      return "mexican_hat";
    case WaveletFamily::Morlet:
      return "morlet";
    case WaveletFamily::Haar:
      return "haar";
  }
  return "unknown";
}

WaveletFamily parse_family(std::string_view name) {
  if (name == "mexican_hat") return WaveletFamily::MexicanHat;
  if (name == "morlet") return WaveletFamily::Morlet;
  if (name == "haar") return WaveletFamily::Haar;
  throw ArgumentError("unknown wavelet family '" + std::string(name) +
                      "' (expected mexican_hat, morlet or haar)");
}

MotherWavelet::MotherWavelet(WaveletFamily family, int dim, std::vector<double> omega0)
    : family_(family), dim_(dim), omega0_(std::move(omega0)) {
  if (dim < 1) throw ArgumentError("wavelet dimension must be >= 1");
  const double d = dim;
  switch (family) {
    case WaveletFamily::MexicanHat: {
      // int (d - r^2)^2 e^{-r^2} dx = pi^{d/2} d (d + 2) / 4
      norm_ = 1.0 / std::sqrt(std::pow(std::numbers::pi, d / 2.0) * d * (d + 2.0) / 4.0);
      sup_ = norm_ * d;
      // |grad| = C r |r^2 - (d+2)| e^{-r^2/2}; stationary points in q = r^2
      // solve q^2 - (a+3) q + a = 0 with a = d + 2.
      const double a = d + 2.0;
      const double disc = std::sqrt((a + 3.0) * (a + 3.0) - 4.0 * a);
      for (double q : {0.5 * (a + 3.0 - disc), 0.5 * (a + 3.0 + disc)}) {
        grad_sup_ = std::max(grad_sup_, norm_ * std::sqrt(q) * std::abs(q - a) * std::exp(-q / 2));
      }
      // Envelope (q - d) e^{-q/2} decreases for q > d + 2; bisect on it.
      auto env = [&](double q) { return norm_ * std::abs(d - q) * std::exp(-q / 2.0); };
      double lo = d + 2.0;
      double hi = 4096.0;
      for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (env(mid) > kRadiusThreshold * sup_ ? lo : hi) = mid;
      }
      radius_ = std::sqrt(hi);
      break;
    }
    case WaveletFamily::Morlet: {
      if (omega0_.empty()) {
        omega0_.assign(dim, 0.0);
        omega0_[0] = 5.0;
      }
      if (static_cast<int>(omega0_.size()) != dim) {
        throw ArgumentError("morlet: centre frequency has wrong dimension");
      }
      double w2 = 0.0;
      for (double v : omega0_) w2 += v * v;
      if (!(w2 > 0.0) || !std::isfinite(w2)) {
        throw ArgumentError("morlet: centre frequency must be non-zero and finite");
      }
      omega_norm_ = std::sqrt(w2);
      kappa_ = std::exp(-w2 / 2.0);
      const double energy = std::pow(std::numbers::pi, d / 2.0) *
                            (0.5 + 1.5 * std::exp(-w2) - 2.0 * std::exp(-0.75 * w2));
      norm_ = 1.0 / std::sqrt(energy);

      // Write u = a w0/|w0| + u_perp with rho = |u_perp|. Then
      // psi = C e^{-rho^2/2} h(a) with h(a) = e^{-a^2/2} (cos(|w0| a) - kappa).
      const double wn = omega_norm_;
      const double kap = kappa_;
      auto h = [wn, kap](double a) { return std::exp(-a * a / 2) * (std::cos(wn * a) - kap); };
      auto dh = [wn, kap](double a) {
        return std::exp(-a * a / 2) * (-a * (std::cos(wn * a) - kap) - wn * std::sin(wn * a));
      };
      sup_ = norm_ * grid_max([&](double a) { return std::abs(h(a)); }, kGridHalfWidth);
      if (dim == 1) {
        grad_sup_ = norm_ * grid_max([&](double a) { return std::abs(dh(a)); }, kGridHalfWidth);
      } else {
        // |grad|^2 = C^2 e^{-rho^2} (h'^2 + rho^2 h^2); maximize over rho^2 in
        // closed form, then over a on the grid.
        auto g2 = [&](double a) {
          const double A = dh(a) * dh(a);
          const double H = h(a) * h(a);
          double best = A;
          if (H > 0.0) {
            const double q = std::max(0.0, 1.0 - A / H);
            best = std::max(best, std::exp(-q) * (A + q * H));
          }
          return best;
        };
        grad_sup_ = norm_ * std::sqrt(grid_max(g2, kGridHalfWidth));
      }
      // |psi| <= C (1 + kappa) e^{-r^2/2}.
      radius_ = std::sqrt(2.0 * std::log(norm_ * (1.0 + kappa_) / (kRadiusThreshold * sup_)));
      break;
    }
    case WaveletFamily::Haar: {
      if (dim != 1) throw UnsupportedError("haar wavelet is only implemented for d = 1");
      norm_ = 1.0;
      sup_ = 1.0;
      grad_sup_ = std::numeric_limits<double>::infinity();
      radius_ = 0.5;
      break;
    }
  }
}

MotherWavelet MotherWavelet::mexican_hat(int dim) {
  return MotherWavelet(WaveletFamily::MexicanHat, dim, {});
}

MotherWavelet MotherWavelet::morlet(int dim, std::vector<double> omega0) {
  return MotherWavelet(WaveletFamily::Morlet, dim, std::move(omega0));
}

MotherWavelet MotherWavelet::haar(int dim) { return MotherWavelet(WaveletFamily::Haar, dim, {}); }

MotherWavelet MotherWavelet::make(WaveletFamily family, int dim) {
  return MotherWavelet(family, dim, {});
}

int MotherWavelet::vanishing_moments() const {
  switch (family_) {
    case WaveletFamily::Haar:
      return 1;
    case WaveletFamily::MexicanHat:
      return 2;
    case WaveletFamily::Morlet:
      // The real part is even: odd moments vanish along with the mean.
      return 2;
  }
  return 0;
}

double MotherWavelet::value(const double* u) const {
  switch (family_) {
    case WaveletFamily::MexicanHat: {
      double r2 = 0.0;
      for (int k = 0; k < dim_; ++k) r2 += u[k] * u[k];
      return norm_ * (dim_ - r2) * std::exp(-0.5 * r2);
    }
    case WaveletFamily::Morlet: {
      double r2 = 0.0;
      double phase = 0.0;
      for (int k = 0; k < dim_; ++k) {
        r2 += u[k] * u[k];
        phase += omega0_[k] * u[k];
      }
      return norm_ * std::exp(-0.5 * r2) * (std::cos(phase) - kappa_);
    }
    case WaveletFamily::Haar: {
      const double v = u[0];
      if (v >= 0.0 && v < 0.5) return norm_;
      if (v >= 0.5 && v < 1.0) return -norm_;
      return 0.0;
    }
  }
  return 0.0;
}

void MotherWavelet::gradient(const double* u, double* grad) const {
  switch (family_) {
    case WaveletFamily::MexicanHat: {
      double r2 = 0.0;
      for (int k = 0; k < dim_; ++k) r2 += u[k] * u[k];
      const double c = norm_ * std::exp(-0.5 * r2) * (r2 - dim_ - 2.0);
      for (int k = 0; k < dim_; ++k) grad[k] = c * u[k];
      return;
    }
    case WaveletFamily::Morlet: {
      double r2 = 0.0;
      double phase = 0.0;
      for (int k = 0; k < dim_; ++k) {
        r2 += u[k] * u[k];
        phase += omega0_[k] * u[k];
      }
      const double e = norm_ * std::exp(-0.5 * r2);
      const double c = std::cos(phase) - kappa_;
      const double s = std::sin(phase);
      for (int k = 0; k < dim_; ++k) grad[k] = -e * (u[k] * c + omega0_[k] * s);
      return;
    }
    case WaveletFamily::Haar:
      throw UnsupportedError("haar wavelet is not differentiable");
  }
}

double eval_mother(const MotherWavelet& w, std::span<const double> u) {
  check_dim(w, u.size(), "eval_mother");
  return w.value(u.data());
}

double eval_atom(const MotherWavelet& w, double s, std::span<const double> t,
                 std::span<const double> x) {
  if (!(s > 0.0)) throw ArgumentError("eval_atom: scale must be positive");
  check_dim(w, t.size(), "eval_atom");
  check_dim(w, x.size(), "eval_atom");
  const int d = w.dim();
  std::vector<double> u(d);
  for (int k = 0; k < d; ++k) u[k] = (x[k] - t[k]) / s;
  return std::pow(s, -0.5 * d) * w.value(u.data());
}

std::vector<double> atom_gradient(const MotherWavelet& w, double s, std::span<const double> t,
                                  std::span<const double> x) {
  if (!w.differentiable()) throw UnsupportedError("atom_gradient: haar is not differentiable");
  if (!(s > 0.0)) throw ArgumentError("atom_gradient: scale must be positive");
  check_dim(w, t.size(), "atom_gradient");
  check_dim(w, x.size(), "atom_gradient");
  const int d = w.dim();
  std::vector<double> u(d);
  std::vector<double> g(d);
  for (int k = 0; k < d; ++k) u[k] = (x[k] - t[k]) / s;
  w.gradient(u.data(), g.data());
  const double factor = std::pow(s, -0.5 * d - 1.0);
  for (double& v : g) v *= factor;
  return g;
}

TheoryConstants constants(const MotherWavelet& w, double s_min) {
  if (!(s_min > 0.0) || !std::isfinite(s_min)) {
    throw ArgumentError("constants: s_min must be positive and finite");
  }
  const double d = w.dim();
  TheoryConstants c;
  c.sup_norm = w.sup_norm();
  c.grad_sup_norm = w.grad_sup_norm();
  c.radius = w.radius();
  c.vanishing_moments = w.vanishing_moments();
  c.feature_bound = c.sup_norm * std::pow(s_min, -d / 2.0);
  c.atom_lipschitz = c.grad_sup_norm * std::pow(s_min, -d / 2.0 - 1.0);
  c.map_lipschitz = c.atom_lipschitz;
  return c;
}

double effective_radius(const MotherWavelet& w) { return w.radius(); }

std::pair<double, double> shift_support(const MotherWavelet& w, double s, double x) {
  if (w.family() == WaveletFamily::Haar) {
    // (x - t) / s in [0, 1)  <=>  t in (x - s, x]
    return {x - s, x};
  }
  const double r = w.radius() * s;
  return {x - r, x + r};
}

double moment_integral(const MotherWavelet& w, int k) {
  if (w.dim() != 1) throw ArgumentError("moment_integral: only defined for d = 1");
  if (k < 0) throw ArgumentError("moment_integral: order must be non-negative");
  auto integrand = [&w, k](double u) { return std::pow(u, k) * w.value(&u); };
  if (w.family() == WaveletFamily::Haar) {
    // Piecewise constant times a polynomial: Gauss-Legendre is exact per piece.
    const int n = k / 2 + 1;
    double total = 0.0;
    for (auto [a, b] : {std::pair{0.0, 0.5}, std::pair{0.5, 1.0}}) {
      const auto rule = gauss_legendre(n, a, b);
      for (int i = 0; i < n; ++i) total += rule.weights[i] * integrand(rule.nodes[i]);
    }
    return total;
  }
  const double half = w.radius() + 4.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, -half, half, 20,
                                                                       1e-13, &err);
}

}  // namespace rwf
