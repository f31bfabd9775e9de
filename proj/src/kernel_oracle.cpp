#include "rwf/kernel_oracle.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rwf/errors.hpp"
#include "rwf/quadrature.hpp"

namespace rwf {

namespace {

void check_oracle_args(const MotherWavelet& w, const SamplingDistribution& dist,
                       std::span<const double> x, std::span<const double> y) {
  dist.validate();
  const int d = w.dim();
  if (d > 2) throw UnsupportedError("wavelet_kernel: quadrature oracle supports d <= 2 only");
  if (dist.dim() != d || static_cast<int>(x.size()) != d || static_cast<int>(y.size()) != d) {
    throw ArgumentError("wavelet_kernel: dimension mismatch");
  }
}

// Scales at which the piecewise structure of the Haar shift integral
// changes: two of the moving breakpoints x - a s, y - b s (a, b in
// {0, 1/2, 1}) or a box edge coincide.
std::vector<double> haar_kinks(double x, double y, double lo, double hi, double s_min,
                               double s_max) {
  struct Line {
    double c, a;
  };
  std::vector<Line> lines;
  for (double a : {0.0, 0.5, 1.0}) {
    lines.push_back({x, a});
    lines.push_back({y, a});
  }
  lines.push_back({lo, 0.0});
  lines.push_back({hi, 0.0});
  std::vector<double> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const double da = lines[i].a - lines[j].a;
      if (da == 0.0) continue;
      const double s = (lines[i].c - lines[j].c) / da;
      if (s > s_min && s < s_max) out.push_back(s);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double shift_integral_1d(const MotherWavelet& w, double s, double x, double y, double lo,
                         double hi, const GaussLegendreRule& ref) {
  auto [ax, bx] = shift_support(w, s, x);
  auto [ay, by] = shift_support(w, s, y);
  const double a = std::max({lo, ax, ay});
  const double b = std::min({hi, bx, by});
  if (!(a < b)) return 0.0;
  std::vector<double> cuts{a, b};
  if (w.family() == WaveletFamily::Haar) {
    for (double c : {x - 0.5 * s, y - 0.5 * s}) {
      if (c > a && c < b) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
  }
  const double inv_s = 1.0 / s;
  double total = 0.0;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double half = 0.5 * (cuts[p + 1] - cuts[p]);
    const double mid = 0.5 * (cuts[p + 1] + cuts[p]);
    double panel = 0.0;
    for (std::size_t j = 0; j < ref.nodes.size(); ++j) {
      const double t = mid + half * ref.nodes[j];
      const double ux = (x - t) * inv_s;
      const double uy = (y - t) * inv_s;
      panel += ref.weights[j] * w.value(&ux) * w.value(&uy);
    }
    total += half * panel;
  }
  return total * inv_s;
}

double shift_integral_2d(const MotherWavelet& w, double s, std::span<const double> x,
                         std::span<const double> y, const Eigen::VectorXd& lo,
                         const Eigen::VectorXd& hi, const GaussLegendreRule& ref) {
  double a[2];
  double b[2];
  for (int k = 0; k < 2; ++k) {
    auto [ax, bx] = shift_support(w, s, x[k]);
    auto [ay, by] = shift_support(w, s, y[k]);
    a[k] = std::max({lo[k], ax, ay});
    b[k] = std::min({hi[k], bx, by});
    if (!(a[k] < b[k])) return 0.0;
  }
  const double h0 = 0.5 * (b[0] - a[0]);
  const double m0 = 0.5 * (b[0] + a[0]);
  const double h1 = 0.5 * (b[1] - a[1]);
  const double m1 = 0.5 * (b[1] + a[1]);
  const double inv_s = 1.0 / s;
  const std::size_t n = ref.nodes.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t0 = m0 + h0 * ref.nodes[i];
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double t1 = m1 + h1 * ref.nodes[j];
      const double ux[2] = {(x[0] - t0) * inv_s, (x[1] - t1) * inv_s};
      const double uy[2] = {(y[0] - t0) * inv_s, (y[1] - t1) * inv_s};
      row += ref.weights[j] * w.value(ux) * w.value(uy);
    }
    total += ref.weights[i] * row;
  }
  return total * h0 * h1 * inv_s * inv_s;
}

}  // namespace

double wavelet_kernel_fixed(const MotherWavelet& w, const SamplingDistribution& dist,
                            std::span<const double> x, std::span<const double> y, int n_scale,
                            int n_shift) {
  check_oracle_args(w, dist, x, y);
  if (n_scale < 1 || n_shift < 1) throw ArgumentError("wavelet_kernel: node counts must be >= 1");
  const int d = w.dim();
  const auto& scale_rule = gauss_legendre(n_scale);
  const auto& shift_rule = gauss_legendre(n_shift);

  // Panels on u = log s, split where the Haar integrand has kinks.
  std::vector<double> edges{std::log(dist.s_min)};
  if (w.family() == WaveletFamily::Haar) {
    for (double s : haar_kinks(x[0], y[0], dist.lower[0], dist.upper[0], dist.s_min, dist.s_max)) {
      edges.push_back(std::log(s));
    }
  }
  edges.push_back(std::log(dist.s_max));

  double total = 0.0;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double half = 0.5 * (edges[p + 1] - edges[p]);
    const double mid = 0.5 * (edges[p + 1] + edges[p]);
    if (!(half > 0.0)) continue;
    double panel = 0.0;
    for (int i = 0; i < n_scale; ++i) {
      const double s = std::exp(mid + half * scale_rule.nodes[i]);
      const double inner =
          d == 1 ? shift_integral_1d(w, s, x[0], y[0], dist.lower[0], dist.upper[0], shift_rule)
                 : shift_integral_2d(w, s, x, y, dist.lower, dist.upper, shift_rule);
      panel += scale_rule.weights[i] * inner;
    }
    total += half * panel;
  }
  return total / (dist.log_range() * dist.box_volume());
}

KernelEstimate wavelet_kernel_estimate(const MotherWavelet& w, const SamplingDistribution& dist,
                                       std::span<const double> x, std::span<const double> y,
                                       const QuadratureSpec& spec) {
  check_oracle_args(w, dist, x, y);
  if (spec.n_scale < 8 || spec.n_shift < 8) {
    throw ArgumentError("wavelet_kernel: quadrature node counts must be >= 8");
  }
  if (spec.t_lower || spec.t_upper) {
    if (!spec.t_lower || !spec.t_upper || spec.t_lower->size() != dist.dim() ||
        spec.t_upper->size() != dist.dim()) {
      throw ArgumentError("wavelet_kernel: t_domain must give both bounds in the data dimension");
    }
    for (int k = 0; k < dist.dim(); ++k) {
      if ((*spec.t_lower)[k] > dist.lower[k] || (*spec.t_upper)[k] < dist.upper[k]) {
        throw ArgumentError("wavelet_kernel: t_domain must contain the shift box");
      }
    }
  }
  KernelEstimate est;
  int ns = spec.n_scale;
  int nt = spec.n_shift;
  double prev = wavelet_kernel_fixed(w, dist, x, y, ns, nt);
  for (int level = 0; level < spec.max_doublings; ++level) {
    ns *= 2;
    nt *= 2;
    const double next = wavelet_kernel_fixed(w, dist, x, y, ns, nt);
    est.value = next;
    est.last_change = std::abs(next - prev);
    est.n_scale = ns;
    est.n_shift = nt;
    if (est.last_change <= spec.rel_tol * std::max(std::abs(next), spec.abs_floor)) {
      est.converged = true;
      return est;
    }
    prev = next;
  }
  return est;
}

double wavelet_kernel(const MotherWavelet& w, const SamplingDistribution& dist,
                      std::span<const double> x, std::span<const double> y,
                      const QuadratureSpec& spec) {
  const KernelEstimate est = wavelet_kernel_estimate(w, dist, x, y, spec);
  if (!est.converged) {
    throw NumericalError("wavelet_kernel: quadrature did not converge (last change " +
                         std::to_string(est.last_change) + ", value " + std::to_string(est.value) +
                         ")");
  }
  return est.value;
}

double rbf_kernel(double lengthscale, double variance, std::span<const double> x,
                  std::span<const double> y) {
  if (!(lengthscale > 0.0)) throw ArgumentError("rbf_kernel: lengthscale must be positive");
  if (!(variance > 0.0)) throw ArgumentError("rbf_kernel: variance must be positive");
  if (x.size() != y.size()) throw ArgumentError("rbf_kernel: dimension mismatch");
  double r2 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) r2 += (x[k] - y[k]) * (x[k] - y[k]);
  return variance * std::exp(-r2 / (2.0 * lengthscale * lengthscale));
}

Eigen::MatrixXd gram(const PairwiseKernel& kernel, const Eigen::MatrixXd& X) {
  const Eigen::Index n = X.rows();
  if (n < 1) throw ArgumentError("gram: need at least one point");
  const Eigen::Index d = X.cols();
  std::vector<std::vector<double>> rows(n, std::vector<double>(d));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) rows[i][k] = X(i, k);
  }
  Eigen::MatrixXd G(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      G(i, j) = kernel(rows[i], rows[j]);
      G(j, i) = G(i, j);
    }
  }
  return G;
}

namespace {

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& G) {
  if (G.rows() != G.cols() || G.rows() == 0) {
    throw ArgumentError("eigenvalue: matrix must be square and non-empty");
  }
  const double scale = std::max(1.0, G.cwiseAbs().maxCoeff());
  const double asym = (G - G.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * scale) {
    throw ArgumentError("eigenvalue: matrix is not symmetric (max asymmetry " +
                        std::to_string(asym) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(G, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("eigenvalue solver failed");
  return solver.eigenvalues();
}

}  // namespace

double min_eigenvalue(const Eigen::MatrixXd& G) { return symmetric_eigenvalues(G).minCoeff(); }

double max_eigenvalue(const Eigen::MatrixXd& G) { return symmetric_eigenvalues(G).maxCoeff(); }

}  // namespace rwf
