#pragma once

// Ground-truth kernels: the wavelet kernel
//
//   k(x, y) = int int psi_{s,t}(x) psi_{s,t}(y) p_s(s) p_t(t) dt ds
//
// by deterministic tensor Gauss-Legendre quadrature, and the closed-form
// squared-exponential kernel. Plus Gram-matrix helpers for PD checks.

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <span>

#include "rwf/features.hpp"
#include "rwf/wavelets.hpp"

namespace rwf {

struct QuadratureSpec {
  int n_scale = 24;  // nodes per panel on the log-scale axis
  int n_shift = 32;  // nodes per panel per shift axis
  // Optional truncation box for the shift integral; must contain the
  // distribution's shift box. The density vanishes outside the shift box,
  // so this only matters for validation.
  std::optional<Eigen::VectorXd> t_lower;
  std::optional<Eigen::VectorXd> t_upper;
  double rel_tol = 1e-6;
  double abs_floor = 1e-12;
  int max_doublings = 5;
};

struct KernelEstimate {
  double value = 0.0;
  double last_change = 0.0;  // |k(2n) - k(n)| at the final doubling
  bool converged = false;
  int n_scale = 0;
  int n_shift = 0;
};

// One fixed tensor rule. Uses the substitution u = log s, under which the
// log-uniform scale density is constant, and restricts the shift integral
// to the intersection of both atoms' supports with the shift box.
double wavelet_kernel_fixed(const MotherWavelet& w, const SamplingDistribution& dist,
                            std::span<const double> x, std::span<const double> y, int n_scale,
                            int n_shift);

// Doubles both node counts until successive values agree to
// rel_tol * max(|k|, abs_floor).
KernelEstimate wavelet_kernel_estimate(const MotherWavelet& w, const SamplingDistribution& dist,
                                       std::span<const double> x, std::span<const double> y,
                                       const QuadratureSpec& spec = {});

// Converged quadrature value; throws NumericalError if the doubling budget
// runs out. Supports d <= 2.
double wavelet_kernel(const MotherWavelet& w, const SamplingDistribution& dist,
                      std::span<const double> x, std::span<const double> y,
                      const QuadratureSpec& spec = {});

// sigma2 * exp(-|x - y|^2 / (2 l^2)).
double rbf_kernel(double lengthscale, double variance, std::span<const double> x,
                  std::span<const double> y);

using PairwiseKernel = std::function<double(std::span<const double>, std::span<const double>)>;

// Symmetric Gram matrix; the upper triangle is computed and mirrored.
Eigen::MatrixXd gram(const PairwiseKernel& kernel, const Eigen::MatrixXd& X);

// Smallest eigenvalue of a symmetric matrix. Throws ArgumentError when
// max |G - G^T| exceeds 1e-9 * max(1, max |G|).
double min_eigenvalue(const Eigen::MatrixXd& G);
double max_eigenvalue(const Eigen::MatrixXd& G);

}  // namespace rwf
