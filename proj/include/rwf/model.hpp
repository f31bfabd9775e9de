#pragma once

// Featurized Bayesian linear regression (weight-space GP) and a dense
// exact-GP reference with the squared-exponential kernel.

#include <Eigen/Core>

#include "rwf/features.hpp"

namespace rwf {

// Posterior N(m_w, S_w) of w ~ N(0, I_D) under y = Z w + eps, eps ~ N(0, s2 I).
//   A   = I_D + s2^{-1} Z^T Z   (stored through its Cholesky factor L)
//   S_w = A^{-1}
//   m_w = s2^{-1} S_w Z^T y
struct BlrPosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd chol;  // lower-triangular L with L L^T = A
  double noise_variance = 1.0;

  int num_features() const { return static_cast<int>(mean.size()); }
  // Materializes S_w; O(D^3).
  Eigen::MatrixXd covariance() const;
};

// Observation-level predictive moments (variance includes the noise).
struct PredictiveDistribution {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
};

BlrPosterior blr_fit(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, double noise_variance);

PredictiveDistribution blr_predict(const BlrPosterior& posterior, const Eigen::MatrixXd& Zs);

// log N(y | 0, s2 I_N + Z Z^T) evaluated in the D-dimensional form
//   -1/2 [y^T y / s2 - y^T Z A^{-1} Z^T y / s2^2] - 1/2 [log det A + N log s2]
//   - N/2 log(2 pi).
double blr_log_marginal(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, double noise_variance);

// d/d(log s2) of blr_log_marginal.
double blr_log_marginal_grad_log_noise(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                                       double noise_variance);

// A fitted feature-space regressor: feature map, output scale gamma applied
// as a column scale on Z, and the weight posterior.
struct FeatureRegressor {
  FeatureMap map;
  double output_scale = 1.0;
  BlrPosterior posterior;

  PredictiveDistribution predict(const Eigen::MatrixXd& X, int workers = 1) const;
};

FeatureRegressor fit_feature_regressor(const FeatureMap& map, double output_scale,
                                       const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                       double noise_variance, int workers = 1);

inline constexpr Eigen::Index kExactGpMaxPoints = 10000;

struct ExactGpModel {
  Eigen::MatrixXd inputs;
  Eigen::VectorXd alpha;  // (K + s2 I)^{-1} y
  Eigen::MatrixXd chol;   // lower factor of K + s2 I
  double lengthscale = 1.0;
  double signal_variance = 1.0;
  double noise_variance = 1.0;
};

// Throws ArgumentError when N exceeds kExactGpMaxPoints.
ExactGpModel exact_gp_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lengthscale,
                          double signal_variance, double noise_variance);

PredictiveDistribution exact_gp_predict(const ExactGpModel& model, const Eigen::MatrixXd& Xs);

double exact_gp_log_marginal(const ExactGpModel& model, const Eigen::VectorXd& y);

// Squared-exponential Gram / cross-covariance matrices.
Eigen::MatrixXd rbf_cross(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double lengthscale,
                          double variance);

}  // namespace rwf
