#include "rwf/model.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "rwf/errors.hpp"

namespace rwf {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

void check_noise(double noise_variance, const char* where) {
  if (!(noise_variance > 0.0) || !std::isfinite(noise_variance)) {
    throw ArgumentError(std::string(where) + ": noise variance must be positive and finite");
  }
}

// Lower Cholesky factor of A = I + Z^T Z / s2. A >= I analytically, so a
// failure can only come from accumulated round-off: retry once with a
// 1e-10 trace/D jitter.
Eigen::MatrixXd precision_factor(const Eigen::MatrixXd& Z, double noise_variance) {
  const Eigen::Index D = Z.cols();
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(D, D);
  A.selfadjointView<Eigen::Lower>().rankUpdate(Z.transpose(), 1.0 / noise_variance);
  Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(A);
  if (llt.info() != Eigen::Success) {
    const double jitter = 1e-10 * A.trace() / static_cast<double>(D);
    A.diagonal().array() += jitter;
    llt.compute(A);
    if (llt.info() != Eigen::Success) {
      std::ostringstream msg;
      msg << "blr_fit: Cholesky of I + Z^T Z / s2 failed (D=" << D << ", trace=" << A.trace()
          << ", min diag=" << A.diagonal().minCoeff() << ", jitter=" << jitter << ")";
      throw NumericalError(msg.str());
    }
  }
  return llt.matrixL();
}

double log_det_from_factor(const Eigen::MatrixXd& L) {
  return 2.0 * L.diagonal().array().log().sum();
}

void check_finite(const Eigen::MatrixXd& M, const char* what) {
  if (!M.allFinite()) throw ArgumentError(std::string(what) + " contains non-finite values");
}

}  // namespace

Eigen::MatrixXd BlrPosterior::covariance() const {
  const Eigen::Index D = chol.rows();
  Eigen::MatrixXd Linv = chol.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(D, D));
  return Linv.transpose() * Linv;
}

BlrPosterior blr_fit(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, double noise_variance) {
  check_noise(noise_variance, "blr_fit");
  if (Z.rows() < 1) throw ArgumentError("blr_fit: need at least one observation");
  if (Z.rows() != y.size()) throw ArgumentError("blr_fit: Z and y have different row counts");
  check_finite(Z, "blr_fit: Z");
  check_finite(y, "blr_fit: y");
  BlrPosterior post;
  post.noise_variance = noise_variance;
  post.chol = precision_factor(Z, noise_variance);
  const Eigen::VectorXd b = Z.transpose() * y / noise_variance;
  post.mean = post.chol.triangularView<Eigen::Lower>().solve(b);
  post.chol.triangularView<Eigen::Lower>().transpose().solveInPlace(post.mean);
  return post;
}

PredictiveDistribution blr_predict(const BlrPosterior& posterior, const Eigen::MatrixXd& Zs) {
  if (Zs.cols() != posterior.num_features()) {
    throw ArgumentError("blr_predict: test features have " + std::to_string(Zs.cols()) +
                        " columns, posterior has " + std::to_string(posterior.num_features()));
  }
  PredictiveDistribution pred;
  pred.mean = Zs * posterior.mean;
  const Eigen::MatrixXd V = posterior.chol.triangularView<Eigen::Lower>().solve(Zs.transpose());
  pred.variance = V.colwise().squaredNorm().transpose().array() + posterior.noise_variance;
  return pred;
}

double blr_log_marginal(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, double noise_variance) {
  check_noise(noise_variance, "blr_log_marginal");
  if (Z.rows() != y.size()) throw ArgumentError("blr_log_marginal: row count mismatch");
  const double n = static_cast<double>(y.size());
  const Eigen::MatrixXd L = precision_factor(Z, noise_variance);
  const Eigen::VectorXd b = Z.transpose() * y;
  const Eigen::VectorXd v = L.triangularView<Eigen::Lower>().solve(b);
  const double s2 = noise_variance;
  const double quad = y.squaredNorm() / s2 - v.squaredNorm() / (s2 * s2);
  return -0.5 * quad - 0.5 * (log_det_from_factor(L) + n * std::log(s2)) - 0.5 * n * kLog2Pi;
}

double blr_log_marginal_grad_log_noise(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                                       double noise_variance) {
  // With C = s2 I + Z Z^T: d log p / d log s2 = s2/2 (|C^{-1} y|^2 - tr C^{-1}),
  // C^{-1} y = (y - Z m_w) / s2 and tr C^{-1} = (N - D + tr A^{-1}) / s2.
  const BlrPosterior post = blr_fit(Z, y, noise_variance);
  const double s2 = noise_variance;
  const Eigen::VectorXd alpha = (y - Z * post.mean) / s2;
  const Eigen::Index D = Z.cols();
  const Eigen::MatrixXd Linv =
      post.chol.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(D, D));
  const double trace_c_inv =
      (static_cast<double>(y.size()) - static_cast<double>(D) + Linv.squaredNorm()) / s2;
  return 0.5 * s2 * (alpha.squaredNorm() - trace_c_inv);
}

PredictiveDistribution FeatureRegressor::predict(const Eigen::MatrixXd& X, int workers) const {
  const Eigen::MatrixXd Zs = featurize(map, X, workers) * output_scale;
  return blr_predict(posterior, Zs);
}

FeatureRegressor fit_feature_regressor(const FeatureMap& map, double output_scale,
                                       const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                       double noise_variance, int workers) {
  if (!std::isfinite(output_scale)) throw ArgumentError("output scale must be finite");
  const Eigen::MatrixXd Z = featurize(map, X, workers) * output_scale;
  return FeatureRegressor{map, output_scale, blr_fit(Z, y, noise_variance)};
}

Eigen::MatrixXd rbf_cross(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double lengthscale,
                          double variance) {
  if (A.cols() != B.cols()) throw ArgumentError("rbf_cross: dimension mismatch");
  const Eigen::VectorXd a2 = A.rowwise().squaredNorm();
  const Eigen::VectorXd b2 = B.rowwise().squaredNorm();
  Eigen::MatrixXd D2 = -2.0 * A * B.transpose();
  D2.colwise() += a2;
  D2.rowwise() += b2.transpose();
  const double inv = -0.5 / (lengthscale * lengthscale);
  return variance * (D2.array().max(0.0) * inv).exp().matrix();
}

ExactGpModel exact_gp_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lengthscale,
                          double signal_variance, double noise_variance) {
  if (X.rows() > kExactGpMaxPoints) {
    throw ArgumentError("exact_gp_fit: N = " + std::to_string(X.rows()) + " exceeds the dense " +
                        "limit of " + std::to_string(kExactGpMaxPoints) +
                        "; use the featurized model (rwf or rff) instead");
  }
  if (X.rows() < 1 || X.rows() != y.size()) throw ArgumentError("exact_gp_fit: bad data shape");
  if (!(lengthscale > 0.0) || !(signal_variance > 0.0)) {
    throw ArgumentError("exact_gp_fit: lengthscale and signal variance must be positive");
  }
  check_noise(noise_variance, "exact_gp_fit");
  ExactGpModel model;
  model.inputs = X;
  model.lengthscale = lengthscale;
  model.signal_variance = signal_variance;
  model.noise_variance = noise_variance;
  Eigen::MatrixXd K = rbf_cross(X, X, lengthscale, signal_variance);
  K.diagonal().array() += noise_variance;
  Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(K);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("exact_gp_fit: Cholesky of K + s2 I failed");
  }
  model.chol = llt.matrixL();
  model.alpha = llt.solve(y);
  return model;
}

PredictiveDistribution exact_gp_predict(const ExactGpModel& model, const Eigen::MatrixXd& Xs) {
  if (Xs.cols() != model.inputs.cols()) throw ArgumentError("exact_gp_predict: dimension mismatch");
  const Eigen::MatrixXd Ks =
      rbf_cross(Xs, model.inputs, model.lengthscale, model.signal_variance);
  PredictiveDistribution pred;
  pred.mean = Ks * model.alpha;
  const Eigen::MatrixXd V = model.chol.triangularView<Eigen::Lower>().solve(Ks.transpose());
  const Eigen::ArrayXd latent =
      (model.signal_variance - V.colwise().squaredNorm().transpose().array()).max(0.0);
  pred.variance = (latent + model.noise_variance).matrix();
  return pred;
}

double exact_gp_log_marginal(const ExactGpModel& model, const Eigen::VectorXd& y) {
  if (y.size() != model.alpha.size()) throw ArgumentError("exact_gp_log_marginal: size mismatch");
  const double n = static_cast<double>(y.size());
  return -0.5 * y.dot(model.alpha) - 0.5 * log_det_from_factor(model.chol) - 0.5 * n * kLog2Pi;
}

}  // namespace rwf
