#pragma once

// Random wavelet feature (RWF) maps and the random Fourier feature (RFF)
// baseline for the squared-exponential kernel.

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <span>

#include "rwf/wavelets.hpp"

namespace rwf {

// p(s, t) = p_s(s) p_t(t): log-uniform scales on [s_min, s_max] and
// uniform shifts on the axis-aligned box [lower, upper].
struct SamplingDistribution {
  double s_min = 0.1;
  double s_max = 1.0;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int dim() const { return static_cast<int>(lower.size()); }
  double log_range() const;
  double box_volume() const;
  // Throws ArgumentError unless 0 < s_min < s_max and lower < upper.
  void validate() const;

  // Bounding box of the rows of X padded by s_max * pad_radius per side.
  static SamplingDistribution around_data(const Eigen::MatrixXd& X, double s_min, double s_max,
                                          double pad_radius);
};

// Reparameterization of base uniforms: s = exp(log s_min + u log(s_max/s_min))
// and t = lower + v * (upper - lower).
double scale_from_draw(double u, double s_min, double s_max);
double shift_from_draw(double v, double lower, double upper);

enum class FeatureKind { Rwf, Rff };

// An immutable, explicitly sampled feature map z : R^d -> R^D.
//
// RWF maps keep their base uniforms (u_i, v_i) so that the same draws can be
// pushed through a different distribution (common random numbers). RFF maps
// keep standard-normal base frequencies so the lengthscale can be changed
// the same way.
class FeatureMap {
 public:
  static FeatureMap sample_rwf(const MotherWavelet& wavelet, const SamplingDistribution& dist,
                               int num_features, std::uint64_t seed);
  static FeatureMap sample_rff(double lengthscale, int dim, int num_features, std::uint64_t seed);

  // Same base draws, new distribution / lengthscale.
  FeatureMap with_distribution(const SamplingDistribution& dist) const;
  FeatureMap with_lengthscale(double lengthscale) const;

  FeatureKind kind() const { return kind_; }
  int num_features() const { return num_features_; }
  int dim() const { return dim_; }
  std::uint64_t seed() const { return seed_; }

  // RWF accessors.
  const MotherWavelet& wavelet() const;
  const SamplingDistribution& distribution() const;
  const Eigen::VectorXd& scales() const { return scales_; }
  const Eigen::MatrixXd& shifts() const { return shifts_; }  // D x d
  const Eigen::VectorXd& scale_draws() const { return scale_draws_; }
  const Eigen::MatrixXd& shift_draws() const { return shift_draws_; }

  // RFF accessors.
  double lengthscale() const { return lengthscale_; }
  const Eigen::MatrixXd& frequencies() const { return frequencies_; }  // D x d
  const Eigen::VectorXd& phases() const { return phases_; }
  const Eigen::MatrixXd& base_normals() const { return base_normals_; }

  // Writes z(x) into out (size D). Unchecked hot path.
  void evaluate(const double* x, double* out) const;

 private:
  FeatureMap() = default;
  void transform_rwf();

  FeatureKind kind_ = FeatureKind::Rwf;
  int num_features_ = 0;
  int dim_ = 0;
  std::uint64_t seed_ = 0;

  std::optional<MotherWavelet> wavelet_;
  SamplingDistribution dist_;
  Eigen::VectorXd scale_draws_;
  Eigen::MatrixXd shift_draws_;
  Eigen::VectorXd scales_;
  Eigen::VectorXd atom_amplitude_;  // s_i^{-d/2} / sqrt(D)
  Eigen::MatrixXd shifts_;

  double lengthscale_ = 1.0;
  Eigen::MatrixXd base_normals_;
  Eigen::MatrixXd frequencies_;
  Eigen::VectorXd phases_;
};

// Z with row n equal to z(x_n). Rows may be split across `workers` threads;
// each entry depends on one row and one feature only, so the result does
// not depend on the partition.
Eigen::MatrixXd featurize(const FeatureMap& map, const Eigen::MatrixXd& X, int workers = 1);

// z(x)^T z(y), summed in feature order (symmetric bit-for-bit).
double approx_kernel(const FeatureMap& map, std::span<const double> x, std::span<const double> y);

}  // namespace rwf
