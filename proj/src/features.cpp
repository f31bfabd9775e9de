#include "rwf/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "rwf/errors.hpp"
#include "rwf/rng.hpp"

namespace rwf {

double SamplingDistribution::log_range() const { return std::log(s_max) - std::log(s_min); }

double SamplingDistribution::box_volume() const { return (upper - lower).prod(); }

void SamplingDistribution::validate() const {
  if (!(s_min > 0.0) || !std::isfinite(s_min)) {
    throw ArgumentError("sampling distribution: s_min must be positive and finite");
  }
  if (!(s_max > s_min) || !std::isfinite(s_max)) {
    throw ArgumentError("sampling distribution: s_max must exceed s_min");
  }
  if (lower.size() == 0 || lower.size() != upper.size()) {
    throw ArgumentError("sampling distribution: shift box bounds must share a positive dimension");
  }
  for (Eigen::Index k = 0; k < lower.size(); ++k) {
    if (!(lower[k] < upper[k]) || !std::isfinite(lower[k]) || !std::isfinite(upper[k])) {
      throw ArgumentError("sampling distribution: shift box must satisfy lower < upper");
    }
  }
}

SamplingDistribution SamplingDistribution::around_data(const Eigen::MatrixXd& X, double s_min,
                                                       double s_max, double pad_radius) {
  if (X.rows() == 0 || X.cols() == 0) throw ArgumentError("around_data: empty input matrix");
  SamplingDistribution dist;
  dist.s_min = s_min;
  dist.s_max = s_max;
  const double pad = s_max * pad_radius;
  dist.lower = X.colwise().minCoeff().transpose().array() - pad;
  dist.upper = X.colwise().maxCoeff().transpose().array() + pad;
  for (Eigen::Index k = 0; k < dist.lower.size(); ++k) {
    if (!(dist.lower[k] < dist.upper[k])) {
      dist.lower[k] -= 0.5;
      dist.upper[k] += 0.5;
    }
  }
  dist.validate();
  return dist;
}

double scale_from_draw(double u, double s_min, double s_max) {
  const double s = std::exp(std::log(s_min) + u * (std::log(s_max) - std::log(s_min)));
  return std::clamp(s, s_min, s_max);
}

double shift_from_draw(double v, double lower, double upper) { return lower + v * (upper - lower); }

FeatureMap FeatureMap::sample_rwf(const MotherWavelet& wavelet, const SamplingDistribution& dist,
                                  int num_features, std::uint64_t seed) {
  if (num_features < 1) throw ArgumentError("sample_rwf: D must be >= 1");
  dist.validate();
  if (dist.dim() != wavelet.dim()) {
    throw ArgumentError("sample_rwf: distribution dimension does not match the wavelet");
  }
  FeatureMap map;
  map.kind_ = FeatureKind::Rwf;
  map.num_features_ = num_features;
  map.dim_ = wavelet.dim();
  map.seed_ = seed;
  map.wavelet_ = wavelet;
  map.dist_ = dist;
  map.scale_draws_.resize(num_features);
  map.shift_draws_.resize(num_features, map.dim_);
  for (int i = 0; i < num_features; ++i) {
    CounterStream rng(seed, stream::kRwfFeatures, static_cast<std::uint64_t>(i));
    map.scale_draws_[i] = rng.uniform();
    for (int k = 0; k < map.dim_; ++k) map.shift_draws_(i, k) = rng.uniform();
  }
  map.transform_rwf();
  return map;
}

void FeatureMap::transform_rwf() {
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(num_features_));
  scales_.resize(num_features_);
  atom_amplitude_.resize(num_features_);
  shifts_.resize(num_features_, dim_);
  for (int i = 0; i < num_features_; ++i) {
    const double s = scale_from_draw(scale_draws_[i], dist_.s_min, dist_.s_max);
    scales_[i] = s;
    atom_amplitude_[i] = std::pow(s, -0.5 * dim_) * inv_sqrt_d;
    for (int k = 0; k < dim_; ++k) {
      shifts_(i, k) = shift_from_draw(shift_draws_(i, k), dist_.lower[k], dist_.upper[k]);
    }
  }
}

FeatureMap FeatureMap::with_distribution(const SamplingDistribution& dist) const {
  if (kind_ != FeatureKind::Rwf) throw ArgumentError("with_distribution: not an RWF map");
  dist.validate();
  if (dist.dim() != dim_) throw ArgumentError("with_distribution: dimension mismatch");
  FeatureMap out = *this;
  out.dist_ = dist;
  out.transform_rwf();
  return out;
}

FeatureMap FeatureMap::sample_rff(double lengthscale, int dim, int num_features,
                                  std::uint64_t seed) {
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) {
    throw ArgumentError("sample_rff: lengthscale must be positive and finite");
  }
  if (num_features < 1) throw ArgumentError("sample_rff: D must be >= 1");
  if (dim < 1) throw ArgumentError("sample_rff: dimension must be >= 1");
  FeatureMap map;
  map.kind_ = FeatureKind::Rff;
  map.num_features_ = num_features;
  map.dim_ = dim;
  map.seed_ = seed;
  map.base_normals_.resize(num_features, dim);
  map.phases_.resize(num_features);
  for (int i = 0; i < num_features; ++i) {
    CounterStream rng(seed, stream::kRffFeatures, static_cast<std::uint64_t>(i));
    for (int k = 0; k < dim; ++k) map.base_normals_(i, k) = rng.normal();
    map.phases_[i] = 2.0 * std::numbers::pi * rng.uniform();
  }
  return map.with_lengthscale(lengthscale);
}

FeatureMap FeatureMap::with_lengthscale(double lengthscale) const {
  if (kind_ != FeatureKind::Rff) throw ArgumentError("with_lengthscale: not an RFF map");
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) {
    throw ArgumentError("with_lengthscale: lengthscale must be positive and finite");
  }
  FeatureMap out = *this;
  out.lengthscale_ = lengthscale;
  out.frequencies_ = base_normals_ / lengthscale;
  return out;
}

const MotherWavelet& FeatureMap::wavelet() const {
  if (!wavelet_) throw ArgumentError("feature map has no wavelet (RFF map)");
  return *wavelet_;
}

const SamplingDistribution& FeatureMap::distribution() const {
  if (kind_ != FeatureKind::Rwf) throw ArgumentError("feature map has no distribution (RFF map)");
  return dist_;
}

void FeatureMap::evaluate(const double* x, double* out) const {
  if (kind_ == FeatureKind::Rwf) {
    const MotherWavelet& w = *wavelet_;
    double u[16];
    std::vector<double> heap;
    double* up = u;
    if (dim_ > 16) {
      heap.resize(dim_);
      up = heap.data();
    }
    for (int i = 0; i < num_features_; ++i) {
      const double inv_s = 1.0 / scales_[i];
      for (int k = 0; k < dim_; ++k) up[k] = (x[k] - shifts_(i, k)) * inv_s;
      out[i] = atom_amplitude_[i] * w.value(up);
    }
  } else {
    const double amp = std::sqrt(2.0 / num_features_);
    for (int i = 0; i < num_features_; ++i) {
      double arg = phases_[i];
      for (int k = 0; k < dim_; ++k) arg += frequencies_(i, k) * x[k];
      out[i] = amp * std::cos(arg);
    }
  }
}

Eigen::MatrixXd featurize(const FeatureMap& map, const Eigen::MatrixXd& X, int workers) {
  if (X.cols() != map.dim()) {
    throw ArgumentError("featurize: input has " + std::to_string(X.cols()) +
                        " columns, feature map expects " + std::to_string(map.dim()));
  }
  const Eigen::Index n = X.rows();
  const int D = map.num_features();
  // Row-major scratch keeps each z(x_n) contiguous.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> Z(n, D);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> Xr = X;
  auto run = [&](Eigen::Index begin, Eigen::Index end) {
    for (Eigen::Index r = begin; r < end; ++r) map.evaluate(Xr.row(r).data(), Z.row(r).data());
  };
  workers = std::max(1, workers);
  if (workers == 1 || n < 2 * workers) {
    run(0, n);
  } else {
    std::vector<std::thread> pool;
    const Eigen::Index chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const Eigen::Index b = std::min<Eigen::Index>(n, w * chunk);
      const Eigen::Index e = std::min<Eigen::Index>(n, b + chunk);
      if (b < e) pool.emplace_back(run, b, e);
    }
    for (auto& t : pool) t.join();
  }
  return Z;
}

double approx_kernel(const FeatureMap& map, std::span<const double> x, std::span<const double> y) {
  if (static_cast<int>(x.size()) != map.dim() || static_cast<int>(y.size()) != map.dim()) {
    throw ArgumentError("approx_kernel: point dimension does not match the feature map");
  }
  std::vector<double> zx(map.num_features());
  std::vector<double> zy(map.num_features());
  map.evaluate(x.data(), zx.data());
  map.evaluate(y.data(), zy.data());
  double sum = 0.0;
  for (int i = 0; i < map.num_features(); ++i) sum += zx[i] * zy[i];
  return sum;
}

}  // namespace rwf
