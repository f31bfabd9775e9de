#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "rwf/errors.hpp"
#include "rwf/kernel_oracle.hpp"
#include "rwf/rng.hpp"
#include "rwf/verify.hpp"

using namespace rwf;
using rwf::test::box1;
using rwf::test::one;

namespace {

ProbePairs pairs(std::initializer_list<std::pair<double, double>> xs) {
  ProbePairs p;
  p.x.resize(static_cast<Eigen::Index>(xs.size()), 1);
  p.y.resize(static_cast<Eigen::Index>(xs.size()), 1);
  int i = 0;
  for (const auto& [a, b] : xs) {
    p.x(i, 0) = a;
    p.y(i, 0) = b;
    ++i;
  }
  return p;
}

}  // namespace

TEST_SUITE("verify") {
  TEST_CASE("sample complexity") {
    CHECK(sample_complexity(1, 1, 1, 1, 0.5, 0.1) == 229);
    CHECK(sample_complexity(1, 1, 1, 1, 0.25, 0.1) > 4 * 229);
    // Covering log clamped, delta -> 1: only the 8 B^2 / eps^2 log 2 envelope remains.
    const long long env = static_cast<long long>(std::ceil(32.0 * std::log(2.0)));
    CHECK(sample_complexity(1, 1, 0.01, 1, 0.5, 1.0 - 1e-12) == env);
    CHECK(sample_complexity(2, 1, 1, 1, 0.5, 0.1) > sample_complexity(1, 1, 1, 1, 0.5, 0.1));
    CHECK_THROWS_AS(sample_complexity(1, 1, 1, 1, 0.0, 0.1), ArgumentError);
    CHECK_THROWS_AS(sample_complexity(1, 1, 1, 1, 0.5, 1.0), ArgumentError);
    CHECK_THROWS_AS(sample_complexity(1, 1, 1, 1, 0.5, 0.0), ArgumentError);
  }

  TEST_CASE("variance bound arithmetic") {
    const auto w = MotherWavelet::mexican_hat(1);
    const auto dist = box1(0.1, 1.0);
    const auto rep = check_variance_bound(w, dist, pairs({{0.0, 0.1}}), 16, 100, 3);
    const double B = constants(w, 0.1).feature_bound;
    CHECK(rep.threshold == 1.0);
    CHECK(rep.details["bound"].get<double>() == doctest::Approx(B * B / 16 * (1 + 5 / std::sqrt(100.0))));
  }

  TEST_CASE("Haar pairs that no atom can join") {
    const auto w = MotherWavelet::haar();
    const auto dist = box1(0.05, 0.3);
    const auto p = pairs({{-0.9, 0.9}, {-0.5, 0.2}});
    CHECK(wavelet_kernel(w, dist, one(-0.9), one(0.9)) == 0.0);
    const auto u = check_unbiasedness(w, dist, p, 32, 50, 4);
    CHECK(u.passed);
    CHECK(u.statistic == 0.0);
    const auto v = estimator_variances(w, dist, p, 32, 50, 4);
    CHECK(v[0] == 0.0);
    CHECK(v[1] == 0.0);
    CHECK(check_variance_bound(w, dist, p, 32, 50, 4).statistic == 0.0);
  }

  TEST_CASE("unbiasedness on random probes and its control") {
    const auto w = MotherWavelet::mexican_hat(1);
    const auto dist = box1(0.1, 1.0);
    const auto probes = random_probe_pairs(dist, 10, 42);
    const auto good = check_unbiasedness(w, dist, probes, 64, 200, 42);
    CHECK(good.passed);
    CHECK(good.recompute_passed() == good.passed);
    const auto bad = check_unbiasedness(w, dist, probes, 64, 200, 42, true);
    CHECK_FALSE(bad.passed);
    CHECK(bad.recompute_passed() == bad.passed);
  }

  TEST_CASE("positive definiteness and its control") {
    const auto w = MotherWavelet::mexican_hat(1);
    const auto dist = box1(0.1, 1.0);
    const auto rep = check_positive_definite(w, dist, 10, 5, 7);
    CHECK(rep.passed);
    CHECK_FALSE(check_positive_definite(w, dist, 10, 5, 7, 0.5).passed);

    // Duplicates make the Gram singular, not indefinite.
    Eigen::MatrixXd X(6, 1);
    X << -0.3, 0.2, 0.2, 0.7, -0.3, 0.0;
    const PairwiseKernel k = [&](std::span<const double> a, std::span<const double> b) {
      return wavelet_kernel(w, dist, a, b);
    };
    const Eigen::MatrixXd G = gram(k, X);
    const double lmin = min_eigenvalue(G);
    CHECK(std::abs(lmin) < 1e-10 * max_eigenvalue(G));
    CHECK(lmin >= -1e-8 * max_eigenvalue(G));
  }

  TEST_CASE("uniform error on a single grid point is the pointwise error") {
    const auto w = MotherWavelet::mexican_hat(1);
    const auto dist = box1(0.1, 1.0);
    Eigen::MatrixXd grid(1, 1);
    grid << 0.25;
    const auto t = empirical_uniform_error(w, dist, grid, {16}, 1, 9);
    CHECK(t.grid_diameter == 0.0);
    const auto map = FeatureMap::sample_rwf(w, dist, 16, mix_seed(mix_seed(9, 16), 0));
    const double x = 0.25;
    const double pointwise = std::abs(approx_kernel(map, one(x), one(x)) - wavelet_kernel(w, dist, one(x), one(x)));
    CHECK(t.mean_sup_error[0] == doctest::Approx(pointwise).epsilon(1e-12));
  }

  TEST_CASE("uniform error rate") {
    const auto w = MotherWavelet::mexican_hat(1);
    const auto dist = box1(0.1, 1.0);
    const Eigen::MatrixXd grid = Eigen::VectorXd::LinSpaced(9, -1, 1);
    const auto t = empirical_uniform_error(w, dist, grid, {64, 128, 256}, 100, 5);
    const double B = constants(w, 0.1).feature_bound;
    for (double e : t.max_sup_error) CHECK(e <= 2 * B * B);
    CHECK(t.grid_diameter == doctest::Approx(2.0));
    for (int i = 0; i < 2; ++i) {
      const double ratio = t.mean_sup_error[i + 1] / t.mean_sup_error[i];
      CAPTURE(ratio);
      CHECK(ratio >= 0.6);
      CHECK(ratio <= 0.82);
    }
    CHECK(std::abs(t.slope + 0.5) <= 0.2);
    CHECK_THROWS_AS(check_uniform_convergence(w, dist, grid, {64}, 10, 5), ArgumentError);
  }

  TEST_CASE("estimator variance decays like 1/D") {
    const auto w = MotherWavelet::mexican_hat(1);
    const auto dist = box1(0.1, 1.0);
    const auto probes = random_probe_pairs(dist, 10, 11);
    std::vector<double> lx, ly;
    for (int D : {16, 64, 256}) {
      const auto v = estimator_variances(w, dist, probes, D, 200, 12);
      double mean = 0.0;
      for (double x : v) mean += x / v.size();
      lx.push_back(std::log(D));
      ly.push_back(std::log(mean));
    }
    const double mx = (lx[0] + lx[1] + lx[2]) / 3, my = (ly[0] + ly[1] + ly[2]) / 3;
    double sxy = 0, sxx = 0;
    for (int i = 0; i < 3; ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    const double slope = sxy / sxx;
    CAPTURE(slope);
    CHECK(std::abs(slope + 1.0) <= 0.25);
  }

  TEST_CASE("stationarity") {
    const auto w = MotherWavelet::mexican_hat(1);
    const auto probes = pairs({{0.7, 0.9}, {0.8, 0.85}});
    const auto rep = check_stationarity(w, 0.1, 1.0, 50.0, -1.0, 1.0, probes, 0.5);
    CHECK(rep.passed);
    CHECK(rep.details["large_max_diff"].get<double>() < 1e-6);
    CHECK(rep.details["tight_max_diff"].get<double>() > 1e-3);
    const auto zero = check_stationarity(w, 0.1, 1.0, 50.0, -1.0, 1.0, probes, 0.0);
    CHECK(zero.details["large_max_diff"].get<double>() == 0.0);
    CHECK(zero.details["tight_max_diff"].get<double>() == 0.0);
    CHECK_FALSE(zero.passed);
    CHECK_THROWS_AS(check_stationarity(MotherWavelet::mexican_hat(2), 0.1, 1.0, 50.0, -1.0, 1.0, probes, 0.5),
                    UnsupportedError);
  }

  TEST_CASE("moment cancellation") {
    const auto haar = MotherWavelet::haar();
    const auto hat = MotherWavelet::mexican_hat(1);
    const auto flat = [](double t) { return std::abs(t) <= 1.0 ? 0.5 : 0.0; };
    CHECK(std::abs(local_contribution(haar, flat, -1.0, 1.0, 0.3, 0.1)) < 1e-12);
    // Non-compact atom: only the effective-radius truncation remains.
    CHECK(std::abs(local_contribution(hat, flat, -1.0, 1.0, 0.3, 0.05)) < 1e-8);

    const auto rep = check_moment_cancellation({haar, hat}, {0.1, 0.05, 0.025});
    CHECK(rep.passed);
    CHECK(rep.direction == Direction::AtLeast);
    for (double r : rep.details["wavelets"][1]["ratios"]) {
      CHECK(r >= 3.0);
      CHECK(r <= 6.0);
    }
  }

  TEST_CASE("localization bounds") {
    for (const auto& w : {MotherWavelet::mexican_hat(1), MotherWavelet::morlet(1), MotherWavelet::haar()}) {
      const auto rep = check_localization_bounds(w, box1(0.05, 2.0), 2000, 3);
      CHECK(rep.passed);
    }
  }

  TEST_CASE("default suite") {
    const VerifyConfig cfg;
    const auto reports = run_suite(cfg);
    REQUIRE(reports.size() == 7);
    for (std::size_t i = 0; i < reports.size(); ++i) {
      CAPTURE(reports[i].name);
      CHECK(reports[i].name == check_names()[i]);
      CHECK(reports[i].passed);
      CHECK(reports[i].recompute_passed() == reports[i].passed);
      CHECK_FALSE(reports[i].negative_control);
      const auto j = to_json(reports[i]);
      CHECK(j["passed"].get<bool>() == reports[i].passed);
    }
    const auto again = run_suite(cfg, {"unbiasedness"});
    REQUIRE(again.size() == 1);
    CHECK(again[0].statistic == reports[1].statistic);

    const auto controls = run_suite(cfg, {"unbiasedness_control", "positive_definite_control"});
    REQUIRE(controls.size() == 2);
    for (const auto& c : controls) {
      CHECK(c.negative_control);
      CHECK_FALSE(c.passed);
    }
    CHECK_THROWS_AS(run_suite(cfg, {"nonsense"}), ConfigError);
  }
}
