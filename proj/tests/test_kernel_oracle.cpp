#include <cmath>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "helpers.hpp"
#include "rwf/errors.hpp"
#include "rwf/kernel_oracle.hpp"
#include "rwf/rng.hpp"

using namespace rwf;
using rwf::test::box1;
using rwf::test::one;

namespace {

struct Frozen {
  double x, y, value;
};

// From tests/oracles/wavelet_kernel.py (mpmath, 30 digits), s in [0.05, 0.5],
// shift box [-1, 1].
const Frozen kMexicanHat[] = {{0.1, 0.12, 0.47512743734080357},
                              {0.0, 0.3, -0.048187883295617827},
                              {-0.95, -0.9, 0.2865285273590323},
                              {0.5, 0.5, 0.48056544849113433},
                              {-0.8, 0.7, 0.0076547769972440504}};
const Frozen kMorlet[] = {{0.1, 0.12, 0.31716131722025357},
                          {0.0, 0.3, -0.026836129833034914},
                          {-0.95, -0.9, -0.024050001209005745},
                          {0.5, 0.5, 0.49516174023864471},
                          {-0.8, 0.7, -0.0012626823397252648}};
const Frozen kHaar[] = {{0.1, 0.12, 0.26548097977224414},
                        {0.0, 0.3, -0.024065478427527822},
                        {-0.95, -0.9, -0.021714724095162611},
                        {0.5, 0.5, 0.5},
                        {-0.8, 0.7, 0.0}};

}  // namespace

TEST_SUITE("kernel_oracle") {
  TEST_CASE("quadrature matches the independent high-precision oracle") {
    const auto dist = box1(0.05, 0.5);
    auto check = [&](const MotherWavelet& w, const Frozen* rows) {
      for (int i = 0; i < 5; ++i) {
        CAPTURE(rows[i].x);
        CAPTURE(rows[i].y);
        const double k = wavelet_kernel(w, dist, one(rows[i].x), one(rows[i].y));
        CHECK(std::abs(k - rows[i].value) <= 1e-7 * std::max(std::abs(rows[i].value), 1e-3));
      }
    };
    check(MotherWavelet::mexican_hat(1), kMexicanHat);
    check(MotherWavelet::morlet(1), kMorlet);
    check(MotherWavelet::haar(), kHaar);
  }

  TEST_CASE("Morlet normalization matches the oracle") {
    CHECK(MotherWavelet::morlet(1).normalization() == doctest::Approx(1.0622519472890319).epsilon(1e-12));
  }

  TEST_CASE("symmetry and non-negative diagonal") {
    const auto dist = box1(0.1, 1.0);
    for (const auto& w : {MotherWavelet::mexican_hat(1), MotherWavelet::morlet(1), MotherWavelet::haar()}) {
      for (int i = 0; i < 10; ++i) {
        CounterStream r(1, stream::kProbe, static_cast<std::uint64_t>(i));
        const double x = 2 * r.uniform() - 1, y = 2 * r.uniform() - 1;
        CHECK(std::abs(wavelet_kernel(w, dist, one(x), one(y)) - wavelet_kernel(w, dist, one(y), one(x))) <
              1e-12);
        CHECK(wavelet_kernel(w, dist, one(x), one(x)) >= 0.0);
      }
    }
  }

  TEST_CASE("disjoint Haar supports give exactly zero") {
    const auto w = MotherWavelet::haar();
    const auto dist = box1(0.05, 0.3);
    const double gap = 2 * 0.3 * w.radius();
    const double x = -0.5, y = x + gap + 0.01;
    CHECK(std::abs(wavelet_kernel(w, dist, one(x), one(y))) < 1e-12);
  }

  TEST_CASE("quadrature converges under node doubling") {
    const auto w = MotherWavelet::mexican_hat(1);
    const auto dist = box1(0.1, 1.0);
    for (int i = 0; i < 10; ++i) {
      CounterStream r(2, stream::kProbe, static_cast<std::uint64_t>(i));
      const double x = 2 * r.uniform() - 1, y = 2 * r.uniform() - 1;
      const auto est = wavelet_kernel_estimate(w, dist, one(x), one(y));
      REQUIRE(est.converged);
      const double k1 = wavelet_kernel_fixed(w, dist, one(x), one(y), est.n_scale, est.n_shift);
      const double k2 = wavelet_kernel_fixed(w, dist, one(x), one(y), 2 * est.n_scale, 2 * est.n_shift);
      CHECK(std::abs(k1 - k2) / std::max(std::abs(k1), 1e-12) < 1e-6);
    }
  }

  TEST_CASE("two-dimensional oracle agrees with a fine fixed rule") {
    const auto w = MotherWavelet::mexican_hat(2);
    SamplingDistribution dist{0.2, 0.6, Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1)};
    const double x[2] = {0.1, -0.2}, y[2] = {0.3, 0.0};
    const double k = wavelet_kernel(w, dist, x, y);
    const double fine = wavelet_kernel_fixed(w, dist, x, y, 96, 128);
    CHECK(std::abs(k - fine) < 1e-6 * std::max(std::abs(fine), 1e-12));
    CHECK_THROWS_AS(wavelet_kernel(MotherWavelet::mexican_hat(3),
                                   {0.2, 0.6, Eigen::Vector3d(-1, -1, -1), Eigen::Vector3d(1, 1, 1)},
                                   std::vector<double>(3, 0.0), std::vector<double>(3, 0.0)),
                    UnsupportedError);
  }

  TEST_CASE("squared-exponential kernel") {
    const double x = 0.3, y = 1.3;
    CHECK(rbf_kernel(1.0, 2.5, one(x), one(x)) == 2.5);
    CHECK(rbf_kernel(1.0, 1.0, one(x), one(y)) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    CHECK(rbf_kernel(1.0, 1.0, one(x), one(y)) == doctest::Approx(0.60653).epsilon(1e-5));
    double prev = 2.0;
    for (double r = 0.0; r < 5.0; r += 0.1) {
      const double k = rbf_kernel(0.7, 1.0, one(0.0), one(r));
      CHECK(k < prev);
      prev = k;
    }
    CHECK_THROWS_AS(rbf_kernel(0.0, 1.0, one(x), one(y)), ArgumentError);
  }

  TEST_CASE("gram matrices") {
    const PairwiseKernel k = [](std::span<const double> a, std::span<const double> b) {
      return rbf_kernel(0.5, 1.0, a, b);
    };
    Eigen::MatrixXd X1(1, 1);
    X1 << 0.4;
    const Eigen::MatrixXd G1 = gram(k, X1);
    CHECK(G1.rows() == 1);
    CHECK(G1(0, 0) == 1.0);

    const Eigen::MatrixXd Xs = Eigen::MatrixXd::Constant(6, 1, 0.2);
    const Eigen::MatrixXd G = gram(k, Xs);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    CHECK(es.eigenvalues()[5] == doctest::Approx(6.0));
    for (int i = 0; i < 5; ++i) CHECK(std::abs(es.eigenvalues()[i]) < 1e-12);
    CHECK(G == G.transpose());
  }

  TEST_CASE("eigenvalue helpers") {
    CHECK(min_eigenvalue(Eigen::MatrixXd::Identity(5, 5)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(min_eigenvalue(Eigen::Vector3d(3, 1, 2).asDiagonal().toDenseMatrix()) ==
          doctest::Approx(1.0).epsilon(1e-12));
    Eigen::Matrix2d A;
    A << 2, 1, 1, 2;
    CHECK(min_eigenvalue(A) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(max_eigenvalue(A) == doctest::Approx(3.0).epsilon(1e-12));
    Eigen::Matrix2d N;
    N << 2, 1, 0, 2;
    CHECK_THROWS_AS(min_eigenvalue(N), ArgumentError);
  }

  TEST_CASE("random wavelet Gram matrices are positive semi-definite") {
    const auto w = MotherWavelet::mexican_hat(1);
    const auto dist = box1(0.1, 1.0);
    const PairwiseKernel k = [&](std::span<const double> a, std::span<const double> b) {
      return wavelet_kernel(w, dist, a, b);
    };
    for (int set = 0; set < 50; ++set) {
      Eigen::MatrixXd X(20, 1);
      for (int i = 0; i < 20; ++i) {
        CounterStream r(set + 100, stream::kProbe, static_cast<std::uint64_t>(i));
        X(i, 0) = 2 * r.uniform() - 1;
      }
      const Eigen::MatrixXd G = gram(k, X);
      CHECK(min_eigenvalue(G) >= -1e-8 * max_eigenvalue(G));
    }
  }
}
