#include <cmath>

#include "doctest.h"
#include "rwf/quadrature.hpp"

using namespace rwf;

TEST_SUITE("quadrature") {
  TEST_CASE("exact for polynomials up to degree 2n - 1") {
    for (int n : {1, 2, 5, 8, 16, 33}) {
      const auto& rule = gauss_legendre(n);
      REQUIRE(rule.nodes.size() == static_cast<std::size_t>(n));
      for (int k = 0; k <= 2 * n - 1; ++k) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], k);
        const double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
        CHECK(sum == doctest::Approx(exact).epsilon(1e-12).scale(1.0));
      }
    }
  }

  TEST_CASE("mapped rule integrates on [a, b]") {
    const auto rule = gauss_legendre(20, 0.0, M_PI);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * std::sin(rule.nodes[i]);
    CHECK(sum == doctest::Approx(2.0).epsilon(1e-13));
  }
}
