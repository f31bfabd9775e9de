#pragma once

#include <vector>

namespace rwf {

// Gauss-Legendre nodes and weights on an interval.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point rule on [-1, 1], exact for polynomials of degree <= 2n - 1.
// Rules are cached per n; the returned reference stays valid for the
// lifetime of the process.
const GaussLegendreRule& gauss_legendre(int n);

// The n-point rule mapped to [a, b].
GaussLegendreRule gauss_legendre(int n, double a, double b);

}  // namespace rwf
