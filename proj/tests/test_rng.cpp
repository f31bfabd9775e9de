#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "rwf/rng.hpp"

using namespace rwf;

TEST_SUITE("rng") {
  // Known-answer vectors from the Random123 distribution (kat_vectors).
  TEST_CASE("philox4x32-10 known answers") {
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
          PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
  }

  TEST_CASE("streams are pure functions of their key") {
    CounterStream a(7, stream::kRwfFeatures, 3), b(7, stream::kRwfFeatures, 3);
    for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
    CounterStream c(7, stream::kRwfFeatures, 4), d(7, stream::kRffFeatures, 3);
    CounterStream e(7, stream::kRwfFeatures, 3);
    const auto first = e.next_u64();
    CHECK(c.next_u64() != first);
    CHECK(d.next_u64() != first);
  }

  TEST_CASE("uniform and normal moments") {
    const int n = 200000;
    double su = 0.0, su2 = 0.0, sn = 0.0, sn2 = 0.0;
    double umin = 1.0, umax = 0.0;
    for (int i = 0; i < n; ++i) {
      CounterStream r(1, stream::kProbe, static_cast<std::uint64_t>(i));
      const double u = r.uniform();
      const double z = r.normal();
      su += u;
      su2 += u * u;
      sn += z;
      sn2 += z * z;
      umin = std::min(umin, u);
      umax = std::max(umax, u);
    }
    CHECK(umin >= 0.0);
    CHECK(umax < 1.0);
    CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(su2 / n - (su / n) * (su / n) == doctest::Approx(1.0 / 12.0).epsilon(0.02));
    CHECK(std::abs(sn / n) < 0.01);
    CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
  }

  TEST_CASE("mix_seed separates salts") {
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t r = 0; r < 100; ++r) seeds.push_back(mix_seed(42, r));
    std::sort(seeds.begin(), seeds.end());
    CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
    CHECK(mix_seed(42, 1) == mix_seed(42, 1));
  }
}
