#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "spincount/engine.hpp"
#include "spincount/rng.hpp"

using namespace spincount;

TEST_CASE("philox known answers") {
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) ==
        PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and distinct") {
  CounterRng a(7, 3, 2, StreamId::kSpinDynamics);
  CounterRng b(7, 3, 2, StreamId::kSpinDynamics);
  CounterRng c(7, 3, 2, StreamId::kDarkCounts);
  CounterRng d(7, 4, 2, StreamId::kSpinDynamics);
  int same_c = 0, same_d = 0;
  for (int i = 0; i < 64; ++i) {
    const auto x = a.next_u32();
    CHECK(x == b.next_u32());
    same_c += x == c.next_u32();
    same_d += x == d.next_u32();
  }
  CHECK(same_c < 2);
  CHECK(same_d < 2);
}

TEST_CASE("derived seeds differ by tag and seed") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 20; ++s) {
    for (std::uint64_t t = 0; t < 20; ++t) seen.insert(derive_seed(s, t));
  }
  CHECK(seen.size() == 400);
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
}

TEST_CASE("distribution moments") {
  CounterRng rng(11, 0, 0, StreamId::kSpinDynamics);
  const int n = 200000;
  double su = 0, su2 = 0, se = 0, sg = 0, sg2 = 0, sp = 0, sp2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    su += u;
    su2 += u * u;
    se += rng.exponential(4.0);
    const double g = rng.gaussian();
    sg += g;
    sg2 += g * g;
    const double p = static_cast<double>(rng.poisson(3.5));
    sp += p;
    sp2 += p * p;
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.005));
  CHECK(su2 / n - std::pow(su / n, 2) == doctest::Approx(1.0 / 12).epsilon(0.01));
  CHECK(se / n == doctest::Approx(0.25).epsilon(0.01));
  CHECK(std::abs(sg / n) < 0.01);
  CHECK(sg2 / n == doctest::Approx(1.0).epsilon(0.01));
  CHECK(sp / n == doctest::Approx(3.5).epsilon(0.01));
  CHECK(sp2 / n - std::pow(sp / n, 2) == doctest::Approx(3.5).epsilon(0.02));
}

TEST_CASE("poisson large mean and below") {
  CounterRng rng(5, 1, 0, StreamId::kSpinDynamics);
  double s = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) s += static_cast<double>(rng.poisson(400.0));
  CHECK(s / n == doctest::Approx(400.0).epsilon(0.005));
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto k = rng.below(7);
    REQUIRE(k < 7);
    ++hist[k];
  }
  for (int h : hist) CHECK(std::abs(h - 10000) < 500);
}
