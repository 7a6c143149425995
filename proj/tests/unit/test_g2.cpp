#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spincount/engine.hpp"
#include "spincount/g2.hpp"
#include "spincount/rng.hpp"

using namespace spincount;

namespace {

BinnedCounts random_counts(std::size_t n, std::size_t bins, double mean, std::uint64_t seed) {
  BinnedCounts c{n, bins, std::vector<std::uint16_t>(n * bins)};
  CounterRng rng(seed, 0, 0, StreamId::kSpinDynamics);
  for (auto& v : c.counts) v = static_cast<std::uint16_t>(rng.poisson(mean));
  return c;
}

std::vector<std::vector<int>> rows(const BinnedCounts& c) {
  std::vector<std::vector<int>> out(c.sequences, std::vector<int>(c.bins));
  for (std::size_t i = 0; i < c.sequences; ++i) {
    for (std::size_t j = 0; j < c.bins; ++j) out[i][j] = c.at(i, j);
  }
  return out;
}

}  // namespace

TEST_CASE("inter-sequence estimator matches the naive sum") {
  const auto c = random_counts(3000, 4, 0.8, 1);
  const auto n = rows(c);
  const std::size_t K = 7;
  const auto g = g2_inter(c, K);
  REQUIRE(g.size() == 2 * K + 1);
  for (int k = 0; k <= static_cast<int>(K); ++k) {
    const double want = 0.5 * (oracle::g2_pair(n, 0, 1, k) + oracle::g2_pair(n, 1, 0, k));
    // The library normalizes by all-sequence means, as the oracle does.
    CHECK(g[K + k] == doctest::Approx(want).epsilon(1e-12));
    CHECK(g[K - k] == g[K + k]);
  }
  const auto intra = g2_intra(c);
  for (std::size_t j = 1; j < c.bins; ++j) {
    CHECK(intra[j - 1] == doctest::Approx(oracle::g2_pair(n, 0, j, 0)).epsilon(1e-12));
  }
}

TEST_CASE("all-bins estimator matches the naive sum") {
  const auto c = random_counts(2000, 5, 0.3, 2);
  std::vector<double> total(c.sequences, 0.0);
  double mean = 0;
  for (std::size_t i = 0; i < c.sequences; ++i) {
    for (std::size_t j = 0; j < c.bins; ++j) total[i] += c.at(i, j);
    mean += total[i] / c.sequences;
  }
  const auto g = g2_inter_all_bins(c, 3);
  double s0 = 0;
  for (double t : total) s0 += t * (t - 1);
  CHECK(g[3] == doctest::Approx(s0 / c.sequences / (mean * mean)).epsilon(1e-12));
  double s2 = 0;
  for (std::size_t i = 0; i + 2 < c.sequences; ++i) s2 += total[i] * total[i + 2];
  CHECK(g[5] == doctest::Approx(s2 / (c.sequences - 2) / (mean * mean)).epsilon(1e-12));
  CHECK(g[1] == g[5]);
  // Poisson totals are uncorrelated.
  CHECK(g[3] == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("background correction leaves an uncorrelated value at one") {
  CounterRng rng(4, 0, 0, StreamId::kSpinDynamics);
  for (int i = 0; i < 1000; ++i) {
    const double a0 = 0.01 + 20 * rng.uniform();
    const double a1 = 0.01 + 20 * rng.uniform();
    CHECK(g2_background_correct(1.0, a0, a1) == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Pure background coincidences at g2 = 1 / (1 + A0) / (1 + A1) scale map to zero.
  const double a = 2.0;
  CHECK(g2_background_correct((2 * a + 1) / ((1 + a) * (1 + a)), a, a) == doctest::Approx(0.0).scale(1.0));
  CHECK_THROWS_AS(g2_background_correct(1.0, 0.0, 1.0), std::domain_error);
  CHECK(signal_to_background(3.0, 1.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(signal_to_background(3.0, 0.0), std::domain_error);
}

TEST_CASE("single emitter prediction") {
  // No background beyond the dark mean: n0 = nj = d gives 1.
  CHECK(g2_single_emitter_prediction(0.1, 0.1, 0.1) == doctest::Approx(1.0));
  CHECK(g2_single_emitter_prediction(0.3, 0.2, 0.05) < 1.0);
  CHECK_THROWS(g2_single_emitter_prediction(0.3, 0.2, 0.0));
}

TEST_CASE("constructed bunching and antibunching") {
  const std::size_t n = 1000;
  BinnedCounts bunched{n, 2, std::vector<std::uint16_t>(2 * n)};
  BinnedCounts single{n, 2, std::vector<std::uint16_t>(2 * n)};
  CounterRng rng(8, 0, 0, StreamId::kSpinDynamics);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint16_t v = (i % 2) ? 2 : 0;
    bunched.counts[2 * i] = bunched.counts[2 * i + 1] = v;
    // One photon per sequence, landing in bin 0 or bin 1.
    const bool first = rng.bernoulli(0.5);
    single.counts[2 * i] = first;
    single.counts[2 * i + 1] = !first;
  }
  const auto gb = g2_inter(bunched, 2);
  CHECK(gb[2] == doctest::Approx(2.0));
  CHECK(gb[3] == doctest::Approx(0.0));  // alternating sequences
  const auto gs = g2_inter(single, 5);
  CHECK(gs[5] == 0.0);
  for (int k = 1; k <= 5; ++k) CHECK(gs[5 + k] == doctest::Approx(1.0).epsilon(0.12));
}

TEST_CASE("estimator argument checks") {
  const auto c = random_counts(50, 2, 1.0, 3);
  CHECK_THROWS(g2_inter(c, 6));
  CHECK_THROWS(g2_inter(BinnedCounts{50, 1, std::vector<std::uint16_t>(50)}, 1));
  ClickStream s(2e-3, 12.8e-6);
  s.append_sequence({});
  CHECK_THROWS(bin_counts(s, G2Binning{}));
}

TEST_CASE("bootstrap error bars match the scatter of repeated runs") {
  Hardware hw;
  hw.detector.dark_rate = 2000.0;
  const auto seq = PulseSequence::empty(7.5e-3, 2e-3);
  G2Options opt;
  opt.max_lag = 3;
  opt.bootstrap = 100;
  std::vector<double> g0;
  double err = 0;
  const int runs = 40;
  for (int r = 0; r < runs; ++r) {
    const auto sim = simulate(hw, {}, seq, 20000, 100 + r);
    const auto res = analyze_g2(sim.clicks, nullptr, opt);
    CHECK(res.dark_source == "signal trace tail");
    g0.push_back(res.inter[3]);
    err += res.inter_error[3] / runs;
  }
  double m = 0, v = 0;
  for (double x : g0) m += x / runs;
  for (double x : g0) v += (x - m) * (x - m) / (runs - 1);
  const double scatter = std::sqrt(v);
  CHECK(m == doctest::Approx(1.0).epsilon(0.02));
  CHECK(err / scatter > 1.0 / 1.5);
  CHECK(err / scatter < 1.5);
}
