#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "spincount/analysis.hpp"
#include "spincount/rng.hpp"

using namespace spincount;

namespace {

constexpr double kCycle = 12.8e-6;

Click at(double t) { return {static_cast<std::uint32_t>(t / kCycle), t}; }

// Sequence i gets (i % 4) clicks early in the record and one late click.
ClickStream pattern(std::size_t n) {
  ClickStream c(7.5e-3, kCycle);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Click> v;
    for (std::size_t k = 0; k < i % 4; ++k) v.push_back(at(100e-6 * (k + 1)));
    v.push_back(at(3e-3));
    c.append_sequence(v);
  }
  return c;
}

}  // namespace

TEST_CASE("window counts and averages") {
  const auto c = pattern(8);
  const auto w = window_counts(c, 0.0, 2e-3);
  CHECK(w == std::vector<std::uint32_t>{0, 1, 2, 3, 0, 1, 2, 3});
  const auto m = average_counts(c, 2e-3);
  CHECK(m.mean == doctest::Approx(1.5));
  CHECK(m.samples == 8);
  CHECK(m.sem == doctest::Approx(std::sqrt(1.25 * 8 / 7 / 8)));
  // Everything early sits in the first half of a 6 ms window; the late click in the second.
  const auto t = corrected_counts(c, 6e-3);
  CHECK(t.mean == doctest::Approx(0.5));
  CHECK_THROWS(average_counts(c, 8e-3));
}

TEST_CASE("count histogram blocks") {
  const auto c = pattern(10);
  // Blocks of 4 sequences, the trailing two dropped.
  const auto h = count_histogram(c, ProtocolParams{7.5e-3, 2e-3, 30e-3});
  CHECK(h.sequences_per_block == 4);
  CHECK(h.block_counts == std::vector<std::uint64_t>{6, 6});
  CHECK(h.mean == doctest::Approx(6.0));
  CHECK(h.variance == doctest::Approx(0.0));
  CHECK(h.insufficient);
  CHECK(h.frequency.size() == 7);
  CHECK(h.frequency[6] == 2);
  CHECK(normalized_histogram(h)[6] == doctest::Approx(1.0));
}

TEST_CASE("poisson pmf identities") {
  for (double mu : {0.3, 5.5, 28.0, 40.0}) {
    const auto p = poisson_pmf(mu, 200);
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    double mean = 0, second = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      mean += k * p[k];
      second += static_cast<double>(k * k) * p[k];
      CHECK(p[k] == doctest::Approx(oracle::poisson_pmf(mu, static_cast<int>(k))).epsilon(1e-10));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mean == doctest::Approx(mu).epsilon(1e-10));
    CHECK(second - mean * mean == doctest::Approx(mu).epsilon(1e-9));
  }
  CHECK(poisson_pmf(0.0, 3) == std::vector<double>{1.0, 0.0, 0.0, 0.0});
}

TEST_CASE("histogram comparison") {
  CountHistogram a, b;
  a.mean = 28.0;
  a.poisson_sigma = std::sqrt(28.0);
  b.mean = 40.0;
  b.poisson_sigma = std::sqrt(40.0);
  const auto c = compare_histograms(a, b);
  CHECK(c.c_spin == doctest::Approx(12.0));
  CHECK(c.delta_c0 == doctest::Approx(std::sqrt(28.0)));
  CHECK(c.snr == doctest::Approx(12.0 / std::sqrt(40.0)));
}

TEST_CASE("fluorescence trace of an exponential") {
  const double tau = 1e-3;
  ClickStream c(7.5e-3, kCycle);
  CounterRng rng(2, 0, 0, StreamId::kSpinDynamics);
  const std::size_t n = 200000;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = rng.exponential(1.0 / tau);
    if (t < 7.5e-3) {
      c.append_sequence({at(t)});
    } else {
      c.append_sequence({});
    }
  }
  const auto tr = fluorescence_trace(c, 100e-6);
  REQUIRE(tr.rate.size() == 75);
  for (std::size_t b = 0; b < 20; ++b) {
    const double lo = b * 100e-6, hi = lo + 100e-6;
    const double want = (std::exp(-lo / tau) - std::exp(-hi / tau)) / 100e-6;
    CHECK(std::abs(tr.rate[b] - want) < 4 * tr.error[b]);
  }
  CHECK_THROWS(fluorescence_trace(c, 1e-6));
}

TEST_CASE("dark estimates") {
  ClickStream c(10e-3, kCycle);
  for (int i = 0; i < 100; ++i) c.append_sequence({at(1e-3), at(6e-3), at(8e-3)});
  const auto ref = dark_from_reference(c, 0.0, 2e-3);
  CHECK(ref.per_window == doctest::Approx(1.0));
  const auto tail = dark_from_tail(c, 5e-3, 0.0, 2e-3);
  CHECK(tail.rate == doctest::Approx(2.0 / 5e-3));
  CHECK(tail.per_window == doctest::Approx(0.8));
  CHECK_THROWS(dark_from_tail(c, 20e-3, 0.0, 2e-3));
}

TEST_CASE("peak finding") {
  std::vector<double> x, y, e;
  for (int i = 0; i <= 100; ++i) {
    const double xi = i * 0.01;
    x.push_back(xi);
    y.push_back(10 * std::exp(-std::pow((xi - 0.3) / 0.02, 2)) + 5 * std::exp(-std::pow((xi - 0.7) / 0.02, 2)) +
                3 * std::exp(-std::pow((xi - 0.75) / 0.02, 2)));
    e.push_back(0.5);
  }
  auto peaks = find_peaks(x, y, e, 5.0, 0.1);
  REQUIRE(peaks.size() == 2);
  CHECK(peaks[0].position == doctest::Approx(0.3));
  CHECK(peaks[1].position == doctest::Approx(0.7));
  CHECK(peaks[0].significance == doctest::Approx(20.0).epsilon(0.01));
  // Without suppression the shoulder counts too; a high threshold drops the rest.
  CHECK(find_peaks(x, y, e, 5.0, 0.01).size() == 3);
  CHECK(find_peaks(x, y, e, 15.0, 0.1).size() == 1);
  CHECK_THROWS(find_peaks(x, y, {}, 5.0, 0.1));
}
