#include "spincount/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace spincount {

namespace {

void require_sequences(const ClickStream& stream) {
  if (stream.sequence_count() == 0) throw StatisticalError("click stream has no sequences");
}

void require_window(const ClickStream& stream, double window) {
  if (!(window > 0.0)) throw std::invalid_argument("window must be > 0");
  if (window > stream.record_length() * (1.0 + 1e-12)) {
    throw std::invalid_argument(fmt::format("window {} s exceeds the record length {} s", window,
                                            stream.record_length()));
  }
}

template <typename T>
Estimate estimate(const std::vector<T>& v) {
  Estimate e;
  e.samples = v.size();
  if (v.empty()) return e;
  double sum = 0.0;
  for (T x : v) sum += static_cast<double>(x);
  e.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (T x : v) ss += (static_cast<double>(x) - e.mean) * (static_cast<double>(x) - e.mean);
    e.sem = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return e;
}

}  // namespace

std::vector<std::uint32_t> window_counts(const ClickStream& stream, double lo, double hi) {
  std::vector<std::uint32_t> out(stream.sequence_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint32_t>(stream.count_in(i, lo, hi));
  }
  return out;
}

Estimate average_counts(const ClickStream& stream, double window) {
  require_sequences(stream);
  require_window(stream, window);
  return estimate(window_counts(stream, 0.0, window));
}

Estimate corrected_counts(const ClickStream& stream, double window) {
  return summarize_counts(stream, window).c_tilde;
}

CountSummary summarize_counts(const ClickStream& stream, double window) {
  require_sequences(stream);
  require_window(stream, window);
  CountSummary s;
  s.window = window;
  s.first_half = window_counts(stream, 0.0, 0.5 * window);
  s.second_half = window_counts(stream, 0.5 * window, window);
  std::vector<double> total(s.first_half.size());
  std::vector<double> diff(s.first_half.size());
  for (std::size_t i = 0; i < total.size(); ++i) {
    total[i] = static_cast<double>(s.first_half[i]) + s.second_half[i];
    diff[i] = static_cast<double>(s.first_half[i]) - s.second_half[i];
  }
  s.c_mean = estimate(total);
  s.c_tilde = estimate(diff);
  return s;
}

CountHistogram count_histogram(const ClickStream& stream, const ProtocolParams& params) {
  params.validate();
  require_sequences(stream);
  require_window(stream, params.t_d);
  CountHistogram h;
  h.sequences_per_block = params.sequences();
  if (h.sequences_per_block == 0) throw std::invalid_argument("t_m / t_r must be >= 1");
  const auto counts = window_counts(stream, 0.0, params.t_d);
  const std::size_t blocks = counts.size() / h.sequences_per_block;
  h.block_counts.resize(blocks, 0);
  for (std::size_t b = 0; b < blocks; ++b) {
    for (std::size_t k = 0; k < h.sequences_per_block; ++k) {
      h.block_counts[b] += counts[b * h.sequences_per_block + k];
    }
  }
  h.insufficient = blocks < 10;
  if (blocks == 0) return h;
  const auto max_count = *std::max_element(h.block_counts.begin(), h.block_counts.end());
  h.frequency.assign(max_count + 1, 0);
  double sum = 0.0;
  for (auto c : h.block_counts) {
    ++h.frequency[c];
    sum += static_cast<double>(c);
  }
  h.mean = sum / static_cast<double>(blocks);
  if (blocks > 1) {
    double ss = 0.0;
    for (auto c : h.block_counts) ss += (static_cast<double>(c) - h.mean) * (static_cast<double>(c) - h.mean);
    h.variance = ss / static_cast<double>(blocks - 1);
  }
  h.poisson_sigma = std::sqrt(h.mean);
  return h;
}

std::vector<double> normalized_histogram(const CountHistogram& h) {
  std::vector<double> p(h.frequency.size());
  const double n = static_cast<double>(h.block_counts.size());
  for (std::size_t c = 0; c < p.size(); ++c) p[c] = static_cast<double>(h.frequency[c]) / n;
  return p;
}

std::vector<double> poisson_pmf(double mean, std::size_t max_count) {
  std::vector<double> p(max_count + 1);
  for (std::size_t k = 0; k <= max_count; ++k) {
    const double kk = static_cast<double>(k);
    p[k] = mean == 0.0 ? (k == 0 ? 1.0 : 0.0)
                       : std::exp(kk * std::log(mean) - mean - std::lgamma(kk + 1.0));
  }
  return p;
}

SignalComparison compare_histograms(const CountHistogram& no_pulse, const CountHistogram& pi) {
  SignalComparison c;
  c.c_spin = pi.mean - no_pulse.mean;
  c.delta_c0 = no_pulse.poisson_sigma;
  c.delta_cpi = pi.poisson_sigma;
  c.snr = c.delta_cpi > 0.0 ? c.c_spin / c.delta_cpi : 0.0;
  c.insufficient = no_pulse.insufficient || pi.insufficient;
  return c;
}

FluorescenceTrace fluorescence_trace(const ClickStream& stream, double bin_width) {
  require_sequences(stream);
  if (bin_width < stream.cycle_duration()) {
    throw std::invalid_argument("bin width is smaller than the detector cycle");
  }
  FluorescenceTrace tr;
  tr.bin_width = bin_width;
  tr.sequences = stream.sequence_count();
  const auto bins = static_cast<std::size_t>(std::floor(stream.record_length() / bin_width + 1e-9));
  tr.counts.assign(bins, 0.0);
  for (std::size_t i = 0; i < stream.sequence_count(); ++i) {
    for (const Click& c : stream.sequence(i)) {
      const auto b = static_cast<std::size_t>(c.timestamp / bin_width);
      if (b < bins) tr.counts[b] += 1.0;
    }
  }
  const double norm = 1.0 / (static_cast<double>(tr.sequences) * bin_width);
  for (std::size_t b = 0; b < bins; ++b) {
    tr.time.push_back((static_cast<double>(b) + 0.5) * bin_width);
    tr.rate.push_back(tr.counts[b] * norm);
    tr.error.push_back(std::sqrt(std::max(tr.counts[b], 1.0)) * norm);
  }
  return tr;
}

DarkEstimate dark_from_reference(const ClickStream& no_pulse, double lo, double hi) {
  require_sequences(no_pulse);
  const auto counts = window_counts(no_pulse, lo, hi);
  DarkEstimate d;
  d.per_window = estimate(counts).mean;
  d.rate = d.per_window / (hi - lo);
  d.source = "no-pulse reference series";
  return d;
}

DarkEstimate dark_from_tail(const ClickStream& stream, double tail_start, double lo, double hi) {
  require_sequences(stream);
  if (!(tail_start < stream.record_length())) throw std::invalid_argument("tail starts after the record");
  const auto counts = window_counts(stream, tail_start, stream.record_length());
  DarkEstimate d;
  d.rate = estimate(counts).mean / (stream.record_length() - tail_start);
  d.per_window = d.rate * (hi - lo);
  d.source = fmt::format("trace tail from {} s", tail_start);
  return d;
}

std::vector<Peak> find_peaks(const std::vector<double>& x, const std::vector<double>& y,
                             const std::vector<double>& err, double threshold,
                             double min_separation) {
  if (x.size() != y.size() || y.size() != err.size()) throw std::invalid_argument("size mismatch");
  std::vector<Peak> candidates;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const bool left = i == 0 || y[i] >= y[i - 1];
    const bool right = i + 1 == y.size() || y[i] > y[i + 1];
    const double sig = err[i] > 0.0 ? y[i] / err[i] : 0.0;
    if (left && right && sig >= threshold) candidates.push_back({x[i], y[i], sig, i});
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Peak& a, const Peak& b) { return a.height > b.height; });
  std::vector<Peak> kept;
  for (const Peak& p : candidates) {
    const bool close = std::any_of(kept.begin(), kept.end(), [&](const Peak& q) {
      return std::abs(q.position - p.position) < min_separation;
    });
    if (!close) kept.push_back(p);
  }
  std::sort(kept.begin(), kept.end(), [](const Peak& a, const Peak& b) { return a.position < b.position; });
  return kept;
}

}  // namespace spincount
