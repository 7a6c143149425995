#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spincount/clicks.hpp"
#include "spincount/model.hpp"

namespace spincount {

struct StatisticalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Mean and standard error of a per-sequence quantity.
struct Estimate {
  double mean = 0.0;
  double sem = 0.0;
  std::size_t samples = 0;
};

/// Clicks of every sequence in [lo, hi).
std::vector<std::uint32_t> window_counts(const ClickStream& stream, double lo, double hi);

/// <C>: clicks in [0, T) averaged over sequences.
Estimate average_counts(const ClickStream& stream, double window);

/// <C~>: clicks in [0, T/2) minus clicks in [T/2, T), averaged.
Estimate corrected_counts(const ClickStream& stream, double window);

struct CountSummary {
  Estimate c_mean;
  Estimate c_tilde;
  double window = 0.0;
  std::vector<std::uint32_t> first_half;
  std::vector<std::uint32_t> second_half;
};

CountSummary summarize_counts(const ClickStream& stream, double window);

/// Integrated counts per measurement block of t_m.
struct CountHistogram {
  std::vector<std::uint64_t> block_counts;
  std::vector<std::uint64_t> frequency;  // frequency[C] = blocks with C counts
  double mean = 0.0;                     // maximum-likelihood Poisson mean
  double variance = 0.0;                 // sample variance
  double poisson_sigma = 0.0;            // sqrt(mean)
  std::size_t sequences_per_block = 0;
  bool insufficient = false;             // fewer than 10 blocks
};

/// Sums the first `window` seconds of each sequence over consecutive blocks of
/// llround(t_m / t_r) sequences. A trailing partial block is dropped.
CountHistogram count_histogram(const ClickStream& stream, const ProtocolParams& params);

/// Normalized histogram p(C) and the matching Poisson pmf for plotting.
std::vector<double> normalized_histogram(const CountHistogram& h);
std::vector<double> poisson_pmf(double mean, std::size_t max_count);

struct SignalComparison {
  double c_spin = 0.0;     // mean(pi) - mean(no pulse)
  double delta_c0 = 0.0;   // Poisson width of the no-pulse histogram
  double delta_cpi = 0.0;  // Poisson width of the pi histogram
  double snr = 0.0;        // c_spin / delta_cpi
  bool insufficient = false;
};

SignalComparison compare_histograms(const CountHistogram& no_pulse, const CountHistogram& pi);

/// Average click rate versus time after the pulse block.
struct FluorescenceTrace {
  std::vector<double> time;  // bin centers
  std::vector<double> rate;  // counts / s
  std::vector<double> error; // Poisson standard error of the rate
  std::vector<double> counts;
  double bin_width = 0.0;
  std::size_t sequences = 0;
};

FluorescenceTrace fluorescence_trace(const ClickStream& stream, double bin_width);

/// Dark-rate estimate and where it came from.
struct DarkEstimate {
  double rate = 0.0;  // counts / s
  double per_window = 0.0;
  std::string source;
};

DarkEstimate dark_from_reference(const ClickStream& no_pulse, double lo, double hi);
DarkEstimate dark_from_tail(const ClickStream& stream, double tail_start, double lo, double hi);

struct Peak {
  double position = 0.0;
  double height = 0.0;
  double significance = 0.0;  // height / error
  std::size_t index = 0;
};

/// Local maxima of y that exceed `threshold` standard errors, with lower
/// maxima within `min_separation` of a higher one suppressed.
std::vector<Peak> find_peaks(const std::vector<double>& x, const std::vector<double>& y,
                             const std::vector<double>& err, double threshold,
                             double min_separation);

}  // namespace spincount
