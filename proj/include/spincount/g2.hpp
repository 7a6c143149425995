#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spincount/clicks.hpp"

namespace spincount {

/// Bins after the pulse: bin j covers [exclusion + j w, exclusion + (j+1) w).
struct G2Binning {
  double exclusion = 100e-6;
  double bin_width = 350e-6;
  std::size_t bins = 21;

  double center(std::size_t j) const noexcept {
    return exclusion + (2.0 * static_cast<double>(j) + 1.0) * 0.5 * bin_width;
  }
};

/// Per-sequence counts in each bin, row-major [sequence][bin].
struct BinnedCounts {
  std::size_t sequences = 0;
  std::size_t bins = 0;
  std::vector<std::uint16_t> counts;

  std::uint16_t at(std::size_t i, std::size_t j) const noexcept { return counts[i * bins + j]; }
  double mean(std::size_t j) const;
};

BinnedCounts bin_counts(const ClickStream& stream, const G2Binning& binning);

/// g2(tau_j) = <n_0 n_j> / (<n_0><n_j>) for j = 1..bins-1. NaN marks an
/// undefined point (zero mean).
std::vector<double> g2_intra(const BinnedCounts& counts);

/// Symmetrized correlation of bins 0 and 1 between sequences k apart, for
/// k = -K..K (index k + K).
std::vector<double> g2_inter(const BinnedCounts& counts, std::size_t max_lag);

/// Generalized variant over all bins, separate from the two-bin estimator
/// above. With N_i the total count of sequence i: g(0) = <N (N - 1)> / <N>^2
/// and g(k) = <N_i N_{i+k}> / <N>^2, index k + K.
std::vector<double> g2_inter_all_bins(const BinnedCounts& counts, std::size_t max_lag);

/// Removes uncorrelated background; throws std::domain_error when A0 A1 = 0.
double g2_background_correct(double g2, double a0, double a1);

/// A_j = (<n_j> - <d>) / <d>.
double signal_to_background(double mean_signal, double mean_dark);

/// Expected g2 of one emitter with background.
double g2_single_emitter_prediction(double n0, double nj, double dark);

struct G2Result {
  std::vector<double> intra_tau;
  std::vector<double> intra;
  std::vector<double> intra_error;
  std::vector<double> intra_prediction;
  std::vector<int> lags;
  std::vector<double> inter;
  std::vector<double> inter_error;
  std::vector<double> corrected;
  std::vector<double> corrected_error;
  std::vector<double> signal_means;  // <n_j>
  std::vector<double> dark_means;    // <d_j>
  double a0 = 0.0;
  double a1 = 0.0;
  std::string dark_source;
  std::size_t sequences = 0;
  std::size_t bootstrap_blocks = 0;
  bool correction_defined = true;
};

struct G2Options {
  G2Binning binning;
  std::size_t max_lag = 10;
  std::size_t bootstrap = 200;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
};

/// Full estimator set. Dark means come from `no_pulse` when given, else from
/// the last `bins / 3` bins of the signal stream. Error bars are a block
/// bootstrap over consecutive sequences.
G2Result analyze_g2(const ClickStream& signal, const ClickStream* no_pulse, const G2Options& options);

}  // namespace spincount
