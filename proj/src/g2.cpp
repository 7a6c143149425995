#include "spincount/g2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spincount/parallel.hpp"
#include "spincount/rng.hpp"

namespace spincount {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct SignalBlock {
  double sequences = 0.0;
  std::vector<double> sum;     // per bin
  std::vector<double> sum0j;   // n_0 n_j per bin
  std::vector<double> cross;   // per lag
  std::vector<double> pairs;   // per lag
};

struct DarkBlock {
  double sequences = 0.0;
  std::vector<double> sum;
};

struct Statistics {
  std::vector<double> intra;
  std::vector<double> prediction;
  std::vector<double> inter;  // lags 0..K
  std::vector<double> corrected;
  std::vector<double> means;
  std::vector<double> dark;
  double a0 = 0.0;
  double a1 = 0.0;
  bool defined = true;
};

std::vector<SignalBlock> signal_blocks(const BinnedCounts& c, std::size_t max_lag, std::size_t n_blocks) {
  std::vector<SignalBlock> blocks(n_blocks);
  const std::size_t n = c.sequences;
  for (std::size_t b = 0; b < n_blocks; ++b) {
    SignalBlock& blk = blocks[b];
    blk.sum.assign(c.bins, 0.0);
    blk.sum0j.assign(c.bins, 0.0);
    blk.cross.assign(max_lag + 1, 0.0);
    blk.pairs.assign(max_lag + 1, 0.0);
    const std::size_t lo = n * b / n_blocks;
    const std::size_t hi = n * (b + 1) / n_blocks;
    blk.sequences = static_cast<double>(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) {
      const double n0 = c.at(i, 0);
      for (std::size_t j = 0; j < c.bins; ++j) {
        blk.sum[j] += c.at(i, j);
        blk.sum0j[j] += n0 * c.at(i, j);
      }
      if (c.bins < 2) continue;
      const double n1 = c.at(i, 1);
      for (std::size_t k = 0; k <= max_lag && i + k < n; ++k) {
        blk.cross[k] += 0.5 * (n0 * c.at(i + k, 1) + n1 * c.at(i + k, 0));
        blk.pairs[k] += 1.0;
      }
    }
  }
  return blocks;
}

std::vector<DarkBlock> dark_blocks(const BinnedCounts& c, std::size_t n_blocks) {
  std::vector<DarkBlock> blocks(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    DarkBlock& blk = blocks[b];
    blk.sum.assign(c.bins, 0.0);
    const std::size_t lo = c.sequences * b / n_blocks;
    const std::size_t hi = c.sequences * (b + 1) / n_blocks;
    blk.sequences = static_cast<double>(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t j = 0; j < c.bins; ++j) blk.sum[j] += c.at(i, j);
    }
  }
  return blocks;
}

double ratio(double num, double den) { return den > 0.0 ? num / den : kNaN; }

Statistics compute(const std::vector<const SignalBlock*>& sig, const std::vector<const DarkBlock*>& dark,
                   std::size_t bins, std::size_t max_lag, std::size_t tail_bins) {
  Statistics st;
  double n = 0.0;
  std::vector<double> sum(bins, 0.0), sum0j(bins, 0.0), cross(max_lag + 1, 0.0), pairs(max_lag + 1, 0.0);
  for (const SignalBlock* b : sig) {
    n += b->sequences;
    for (std::size_t j = 0; j < bins; ++j) {
      sum[j] += b->sum[j];
      sum0j[j] += b->sum0j[j];
    }
    for (std::size_t k = 0; k <= max_lag; ++k) {
      cross[k] += b->cross[k];
      pairs[k] += b->pairs[k];
    }
  }
  st.means.resize(bins);
  for (std::size_t j = 0; j < bins; ++j) st.means[j] = sum[j] / n;

  st.dark.assign(bins, 0.0);
  if (!dark.empty()) {
    double nd = 0.0;
    for (const DarkBlock* b : dark) {
      nd += b->sequences;
      for (std::size_t j = 0; j < bins; ++j) st.dark[j] += b->sum[j];
    }
    for (double& d : st.dark) d /= nd;
  } else {
    double tail = 0.0;
    for (std::size_t j = bins - tail_bins; j < bins; ++j) tail += st.means[j];
    st.dark.assign(bins, tail / static_cast<double>(tail_bins));
  }

  const double m0 = st.means[0];
  for (std::size_t j = 1; j < bins; ++j) {
    st.intra.push_back(ratio(sum0j[j] / n, m0 * st.means[j]));
    st.prediction.push_back(st.dark[j] > 0.0 && m0 > 0.0 && st.means[j] > 0.0
                                ? g2_single_emitter_prediction(m0, st.means[j], st.dark[j])
                                : kNaN);
  }
  const double m1 = bins > 1 ? st.means[1] : kNaN;
  for (std::size_t k = 0; k <= max_lag; ++k) st.inter.push_back(ratio(cross[k] / pairs[k], m0 * m1));

  st.a0 = st.dark[0] > 0.0 ? signal_to_background(m0, st.dark[0]) : kNaN;
  st.a1 = bins > 1 && st.dark[1] > 0.0 ? signal_to_background(m1, st.dark[1]) : kNaN;
  st.defined = std::isfinite(st.a0) && std::isfinite(st.a1) && st.a0 * st.a1 != 0.0;
  for (double g : st.inter) st.corrected.push_back(st.defined ? g2_background_correct(g, st.a0, st.a1) : kNaN);
  return st;
}

std::vector<double> stddev(const std::vector<std::vector<double>>& samples, std::size_t size) {
  std::vector<double> out(size, kNaN);
  for (std::size_t p = 0; p < size; ++p) {
    double s = 0.0, ss = 0.0;
    std::size_t m = 0;
    for (const auto& v : samples) {
      if (!std::isfinite(v[p])) continue;
      s += v[p];
      ss += v[p] * v[p];
      ++m;
    }
    if (m > 1) {
      const double mean = s / static_cast<double>(m);
      out[p] = std::sqrt(std::max(0.0, (ss - static_cast<double>(m) * mean * mean) / static_cast<double>(m - 1)));
    }
  }
  return out;
}

std::vector<double> mirror(const std::vector<double>& half) {
  std::vector<double> out;
  for (std::size_t k = half.size(); k-- > 1;) out.push_back(half[k]);
  out.insert(out.end(), half.begin(), half.end());
  return out;
}

}  // namespace

double BinnedCounts::mean(std::size_t j) const {
  double s = 0.0;
  for (std::size_t i = 0; i < sequences; ++i) s += at(i, j);
  return sequences ? s / static_cast<double>(sequences) : 0.0;
}

BinnedCounts bin_counts(const ClickStream& stream, const G2Binning& binning) {
  if (binning.bins < 2 || !(binning.bin_width > 0.0)) throw std::invalid_argument("need >= 2 bins of positive width");
  const double end = binning.exclusion + binning.bin_width * static_cast<double>(binning.bins);
  if (end > stream.record_length() * (1.0 + 1e-9)) {
    throw std::invalid_argument("g2 bins extend past the record length");
  }
  BinnedCounts c;
  c.sequences = stream.sequence_count();
  c.bins = binning.bins;
  c.counts.assign(c.sequences * c.bins, 0);
  for (std::size_t i = 0; i < c.sequences; ++i) {
    for (const Click& click : stream.sequence(i)) {
      const double rel = click.timestamp - binning.exclusion;
      if (rel < 0.0) continue;
      const auto j = static_cast<std::size_t>(rel / binning.bin_width);
      if (j < c.bins) ++c.counts[i * c.bins + j];
    }
  }
  return c;
}

std::vector<double> g2_intra(const BinnedCounts& c) {
  if (c.bins < 2) throw std::invalid_argument("g2_intra needs >= 2 bins");
  std::vector<const SignalBlock*> sig;
  const auto blocks = signal_blocks(c, 0, 1);
  sig.push_back(&blocks[0]);
  return compute(sig, {}, c.bins, 0, 1).intra;
}

std::vector<double> g2_inter(const BinnedCounts& c, std::size_t max_lag) {
  if (c.bins < 2) throw std::invalid_argument("g2_inter needs >= 2 bins");
  if (max_lag > c.sequences / 10) throw std::invalid_argument("lag range exceeds a tenth of the sequences");
  const auto blocks = signal_blocks(c, max_lag, 1);
  std::vector<const SignalBlock*> sig{&blocks[0]};
  return mirror(compute(sig, {}, c.bins, max_lag, 1).inter);
}

std::vector<double> g2_inter_all_bins(const BinnedCounts& c, std::size_t max_lag) {
  if (max_lag > c.sequences / 10) throw std::invalid_argument("lag range exceeds a tenth of the sequences");
  std::vector<double> total(c.sequences, 0.0);
  double mean = 0.0;
  for (std::size_t i = 0; i < c.sequences; ++i) {
    for (std::size_t j = 0; j < c.bins; ++j) total[i] += c.at(i, j);
    mean += total[i];
  }
  mean /= static_cast<double>(c.sequences);
  std::vector<double> half;
  for (std::size_t k = 0; k <= max_lag; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i + k < c.sequences; ++i) {
      s += k == 0 ? total[i] * (total[i] - 1.0) : total[i] * total[i + k];
    }
    half.push_back(ratio(s / static_cast<double>(c.sequences - k), mean * mean));
  }
  return mirror(half);
}

double g2_background_correct(double g2, double a0, double a1) {
  if (a0 * a1 == 0.0 || !std::isfinite(a0 * a1)) {
    throw std::domain_error("background correction undefined: no signal above background");
  }
  return ((1.0 + a0) * (1.0 + a1) * g2 - a0 - a1 - 1.0) / (a0 * a1);
}

double signal_to_background(double mean_signal, double mean_dark) {
  if (!(mean_dark > 0.0)) throw std::domain_error("dark mean must be > 0");
  return (mean_signal - mean_dark) / mean_dark;
}

double g2_single_emitter_prediction(double n0, double nj, double dark) {
  if (!(dark > 0.0) || !(n0 > 0.0) || !(nj > 0.0)) throw std::domain_error("means must be > 0");
  return (n0 * dark + nj * dark - dark * dark) / (n0 * nj);
}

G2Result analyze_g2(const ClickStream& signal, const ClickStream* no_pulse, const G2Options& opt) {
  const BinnedCounts sc = bin_counts(signal, opt.binning);
  if (sc.sequences < 2) throw std::invalid_argument("g2 needs at least two sequences");
  if (opt.max_lag > sc.sequences / 10) throw std::invalid_argument("lag range exceeds a tenth of the sequences");
  std::optional<BinnedCounts> dc;
  if (no_pulse) dc = bin_counts(*no_pulse, opt.binning);

  const std::size_t tail_bins = std::max<std::size_t>(1, sc.bins / 3);
  const std::size_t n_blocks =
      std::clamp<std::size_t>(sc.sequences / (4 * (opt.max_lag + 1)), 2, 1000);
  const auto sig = signal_blocks(sc, opt.max_lag, n_blocks);
  const std::size_t n_dark_blocks = dc ? std::clamp<std::size_t>(dc->sequences / 4, 1, 1000) : 0;
  const auto dark = dc ? dark_blocks(*dc, n_dark_blocks) : std::vector<DarkBlock>{};

  std::vector<const SignalBlock*> sig_all;
  for (const auto& b : sig) sig_all.push_back(&b);
  std::vector<const DarkBlock*> dark_all;
  for (const auto& b : dark) dark_all.push_back(&b);
  const Statistics st = compute(sig_all, dark_all, sc.bins, opt.max_lag, tail_bins);

  G2Result r;
  r.sequences = sc.sequences;
  r.bootstrap_blocks = n_blocks;
  r.dark_source = dc ? "no-pulse reference series" : "signal trace tail";
  r.signal_means = st.means;
  r.dark_means = st.dark;
  r.a0 = st.a0;
  r.a1 = st.a1;
  r.correction_defined = st.defined;
  for (std::size_t j = 1; j < sc.bins; ++j) r.intra_tau.push_back(opt.binning.center(j) - opt.binning.center(0));
  r.intra = st.intra;
  r.intra_prediction = st.prediction;
  for (int k = -static_cast<int>(opt.max_lag); k <= static_cast<int>(opt.max_lag); ++k) r.lags.push_back(k);
  r.inter = mirror(st.inter);
  r.corrected = mirror(st.corrected);

  std::vector<std::vector<double>> boot_intra(opt.bootstrap), boot_inter(opt.bootstrap),
      boot_corr(opt.bootstrap);
  parallel_for(opt.bootstrap, opt.workers, [&](std::size_t b) {
    CounterRng rng(opt.seed, static_cast<std::uint32_t>(b), 0, StreamId::kBootstrap);
    std::vector<const SignalBlock*> s(n_blocks);
    for (auto& p : s) p = &sig[rng.below(n_blocks)];
    std::vector<const DarkBlock*> d(n_dark_blocks);
    for (auto& p : d) p = &dark[rng.below(n_dark_blocks)];
    const Statistics bs = compute(s, d, sc.bins, opt.max_lag, tail_bins);
    boot_intra[b] = bs.intra;
    boot_inter[b] = bs.inter;
    boot_corr[b] = bs.corrected;
  });
  r.intra_error = stddev(boot_intra, st.intra.size());
  r.inter_error = mirror(stddev(boot_inter, st.inter.size()));
  r.corrected_error = mirror(stddev(boot_corr, st.corrected.size()));
  return r;
}

}  // namespace spincount
