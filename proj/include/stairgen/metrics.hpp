#pragma once

#include <span>
#include <string>
#include <vector>

namespace stairgen {

struct BleuScore {
  double value = 0.0;  // 0..100
  std::vector<double> precisions;  // modified precision per order 1..max_n
  double brevity_penalty = 1.0;
  // Orders that entered the geometric mean: min(max_n, candidate length).
  int effective_order = 0;
};

// Single-reference sentence BLEU without smoothing. A zero precision at any
// effective order gives 0. Throws InvalidInput on an empty reference.
BleuScore bleu(std::span<const std::string> candidate, std::span<const std::string> reference,
               int max_n = 4);

struct TimingStats {
  std::size_t n = 0;
  double mean = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  double std = 0.0;  // population standard deviation
  double p5 = 0.0;
  double p25 = 0.0;
  double p75 = 0.0;
  double p95 = 0.0;
};

// Nearest-rank percentile of sorted samples: the ceil(p/100 * n)-th smallest.
double nearest_rank(std::span<const double> sorted, double percent);

// Throws InvalidInput on an empty sample list.
TimingStats timing_stats(std::span<const double> samples);

// 100 * (baseline - variant) / baseline. Throws InvalidInput unless both are
// positive.
double speedup_percent(double baseline_mean, double variant_mean);

}  // namespace stairgen
