#include "stairgen/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "stairgen/errors.hpp"

namespace stairgen {
namespace {

using NgramCounts = std::map<std::vector<std::string>, int>;

NgramCounts count_ngrams(std::span<const std::string> tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                      tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

}  // namespace

BleuScore bleu(std::span<const std::string> candidate, std::span<const std::string> reference,
               int max_n) {
  if (reference.empty()) throw InvalidInput("BLEU reference must not be empty");
  if (max_n < 1) throw InvalidInput("BLEU max_n must be >= 1");

  BleuScore score;
  score.precisions.assign(static_cast<std::size_t>(max_n), 0.0);
  if (candidate.empty()) {
    score.brevity_penalty = 0.0;
    return score;
  }

  score.effective_order = std::min<int>(max_n, static_cast<int>(candidate.size()));
  double log_sum = 0.0;
  bool any_zero = false;
  for (int n = 1; n <= score.effective_order; ++n) {
    const auto cand = count_ngrams(candidate, static_cast<std::size_t>(n));
    const auto ref = count_ngrams(reference, static_cast<std::size_t>(n));
    int clipped = 0;
    int total = 0;
    for (const auto& [gram, c] : cand) {
      total += c;
      auto it = ref.find(gram);
      if (it != ref.end()) clipped += std::min(c, it->second);
    }
    const double p = static_cast<double>(clipped) / static_cast<double>(total);
    score.precisions[static_cast<std::size_t>(n - 1)] = p;
    if (clipped == 0) {
      any_zero = true;
    } else {
      log_sum += std::log(p);
    }
  }

  const auto c = static_cast<double>(candidate.size());
  const auto r = static_cast<double>(reference.size());
  score.brevity_penalty = c >= r ? 1.0 : std::exp(1.0 - r / c);
  if (any_zero) return score;
  score.value = 100.0 * score.brevity_penalty * std::exp(log_sum / score.effective_order);
  // exp(log(1)) can land a hair under or over 1.
  if (std::all_of(score.precisions.begin(), score.precisions.begin() + score.effective_order,
                  [](double p) { return p == 1.0; }) &&
      score.brevity_penalty == 1.0) {
    score.value = 100.0;
  }
  score.value = std::clamp(score.value, 0.0, 100.0);
  return score;
}

double nearest_rank(std::span<const double> sorted, double percent) {
  if (sorted.empty()) throw InvalidInput("percentile of an empty sample");
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(percent / 100.0 * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

TimingStats timing_stats(std::span<const double> samples) {
  if (samples.empty()) throw InvalidInput("timing_stats requires at least one sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());

  TimingStats s;
  s.n = sorted.size();
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(s.n);
  double sq = 0.0;
  for (double x : sorted) sq += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(sq / static_cast<double>(s.n));
  s.min = sorted.front();
  s.max = sorted.back();
  s.median = nearest_rank(sorted, 50.0);
  s.p5 = nearest_rank(sorted, 5.0);
  s.p25 = nearest_rank(sorted, 25.0);
  s.p75 = nearest_rank(sorted, 75.0);
  s.p95 = nearest_rank(sorted, 95.0);
  return s;
}

double speedup_percent(double baseline_mean, double variant_mean) {
  if (!(baseline_mean > 0.0) || !(variant_mean > 0.0)) {
    throw InvalidInput(fmt::format("speedup needs positive timings, got baseline {} and variant {}",
                                   baseline_mean, variant_mean));
  }
  return 100.0 * (baseline_mean - variant_mean) / baseline_mean;
}

}  // namespace stairgen
