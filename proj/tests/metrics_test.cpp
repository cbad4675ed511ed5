#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "stairgen/errors.hpp"
#include "stairgen/hashing.hpp"
#include "stairgen/metrics.hpp"

namespace stairgen {
namespace {

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

// Independent BLEU: clipped n-gram counts straight from the definition.
double bleu_oracle(const std::vector<std::string>& c, const std::vector<std::string>& r) {
  if (c.empty()) return 0.0;
  const std::size_t order = std::min<std::size_t>(4, c.size());
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= order; ++n) {
    std::map<std::vector<std::string>, int> cc, rc;
    for (std::size_t i = 0; i + n <= c.size(); ++i) ++cc[{c.begin() + i, c.begin() + i + n}];
    for (std::size_t i = 0; i + n <= r.size(); ++i) ++rc[{r.begin() + i, r.begin() + i + n}];
    int clipped = 0;
    for (const auto& [g, k] : cc) clipped += std::min(k, rc.count(g) ? rc[g] : 0);
    if (clipped == 0) return 0.0;
    log_sum += std::log(static_cast<double>(clipped) / static_cast<double>(c.size() - n + 1));
  }
  const double bp = c.size() >= r.size() ? 1.0 : std::exp(1.0 - static_cast<double>(r.size()) / c.size());
  return 100.0 * bp * std::exp(log_sum / static_cast<double>(order));
}

TEST(Bleu, IdenticalIsExactlyHundred) {
  auto s = words("translate English to German: My dog is cute.");
  EXPECT_EQ(bleu(s, s).value, 100.0);
  auto one = words("hallo");
  EXPECT_EQ(bleu(one, one).value, 100.0);
}

TEST(Bleu, DisjointIsZero) {
  EXPECT_EQ(bleu(words("a b c d"), words("e f g h")).value, 0.0);
}

TEST(Bleu, EmptyCandidateIsZeroAndEmptyReferenceIsError) {
  std::vector<std::string> none;
  auto r = bleu(none, words("a b"));
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.brevity_penalty, 0.0);
  EXPECT_THROW(bleu(words("a"), none), InvalidInput);
}

TEST(Bleu, GoldenExample) {
  // Frozen from tests/oracles/golden_oracle.py.
  auto r = bleu(words("the cat sat on the mat with a red hat"), words("the cat is sitting on the mat with the hat"));
  EXPECT_NEAR(r.value, 32.4667915475, 1e-8);
  ASSERT_EQ(r.precisions.size(), 4u);
  EXPECT_NEAR(r.precisions[0], 0.7, 1e-12);
  EXPECT_NEAR(r.precisions[1], 4.0 / 9.0, 1e-12);
  EXPECT_NEAR(r.precisions[2], 0.25, 1e-12);
  EXPECT_NEAR(r.precisions[3], 1.0 / 7.0, 1e-12);
  EXPECT_EQ(r.brevity_penalty, 1.0);
}

TEST(Bleu, ClippingAndBrevity) {
  auto clipped = bleu(words("the the the the"), words("the cat"));
  EXPECT_NEAR(clipped.precisions[0], 0.25, 1e-12);
  auto shorter = bleu(words("the cat"), words("the cat sat on"));
  EXPECT_NEAR(shorter.brevity_penalty, std::exp(-1.0), 1e-12);
  EXPECT_EQ(shorter.effective_order, 2);
  EXPECT_NEAR(shorter.value, 100.0 * std::exp(-1.0), 1e-9);
}

TEST(Bleu, MatchesOracleOnRandomSentences) {
  SplitMixStream rng(5);
  const std::vector<std::string> lexicon{"a", "b", "c", "d", "e"};
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<std::string> c(rng.next_below(9)), r(1 + rng.next_below(9));
    for (auto& w : c) w = lexicon[rng.next_below(lexicon.size())];
    for (auto& w : r) w = lexicon[rng.next_below(lexicon.size())];
    const double got = bleu(c, r).value;
    ASSERT_NEAR(got, bleu_oracle(c, r), 1e-9);
    ASSERT_GE(got, 0.0);
    ASSERT_LE(got, 100.0);
  }
}

TEST(TimingStats, GoldenSamples) {
  // Frozen from tests/oracles/golden_oracle.py.
  SplitMixStream rng(2024);
  std::vector<double> samples(1000);
  for (auto& s : samples) s = 0.4 + 0.2 * rng.next_unit();
  auto st = timing_stats(samples);
  EXPECT_EQ(st.n, 1000u);
  EXPECT_NEAR(st.mean, 0.502077568564115, 1e-12);
  EXPECT_NEAR(st.std, 0.0591124227104267, 1e-12);
  EXPECT_NEAR(st.min, 0.400269450747414, 1e-12);
  EXPECT_NEAR(st.max, 0.59994450488007, 1e-12);
  EXPECT_NEAR(st.p5, 0.409935170025745, 1e-12);
  EXPECT_NEAR(st.p25, 0.452109777591827, 1e-12);
  EXPECT_NEAR(st.median, 0.502338449422851, 1e-12);
  EXPECT_NEAR(st.p75, 0.555867610082231, 1e-12);
  EXPECT_NEAR(st.p95, 0.590569602785404, 1e-12);
}

TEST(TimingStats, SmallSamples) {
  std::vector<double> one{2.5};
  auto s = timing_stats(one);
  EXPECT_EQ(s.mean, 2.5);
  EXPECT_EQ(s.std, 0.0);
  EXPECT_EQ(s.p5, 2.5);
  EXPECT_EQ(s.p95, 2.5);
  std::vector<double> five{5.0, 1.0, 4.0, 2.0, 3.0};
  auto v = timing_stats(five);
  EXPECT_EQ(v.median, 3.0);
  EXPECT_EQ(v.p25, 2.0);
  EXPECT_EQ(v.p75, 4.0);
  std::vector<double> four{4.0, 1.0, 3.0, 2.0};
  auto f = timing_stats(four);
  EXPECT_EQ(f.median, 2.0);
  EXPECT_EQ(f.p25, 1.0);
  EXPECT_EQ(f.p75, 3.0);
  EXPECT_EQ(f.p95, 4.0);
  EXPECT_NEAR(f.std, std::sqrt(1.25), 1e-15);
  std::vector<double> none;
  EXPECT_THROW(timing_stats(none), InvalidInput);
}

TEST(Speedup, ReportedMeans) {
  EXPECT_NEAR(speedup_percent(0.4853, 0.4016), 17.24, 0.01);
  EXPECT_NEAR(speedup_percent(1.2232, 1.1059), 9.58, 0.01);
}

TEST(Speedup, ReverseDirectionIdentity) {
  SplitMixStream rng(8);
  for (int i = 0; i < 1000; ++i) {
    const double a = 0.01 + rng.next_unit();
    const double b = 0.01 + rng.next_unit();
    ASSERT_NEAR(speedup_percent(a, b) + speedup_percent(b, a) * (b / a), 0.0, 1e-9);
  }
}

TEST(Speedup, SignAndErrors) {
  EXPECT_EQ(speedup_percent(1.0, 1.0), 0.0);
  EXPECT_LT(speedup_percent(1.0, 1.5), 0.0);
  EXPECT_THROW(speedup_percent(0.0, 1.0), InvalidInput);
  EXPECT_THROW(speedup_percent(1.0, -1.0), InvalidInput);
}

}  // namespace
}  // namespace stairgen
