#include <gtest/gtest.h>

#include <functional>

#include "stairgen/decode.hpp"
#include "stairgen/errors.hpp"
#include "stairgen/reference_models.hpp"
#include "test_support.hpp"

namespace stairgen {
namespace {

using testing::make_hash;
using testing::random_seq;

constexpr TokenId kEos = Vocabulary::kEosId;

TEST(StairsValidate, PrefixExamples) {
  TokenSeq draft{7, 9, 4};
  auto all = stairs_validate(draft, TokenSeq{7, 9, 4, 2});
  EXPECT_EQ(all.accepted_draft_count, 3);
  EXPECT_EQ(all.committed, (TokenSeq{7, 9, 4, 2}));

  auto first_wrong = stairs_validate(draft, TokenSeq{5, 9, 4, 2});
  EXPECT_EQ(first_wrong.accepted_draft_count, 0);
  EXPECT_EQ(first_wrong.committed, (TokenSeq{5}));

  auto middle = stairs_validate(draft, TokenSeq{7, 8, 4, 2});
  EXPECT_EQ(middle.accepted_draft_count, 1);
  EXPECT_EQ(middle.committed, (TokenSeq{7, 8}));

  auto empty = stairs_validate(TokenSeq{}, TokenSeq{6});
  EXPECT_EQ(empty.accepted_draft_count, 0);
  EXPECT_EQ(empty.committed, (TokenSeq{6}));
}

TEST(StairsValidate, EosCutsCommittedBlock) {
  TokenSeq draft{3, kEos, 5};
  auto r = stairs_validate(draft, TokenSeq{3, kEos, 5, 6}, kEos);
  EXPECT_TRUE(r.hit_eos);
  EXPECT_EQ(r.committed, (TokenSeq{3, kEos}));
  EXPECT_EQ(r.accepted_draft_count, 2);

  auto bonus = stairs_validate(TokenSeq{3}, TokenSeq{3, kEos}, kEos);
  EXPECT_TRUE(bonus.hit_eos);
  EXPECT_EQ(bonus.committed, (TokenSeq{3, kEos}));
  EXPECT_EQ(bonus.accepted_draft_count, 1);

  auto no_stop = stairs_validate(draft, TokenSeq{3, kEos, 5, 6});
  EXPECT_FALSE(no_stop.hit_eos);
  EXPECT_EQ(no_stop.committed.size(), 4u);
}

TEST(StairsValidate, LengthMismatchIsContractViolation) {
  TokenSeq draft{1, 2};
  EXPECT_THROW(stairs_validate(draft, TokenSeq{1, 2}), ContractViolation);
  EXPECT_THROW(stairs_validate(draft, TokenSeq{1, 2, 3, 4}), ContractViolation);
}

// Brute-force oracle: simulate the one-token-at-a-time greedy walk.
TokenSeq walk_oracle(const TokenSeq& draft, const TokenSeq& argmaxes) {
  TokenSeq out;
  for (std::size_t i = 0; i < argmaxes.size(); ++i) {
    out.push_back(argmaxes[i]);
    if (i == draft.size() || draft[i] != argmaxes[i]) break;
  }
  return out;
}

TEST(StairsValidate, ExhaustiveAgainstWalkOracle) {
  const TokenId v = 3;
  std::size_t cases = 0;
  for (int k = 0; k <= 4; ++k) {
    const int total = k + k + 1;
    int combos = 1;
    for (int i = 0; i < total; ++i) combos *= v;
    for (int code = 0; code < combos; ++code) {
      int c = code;
      TokenSeq draft(k), argmaxes(k + 1);
      for (auto& t : draft) t = c % v, c /= v;
      for (auto& t : argmaxes) t = c % v, c /= v;
      auto r = stairs_validate(draft, argmaxes);
      const TokenSeq expect = walk_oracle(draft, argmaxes);
      ASSERT_EQ(r.committed, expect);
      ASSERT_EQ(r.accepted_draft_count, static_cast<int>(expect.size()) - 1);
      ++cases;
    }
  }
  EXPECT_EQ(cases, 3u + 27u + 243u + 2187u + 19683u);
}

TEST(BuildStairsBatch, NestedRows) {
  auto b = build_stairs_batch(TokenSeq{5, 6}, TokenSeq{8, 9, 10});
  ASSERT_EQ(b.batch_size(), 4u);
  EXPECT_EQ(b.rows[0], (TokenSeq{5, 6}));
  EXPECT_EQ(b.rows[1], (TokenSeq{5, 6, 8}));
  EXPECT_EQ(b.rows[2], (TokenSeq{5, 6, 8, 9}));
  EXPECT_EQ(b.rows[3], (TokenSeq{5, 6, 8, 9, 10}));
  EXPECT_EQ(b.draft, (TokenSeq{8, 9, 10}));
}

TEST(BuildStairsBatch, EmptyDraftAndEmptyPrefix) {
  auto one = build_stairs_batch(TokenSeq{3}, TokenSeq{});
  ASSERT_EQ(one.batch_size(), 1u);
  EXPECT_EQ(one.rows[0], (TokenSeq{3}));
  auto empty_prefix = build_stairs_batch(TokenSeq{}, TokenSeq{4});
  ASSERT_EQ(empty_prefix.batch_size(), 2u);
  EXPECT_TRUE(empty_prefix.rows[0].empty());
  EXPECT_EQ(empty_prefix.rows[1], (TokenSeq{4}));
}

TEST(DraftPropose, LengthEosAndErrors) {
  auto target = make_hash(20, 4);
  AgreementDraft d(target, 1.0, 0);
  std::int64_t calls = 0;
  auto p = draft_propose(d, TokenSeq{3}, 5, true, &calls);
  EXPECT_EQ(p.size(), 5u);
  EXPECT_EQ(calls, 5);
  EXPECT_TRUE(draft_propose(d, TokenSeq{3}, 0).empty());
  EXPECT_THROW(draft_propose(d, TokenSeq{3}, -1), InvalidInput);

  auto eos_target = make_hash(20, 4, 2, 1.0);
  AgreementDraft eos_draft(eos_target, 1.0, 0);
  auto stopped = draft_propose(eos_draft, TokenSeq{3}, 4, true);
  EXPECT_EQ(stopped, (TokenSeq{kEos}));
  auto unstopped = draft_propose(eos_draft, TokenSeq{3}, 4, false);
  EXPECT_EQ(unstopped.size(), 4u);
}

TEST(GreedyGenerate, GoldenSequence) {
  // Frozen from tests/oracles/golden_oracle.py.
  auto lm = make_hash(16, 7, 4, 0.0);
  GenConfig cfg{10, 1, true};
  auto r = greedy_generate(*lm, TokenSeq{2}, cfg);
  EXPECT_EQ(r.output, (TokenSeq{2, 6, 6, 7, 8, 12, 6, 10, 15, 5, 6}));
  EXPECT_EQ(r.trace.totals.target_single_calls, 10);
  EXPECT_EQ(r.trace.totals.target_rows_scored, 10);
  EXPECT_EQ(r.trace.totals.target_batch_calls, 0);
  EXPECT_EQ(r.trace.totals.draft_calls, 0);
  EXPECT_FALSE(r.trace.check_consistency());
}

TEST(GreedyGenerate, StopsAtEosAndHonorsCap) {
  auto lm = make_hash(16, 7, 4, 1.0);
  auto r = greedy_generate(*lm, TokenSeq{2}, GenConfig{10, 1, true});
  EXPECT_EQ(r.output, (TokenSeq{2, kEos}));
  auto unstopped = greedy_generate(*lm, TokenSeq{2}, GenConfig{10, 1, false});
  EXPECT_EQ(unstopped.output.size(), 11u);
  auto one = greedy_generate(*lm, TokenSeq{2}, GenConfig{1, 1, false});
  EXPECT_EQ(one.output, (TokenSeq{2, kEos}));
  EXPECT_EQ(one.trace.totals.target_single_calls, 1);
  EXPECT_THROW(greedy_generate(*lm, TokenSeq{2}, GenConfig{0, 1, true}), InvalidConfig);
}

TEST(GenConfig, Validation) {
  EXPECT_THROW((GenConfig{-1, 1, true}).validate(), InvalidConfig);
  EXPECT_THROW((GenConfig{0, 1, true}).validate(), InvalidConfig);
  EXPECT_THROW((GenConfig{4, 0, true}).validate(), InvalidConfig);
  EXPECT_NO_THROW((GenConfig{1, 1, true}).validate());
}

TEST(StairsGenerate, PerfectDraftCallCounts) {
  auto target = make_hash(32, 3, 4, 0.0);
  AgreementDraft perfect(target, 1.0, 0);
  GenConfig cfg{12, 4, true};
  auto s = stairs_generate(*target, perfect, TokenSeq{2}, cfg);
  EXPECT_EQ(s.trace.totals.target_batch_calls, 3);
  EXPECT_EQ(s.trace.totals.target_single_calls, 0);
  EXPECT_EQ(s.trace.totals.target_rows_scored, 12);
  EXPECT_EQ(s.trace.totals.draft_calls, 9);
  EXPECT_EQ(s.trace.totals.accepted_total, 9);
  EXPECT_EQ(s.trace.totals.tokens_generated, 12);
  EXPECT_FALSE(s.trace.check_consistency());

  auto q = sequential_assisted_generate(*target, perfect, TokenSeq{2}, cfg);
  EXPECT_EQ(q.trace.totals.target_single_calls, 12);
  EXPECT_EQ(q.trace.totals.target_batch_calls, 0);

  auto g = greedy_generate(*target, TokenSeq{2}, cfg);
  EXPECT_EQ(s.output, g.output);
  EXPECT_EQ(q.output, g.output);
}

TEST(StairsGenerate, WrongDraftCommitsOneTokenPerCall) {
  auto target = make_hash(32, 3, 4, 0.0);
  AgreementDraft wrong(target, 0.0, 0);
  GenConfig cfg{10, 5, true};
  auto s = stairs_generate(*target, wrong, TokenSeq{2}, cfg);
  EXPECT_EQ(s.trace.totals.target_batch_calls, 10);
  EXPECT_EQ(s.trace.totals.accepted_total, 0);
  for (const auto& it : s.trace.iterations) EXPECT_EQ(it.committed, 1);
  EXPECT_EQ(s.output, greedy_generate(*target, TokenSeq{2}, cfg).output);
}

TEST(StairsGenerate, BatchSizeOneMatchesGreedyExactly) {
  auto target = make_hash(32, 3, 4, 0.1);
  AgreementDraft d(target, 0.7, 1);
  GenConfig cfg{20, 1, true};
  auto s = stairs_generate(*target, d, TokenSeq{2, 3}, cfg);
  auto g = greedy_generate(*target, TokenSeq{2, 3}, cfg);
  EXPECT_EQ(s.output, g.output);
  EXPECT_EQ(s.trace.totals.draft_calls, 0);
  EXPECT_EQ(s.trace.totals.target_rows_scored, g.trace.totals.target_rows_scored);
}

TEST(StairsGenerate, VocabularyMismatchIsConfigError) {
  auto target = make_hash(32, 3);
  auto other = make_hash(33, 3);
  GenConfig cfg{4, 3, true};
  EXPECT_THROW(stairs_generate(*target, *other, TokenSeq{2}, cfg), InvalidConfig);
  EXPECT_THROW(sequential_assisted_generate(*target, *other, TokenSeq{2}, cfg), InvalidConfig);
}

TEST(StairsGenerate, RespectsTokenCap) {
  auto target = make_hash(32, 3, 4, 0.0);
  AgreementDraft perfect(target, 1.0, 0);
  for (int cap : {1, 5, 7, 11}) {
    auto s = stairs_generate(*target, perfect, TokenSeq{2}, GenConfig{cap, 4, true});
    EXPECT_EQ(s.generated(1).size(), static_cast<std::size_t>(cap));
    EXPECT_FALSE(s.trace.check_consistency());
  }
}

// Randomized equivalence: both assisted methods reproduce greedy output for
// every model pair, prompt, batch size, and agreement level.
TEST(Equivalence, RandomizedAgainstGreedy) {
  const std::string corpus = testing::read_repo_file("data/corpus.txt");
  auto ngram = std::make_shared<NGramLM>(train_ngram(corpus, 3, TokenizerMode::kWhitespace));
  std::vector<ModelPtr> targets{make_hash(24, 1, 2, 0.05), make_hash(60, 2, 4, 0.0),
                                make_hash(8, 3, 1, 0.2), ngram};
  SplitMixStream rng(7);
  int cases = 0;
  for (const auto& target : targets) {
    const std::size_t v = target->vocabulary().size();
    for (double a : {0.0, 0.3, 0.8, 0.98, 1.0}) {
      for (int b : {1, 2, 3, 5, 8}) {
        for (int trial = 0; trial < 4; ++trial) {
          AgreementDraft draft(target, a, rng.next_u64());
          const TokenSeq prompt = random_seq(rng, v, 1 + rng.next_below(5));
          const bool stop = rng.next_below(4) != 0;
          GenConfig cfg{static_cast<int>(1 + rng.next_below(64)), b, stop};
          auto g = greedy_generate(*target, prompt, cfg);
          auto s = stairs_generate(*target, draft, prompt, cfg);
          auto q = sequential_assisted_generate(*target, draft, prompt, cfg);
          ASSERT_EQ(s.output, g.output) << target->name() << " a=" << a << " B=" << b;
          ASSERT_EQ(q.output, g.output) << target->name() << " a=" << a << " B=" << b;
          ASSERT_FALSE(s.trace.check_consistency());
          ASSERT_FALSE(q.trace.check_consistency());
          ++cases;
        }
      }
    }
  }
  EXPECT_EQ(cases, 4 * 5 * 5 * 4);
}

TEST(Equivalence, NgramDraftForNgramTarget) {
  const std::string corpus = testing::read_repo_file("data/corpus.txt");
  auto target = train_ngram(corpus, 4, TokenizerMode::kWhitespace);
  auto draft = train_ngram(corpus, 2, TokenizerMode::kWhitespace);
  const auto prompt = target.vocabulary().encode("translate English to German:");
  for (int b = 1; b <= 10; ++b) {
    GenConfig cfg{48, b, true};
    ASSERT_EQ(stairs_generate(target, draft, prompt, cfg).output, greedy_generate(target, prompt, cfg).output);
  }
}

// Property: mean accepted draft tokens per iteration grows with agreement.
TEST(Acceptance, MonotoneInAgreement) {
  auto target = make_hash(64, 12, 4, 0.0);
  std::vector<double> rates;
  for (double a : {0.0, 0.25, 0.5, 0.75, 0.9, 1.0}) {
    std::int64_t accepted = 0, iterations = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      AgreementDraft draft(target, a, s);
      auto r = stairs_generate(*target, draft, TokenSeq{static_cast<TokenId>(2 + s % 60), static_cast<TokenId>(2 + s / 60)}, GenConfig{60, 6, true});
      accepted += r.trace.totals.accepted_total;
      iterations += static_cast<std::int64_t>(r.trace.iterations.size());
    }
    rates.push_back(static_cast<double>(accepted) / static_cast<double>(iterations));
  }
  for (std::size_t i = 1; i < rates.size(); ++i) EXPECT_GE(rates[i], rates[i - 1]);
  EXPECT_DOUBLE_EQ(rates.front(), 0.0);
  EXPECT_DOUBLE_EQ(rates.back(), 5.0);
}

// Conservation: generated tokens = accepted draft tokens + one bonus per
// iteration (minus EOS or cap truncation, which the iteration records carry).
TEST(Trace, ConservationAcrossIterations) {
  auto target = make_hash(40, 5, 3, 0.02);
  SplitMixStream rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    AgreementDraft draft(target, 0.9, rng.next_u64());
    GenConfig cfg{static_cast<int>(1 + rng.next_below(60)), static_cast<int>(1 + rng.next_below(10)), true};
    auto r = stairs_generate(*target, draft, TokenSeq{3, 4}, cfg);
    std::int64_t committed = 0, accepted = 0;
    for (const auto& it : r.trace.iterations) {
      ASSERT_LE(it.accepted, it.draft_proposed);
      ASSERT_GE(it.committed, 1);
      ASSERT_LE(it.committed, it.accepted + 1);
      committed += it.committed;
      accepted += it.accepted;
    }
    ASSERT_EQ(committed, r.trace.totals.tokens_generated);
    ASSERT_EQ(accepted, r.trace.totals.accepted_total);
    ASSERT_EQ(static_cast<std::int64_t>(r.generated(2).size()), committed);
    ASSERT_EQ(r.trace.totals.target_batch_calls, static_cast<std::int64_t>(r.trace.iterations.size()));
  }
}

TEST(Trace, ConsistencyCheckFlagsTampering) {
  auto target = make_hash(40, 5);
  AgreementDraft draft(target, 0.9, 1);
  auto r = stairs_generate(*target, draft, TokenSeq{3}, GenConfig{20, 4, true});
  ASSERT_FALSE(r.trace.check_consistency());
  auto tampered = r.trace;
  tampered.totals.tokens_generated += 1;
  EXPECT_TRUE(tampered.check_consistency());
}

}  // namespace
}  // namespace stairgen
