#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string_view>
#include <utility>
#include <vector>

#include "stairgen/language_model.hpp"

namespace stairgen {

// Scores are a pure function of (seed, last context_window ids). Content
// tokens get hashed scores in [0, 1); EOS scores 2.0 (and wins) in an
// eos_bias fraction of contexts, -1.0 otherwise; PAD always scores -1.0.
class HashLM final : public LanguageModel {
 public:
  struct Params {
    std::uint64_t seed = 0;
    std::size_t context_window = 4;
    double eos_bias = 0.0;
  };

  HashLM(Vocabulary vocab, Params params);

  const Vocabulary& vocabulary() const override { return vocab_; }
  std::string name() const override;
  void score_into(std::span<const TokenId> prefix,
                  std::span<float> out) const override;
  void score_batch_into(const PaddedBatch& batch,
                        std::span<float> out) const override;

  const Params& params() const noexcept { return params_; }

 private:
  Vocabulary vocab_;
  Params params_;
};

// Count-based model over whitespace or byte tokens. Every corpus line is a
// sentence terminated by EOS. Scores are add-constant smoothed relative
// frequencies for the longest observed context of at most order-1 tokens.
class NGramLM final : public LanguageModel {
 public:
  static constexpr double kDefaultSmoothing = 0.01;

  const Vocabulary& vocabulary() const override { return vocab_; }
  std::string name() const override;
  void score_into(std::span<const TokenId> prefix,
                  std::span<float> out) const override;

  std::size_t order() const noexcept { return order_; }
  double smoothing() const noexcept { return smoothing_; }
  // Length of the context actually used for `prefix` after back-off.
  std::size_t context_length_used(std::span<const TokenId> prefix) const;

 private:
  friend NGramLM train_ngram(std::string_view, std::size_t, TokenizerMode, double);

  struct ContextCounts {
    std::vector<std::pair<TokenId, std::uint32_t>> successors;  // sorted by id
    std::uint64_t total = 0;
  };
  struct SeqLess {
    using is_transparent = void;
    template <typename A, typename B>
    bool operator()(const A& a, const B& b) const {
      return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }
  };
  // counts_[j] holds contexts of exactly j tokens.
  using CountTable = std::map<TokenSeq, ContextCounts, SeqLess>;

  NGramLM(Vocabulary vocab, std::size_t order, double smoothing,
          std::vector<CountTable> counts);

  Vocabulary vocab_;
  std::size_t order_;
  double smoothing_;
  std::vector<CountTable> counts_;
};

// Throws IngestionError on an empty corpus, InvalidConfig on order < 1 or a
// non-positive smoothing constant.
NGramLM train_ngram(std::string_view corpus_text, std::size_t order,
                    TokenizerMode mode,
                    double smoothing = NGramLM::kDefaultSmoothing);

// Draft model whose argmax matches the target's exactly when
// to_unit(hash(seed, prefix)) < agreement. Otherwise it picks a deterministic
// token different from the target's argmax.
class AgreementDraft final : public LanguageModel {
 public:
  AgreementDraft(ModelPtr target, double agreement, std::uint64_t seed);

  const Vocabulary& vocabulary() const override { return target_->vocabulary(); }
  std::string name() const override;
  void score_into(std::span<const TokenId> prefix,
                  std::span<float> out) const override;

  double agreement() const noexcept { return agreement_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const LanguageModel& target() const noexcept { return *target_; }

 private:
  ModelPtr target_;
  double agreement_;
  std::uint64_t seed_;
};

}  // namespace stairgen
