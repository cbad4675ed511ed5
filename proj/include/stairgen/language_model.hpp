#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "stairgen/vocabulary.hpp"

namespace stairgen {

// One unnormalized score per vocabulary entry; higher is more likely.
using Logits = std::vector<float>;

// Rectangular storage for a list of rows of different lengths. Cells past a
// row's true length hold pad_id and are never read by a scorer.
struct PaddedBatch {
  std::vector<TokenId> cells;      // rows() * width, row-major
  std::vector<std::size_t> lengths;
  std::size_t width = 0;

  std::size_t rows() const noexcept { return lengths.size(); }
  std::span<const TokenId> row(std::size_t i) const {
    return {cells.data() + i * width, lengths[i]};
  }
};

PaddedBatch pad_rows(std::span<const TokenSeq> rows, TokenId pad_id);

// Deterministic next-token scorer. Implementations are immutable after
// construction and safe to share between threads.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  virtual const Vocabulary& vocabulary() const = 0;
  virtual std::string name() const = 0;

  // Writes vocabulary().size() scores for `prefix` into `out`. Ids are
  // already validated by the caller.
  virtual void score_into(std::span<const TokenId> prefix,
                          std::span<float> out) const = 0;

  // Writes rows() * vocabulary().size() scores, row-major. Must agree
  // bit-for-bit with score_into on every row.
  virtual void score_batch_into(const PaddedBatch& batch,
                                std::span<float> out) const;
};

using ModelPtr = std::shared_ptr<const LanguageModel>;

// Validates ids (range and no PAD) and scores a single prefix.
Logits score_next(const LanguageModel& model, std::span<const TokenId> prefix);

// Scores every row in one call. Result i equals score_next(model, rows[i]).
std::vector<Logits> score_batch(const LanguageModel& model,
                                std::span<const TokenSeq> rows);

// Index of the highest score; ties go to the lowest id.
TokenId argmax_token(std::span<const float> logits);

// Throws InvalidInput naming the first bad position.
void validate_prefix(const Vocabulary& vocab, std::span<const TokenId> prefix);

}  // namespace stairgen
