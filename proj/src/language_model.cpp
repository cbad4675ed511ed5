#include "stairgen/language_model.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "stairgen/errors.hpp"

namespace stairgen {

PaddedBatch pad_rows(std::span<const TokenSeq> rows, TokenId pad_id) {
  PaddedBatch batch;
  for (const auto& r : rows) batch.width = std::max(batch.width, r.size());
  batch.cells.assign(rows.size() * batch.width, pad_id);
  batch.lengths.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i].begin(), rows[i].end(), batch.cells.begin() + i * batch.width);
    batch.lengths.push_back(rows[i].size());
  }
  return batch;
}

void LanguageModel::score_batch_into(const PaddedBatch& batch, std::span<float> out) const {
  const std::size_t v = vocabulary().size();
  for (std::size_t i = 0; i < batch.rows(); ++i) {
    score_into(batch.row(i), out.subspan(i * v, v));
  }
}

void validate_prefix(const Vocabulary& vocab, std::span<const TokenId> prefix) {
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (!vocab.is_valid(prefix[i])) {
      throw InvalidInput(fmt::format("token id {} at position {} is outside vocabulary of size {}",
                                     prefix[i], i, vocab.size()));
    }
    if (prefix[i] == vocab.pad_id()) {
      throw InvalidInput(fmt::format("PAD token at position {} cannot be scored", i));
    }
  }
}

Logits score_next(const LanguageModel& model, std::span<const TokenId> prefix) {
  validate_prefix(model.vocabulary(), prefix);
  Logits out(model.vocabulary().size());
  model.score_into(prefix, out);
  return out;
}

std::vector<Logits> score_batch(const LanguageModel& model, std::span<const TokenSeq> rows) {
  if (rows.empty()) throw InvalidInput("score_batch requires at least one row");
  const auto& vocab = model.vocabulary();
  for (const auto& r : rows) validate_prefix(vocab, r);

  const std::size_t v = vocab.size();
  PaddedBatch batch = pad_rows(rows, vocab.pad_id());
  std::vector<float> flat(rows.size() * v);
  model.score_batch_into(batch, flat);

  std::vector<Logits> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(i * v),
                     flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * v));
  }
  return out;
}

TokenId argmax_token(std::span<const float> logits) {
  if (logits.empty()) throw InvalidInput("argmax of empty logits");
  std::size_t best = 0;
  for (std::size_t i = 1; i < logits.size(); ++i) {
    if (logits[i] > logits[best]) best = i;
  }
  return static_cast<TokenId>(best);
}

}  // namespace stairgen
