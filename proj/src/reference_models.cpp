#include "stairgen/reference_models.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "stairgen/errors.hpp"
#include "stairgen/hashing.hpp"

namespace stairgen {
namespace {

constexpr std::uint64_t kTokenSpread = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kEosGateSalt = 0xe05e05e05e05e05eULL;
constexpr std::uint64_t kAgreementSalt = 0xa9a9d7a5f0f0c3c3ULL;
constexpr float kWinningScore = 2.0f;
constexpr float kMaskedScore = -1.0f;

std::span<const TokenId> trailing(std::span<const TokenId> prefix, std::size_t n) {
  return n >= prefix.size() ? prefix : prefix.subspan(prefix.size() - n);
}

void hash_scores(std::uint64_t context_hash, double eos_bias, std::span<float> out) {
  for (std::size_t v = 0; v < out.size(); ++v) {
    out[v] = static_cast<float>(to_unit(mix64(context_hash ^ (static_cast<std::uint64_t>(v) * kTokenSpread))));
  }
  const bool eos_wins = to_unit(mix64(context_hash ^ kEosGateSalt)) < eos_bias;
  out[Vocabulary::kEosId] = eos_wins ? kWinningScore : kMaskedScore;
  out[Vocabulary::kPadId] = kMaskedScore;
}

}  // namespace

// ---------------------------------------------------------------- HashLM

HashLM::HashLM(Vocabulary vocab, Params params) : vocab_(std::move(vocab)), params_(params) {
  if (params_.context_window == 0) throw InvalidConfig("HashLM context_window must be positive");
  if (!(params_.eos_bias >= 0.0 && params_.eos_bias <= 1.0)) {
    throw InvalidConfig(fmt::format("HashLM eos_bias must lie in [0,1], got {}", params_.eos_bias));
  }
}

std::string HashLM::name() const {
  return fmt::format("hash(seed={},window={},eos_bias={},vocab={})", params_.seed,
                     params_.context_window, params_.eos_bias, vocab_.size());
}

void HashLM::score_into(std::span<const TokenId> prefix, std::span<float> out) const {
  hash_scores(hash_tokens(params_.seed, trailing(prefix, params_.context_window)),
              params_.eos_bias, out);
}

void HashLM::score_batch_into(const PaddedBatch& batch, std::span<float> out) const {
  const std::size_t v = vocab_.size();
  std::vector<std::uint64_t> context_hashes(batch.rows());
  for (std::size_t i = 0; i < batch.rows(); ++i) {
    context_hashes[i] = hash_tokens(params_.seed, trailing(batch.row(i), params_.context_window));
  }
  for (std::size_t i = 0; i < batch.rows(); ++i) {
    hash_scores(context_hashes[i], params_.eos_bias, out.subspan(i * v, v));
  }
}

// ---------------------------------------------------------------- NGramLM

NGramLM::NGramLM(Vocabulary vocab, std::size_t order, double smoothing,
                 std::vector<CountTable> counts)
    : vocab_(std::move(vocab)), order_(order), smoothing_(smoothing), counts_(std::move(counts)) {}

std::string NGramLM::name() const {
  return fmt::format("ngram(order={},tokenizer={},vocab={})", order_, to_string(vocab_.mode()),
                     vocab_.size());
}

std::size_t NGramLM::context_length_used(std::span<const TokenId> prefix) const {
  std::size_t j = std::min(order_ - 1, prefix.size());
  for (; j > 0; --j) {
    auto ctx = trailing(prefix, j);
    if (counts_[j].find(ctx) != counts_[j].end()) return j;
  }
  return 0;
}

void NGramLM::score_into(std::span<const TokenId> prefix, std::span<float> out) const {
  const std::size_t j = context_length_used(prefix);
  auto ctx = trailing(prefix, j);
  const ContextCounts& cc = counts_[j].find(ctx)->second;

  // PAD is excluded from the smoothed support.
  const double denom = static_cast<double>(cc.total) +
                       smoothing_ * static_cast<double>(vocab_.size() - 1);
  const float floor_score = static_cast<float>(smoothing_ / denom);
  std::fill(out.begin(), out.end(), floor_score);
  for (const auto& [id, count] : cc.successors) {
    out[static_cast<std::size_t>(id)] = static_cast<float>((static_cast<double>(count) + smoothing_) / denom);
  }
  out[Vocabulary::kPadId] = kMaskedScore;
}

NGramLM train_ngram(std::string_view corpus_text, std::size_t order, TokenizerMode mode,
                    double smoothing) {
  if (order < 1) throw InvalidConfig("n-gram order must be >= 1");
  if (!(smoothing > 0.0) || !std::isfinite(smoothing)) {
    throw InvalidConfig(fmt::format("n-gram smoothing constant must be positive, got {}", smoothing));
  }
  Vocabulary vocab = Vocabulary::from_corpus(corpus_text, mode);

  std::vector<std::map<TokenSeq, std::map<TokenId, std::uint32_t>>> raw(order);
  std::size_t line_start = 0;
  while (line_start <= corpus_text.size()) {
    std::size_t nl = corpus_text.find('\n', line_start);
    std::string_view line = corpus_text.substr(
        line_start, nl == std::string_view::npos ? std::string_view::npos : nl - line_start);
    auto toks = tokenize(line, mode);
    if (!toks.empty()) {
      TokenSeq sentence;
      sentence.reserve(toks.size() + 1);
      for (const auto& t : toks) sentence.push_back(vocab.id_of(t));
      sentence.push_back(vocab.eos_id());
      for (std::size_t i = 0; i < sentence.size(); ++i) {
        const std::size_t max_ctx = std::min(order - 1, i);
        for (std::size_t j = 0; j <= max_ctx; ++j) {
          TokenSeq ctx(sentence.begin() + static_cast<std::ptrdiff_t>(i - j),
                       sentence.begin() + static_cast<std::ptrdiff_t>(i));
          ++raw[j][std::move(ctx)][sentence[i]];
        }
      }
    }
    if (nl == std::string_view::npos) break;
    line_start = nl + 1;
  }

  std::vector<NGramLM::CountTable> counts(order);
  for (std::size_t j = 0; j < order; ++j) {
    for (auto& [ctx, successors] : raw[j]) {
      NGramLM::ContextCounts cc;
      cc.successors.reserve(successors.size());
      for (const auto& [id, n] : successors) {
        cc.successors.emplace_back(id, n);
        cc.total += n;
      }
      counts[j].emplace(ctx, std::move(cc));
    }
  }
  return NGramLM(std::move(vocab), order, smoothing, std::move(counts));
}

// ---------------------------------------------------------------- AgreementDraft

AgreementDraft::AgreementDraft(ModelPtr target, double agreement, std::uint64_t seed)
    : target_(std::move(target)), agreement_(agreement), seed_(seed) {
  if (!target_) throw InvalidConfig("AgreementDraft requires a target model");
  if (!(agreement_ >= 0.0 && agreement_ <= 1.0)) {
    throw InvalidConfig(fmt::format("agreement must lie in [0,1], got {}", agreement_));
  }
  if (target_->vocabulary().size() < 3) {
    throw InvalidConfig("AgreementDraft needs at least one content token besides EOS and PAD");
  }
}

std::string AgreementDraft::name() const {
  return fmt::format("agreement-draft(agreement={},seed={},target={})", agreement_, seed_,
                     target_->name());
}

void AgreementDraft::score_into(std::span<const TokenId> prefix, std::span<float> out) const {
  target_->score_into(prefix, out);
  const TokenId target_top = argmax_token(out);

  const std::uint64_t h = hash_tokens(mix64(seed_) ^ kAgreementSalt, prefix);
  TokenId chosen = target_top;
  if (!(to_unit(h) < agreement_)) {
    // r-th id of the vocabulary with PAD and target_top removed.
    const auto excluded_lo = std::min<TokenId>(Vocabulary::kPadId, target_top);
    const auto excluded_hi = std::max<TokenId>(Vocabulary::kPadId, target_top);
    const std::size_t candidates = out.size() - (excluded_lo == excluded_hi ? 1 : 2);
    auto id = static_cast<TokenId>(mix64(h) % candidates);
    if (id >= excluded_lo) ++id;
    if (excluded_hi != excluded_lo && id >= excluded_hi) ++id;
    chosen = id;
  }

  for (std::size_t v = 0; v < out.size(); ++v) {
    out[v] = 0.5f * static_cast<float>(to_unit(mix64(h ^ (static_cast<std::uint64_t>(v) * kTokenSpread))));
  }
  out[Vocabulary::kPadId] = kMaskedScore;
  out[static_cast<std::size_t>(chosen)] = kWinningScore;
}

}  // namespace stairgen
