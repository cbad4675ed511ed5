#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace stairgen {

using TokenId = std::int32_t;
using TokenSeq = std::vector<TokenId>;

enum class TokenizerMode { kWhitespace, kByte };

TokenizerMode parse_tokenizer_mode(std::string_view name);
std::string_view to_string(TokenizerMode mode);

// Splits text into token strings. Whitespace mode splits on runs of ASCII
// whitespace; byte mode yields one single-byte string per byte.
std::vector<std::string> tokenize(std::string_view text, TokenizerMode mode);

// Distinct token strings plus two reserved entries. EOS and PAD always sit at
// ids 0 and 1; content tokens follow in first-appearance order.
class Vocabulary {
 public:
  static constexpr TokenId kEosId = 0;
  static constexpr TokenId kPadId = 1;
  static constexpr std::string_view kEosText = "<eos>";
  static constexpr std::string_view kPadText = "<pad>";

  // Content tokens w2, w3, ... up to `size` entries in total. size >= 3.
  static Vocabulary synthetic(std::size_t size);
  // Distinct tokens of `text` in first-appearance order.
  static Vocabulary from_corpus(std::string_view text, TokenizerMode mode);
  // Throws IngestionError on duplicate or reserved strings.
  static Vocabulary from_tokens(std::vector<std::string> content_tokens,
                                TokenizerMode mode);

  std::size_t size() const noexcept { return tokens_.size(); }
  TokenId eos_id() const noexcept { return kEosId; }
  TokenId pad_id() const noexcept { return kPadId; }
  TokenizerMode mode() const noexcept { return mode_; }

  const std::string& token(TokenId id) const;
  bool contains(std::string_view text) const;
  // Throws InvalidInput naming the unknown token.
  TokenId id_of(std::string_view text) const;
  bool is_valid(TokenId id) const noexcept {
    return id >= 0 && static_cast<std::size_t>(id) < tokens_.size();
  }

  // Text -> ids with the vocabulary's tokenizer; unknown tokens are errors.
  TokenSeq encode(std::string_view text) const;
  // ids -> text; EOS is dropped, whitespace mode joins with single spaces.
  std::string decode(std::span<const TokenId> ids) const;
  std::vector<std::string> token_strings(std::span<const TokenId> ids) const;

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  Vocabulary(std::vector<std::string> tokens, TokenizerMode mode);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  TokenizerMode mode_;
};

}  // namespace stairgen
