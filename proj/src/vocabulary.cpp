#include "stairgen/vocabulary.hpp"

#include <fmt/format.h>

#include <cctype>

#include "stairgen/errors.hpp"

namespace stairgen {

TokenizerMode parse_tokenizer_mode(std::string_view name) {
  if (name == "whitespace") return TokenizerMode::kWhitespace;
  if (name == "byte") return TokenizerMode::kByte;
  throw InvalidConfig(fmt::format("unknown tokenizer mode '{}' (expected whitespace|byte)", name));
}

std::string_view to_string(TokenizerMode mode) {
  return mode == TokenizerMode::kByte ? "byte" : "whitespace";
}

std::vector<std::string> tokenize(std::string_view text, TokenizerMode mode) {
  std::vector<std::string> out;
  if (mode == TokenizerMode::kByte) {
    out.reserve(text.size());
    for (char c : text) out.emplace_back(1, c);
    return out;
  }
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens, TokenizerMode mode)
    : tokens_(std::move(tokens)), mode_(mode) {
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    auto [it, inserted] = index_.emplace(tokens_[i], static_cast<TokenId>(i));
    if (!inserted) {
      throw IngestionError(fmt::format("duplicate token string '{}' in vocabulary", tokens_[i]));
    }
  }
}

Vocabulary Vocabulary::synthetic(std::size_t size) {
  if (size < 3) {
    throw InvalidConfig(fmt::format("vocabulary size must be >= 3 (EOS, PAD, one content token), got {}", size));
  }
  std::vector<std::string> content;
  content.reserve(size - 2);
  for (std::size_t i = 2; i < size; ++i) content.push_back(fmt::format("w{}", i));
  return from_tokens(std::move(content), TokenizerMode::kWhitespace);
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> content_tokens, TokenizerMode mode) {
  if (content_tokens.empty()) throw IngestionError("vocabulary has no content tokens");
  std::vector<std::string> all;
  all.reserve(content_tokens.size() + 2);
  all.emplace_back(kEosText);
  all.emplace_back(kPadText);
  for (auto& t : content_tokens) {
    if (t == kEosText || t == kPadText) {
      throw IngestionError(fmt::format("corpus contains reserved token '{}'", t));
    }
    all.push_back(std::move(t));
  }
  return Vocabulary(std::move(all), mode);
}

Vocabulary Vocabulary::from_corpus(std::string_view text, TokenizerMode mode) {
  std::vector<std::string> content;
  std::unordered_map<std::string, bool> seen;
  std::size_t line_start = 0;
  while (line_start <= text.size()) {
    std::size_t nl = text.find('\n', line_start);
    std::string_view line = text.substr(line_start, nl == std::string_view::npos ? std::string_view::npos : nl - line_start);
    for (auto& tok : tokenize(line, mode)) {
      if (seen.emplace(tok, true).second) content.push_back(std::move(tok));
    }
    if (nl == std::string_view::npos) break;
    line_start = nl + 1;
  }
  if (content.empty()) throw IngestionError("corpus is empty after tokenization");
  return from_tokens(std::move(content), mode);
}

const std::string& Vocabulary::token(TokenId id) const {
  if (!is_valid(id)) throw InvalidInput(fmt::format("token id {} out of range [0, {})", id, size()));
  return tokens_[static_cast<std::size_t>(id)];
}

bool Vocabulary::contains(std::string_view text) const {
  return index_.find(std::string(text)) != index_.end();
}

TokenId Vocabulary::id_of(std::string_view text) const {
  auto it = index_.find(std::string(text));
  if (it == index_.end()) throw InvalidInput(fmt::format("token '{}' is not in the vocabulary", text));
  return it->second;
}

TokenSeq Vocabulary::encode(std::string_view text) const {
  TokenSeq ids;
  for (const auto& tok : tokenize(text, mode_)) {
    TokenId id = id_of(tok);
    if (id == kEosId || id == kPadId) {
      throw InvalidInput(fmt::format("reserved token '{}' cannot appear in input text", tok));
    }
    ids.push_back(id);
  }
  return ids;
}

std::vector<std::string> Vocabulary::token_strings(std::span<const TokenId> ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (TokenId id : ids) out.push_back(token(id));
  return out;
}

std::string Vocabulary::decode(std::span<const TokenId> ids) const {
  std::string out;
  for (TokenId id : ids) {
    if (id == kEosId) continue;
    if (mode_ == TokenizerMode::kWhitespace && !out.empty()) out.push_back(' ');
    out += token(id);
  }
  return out;
}

}  // namespace stairgen
