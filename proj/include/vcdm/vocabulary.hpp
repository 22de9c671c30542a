#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace vcdm {

using TokenId = std::int32_t;

// Reserved ids, fixed order.
inline constexpr TokenId kPad = 0;
inline constexpr TokenId kUnk = 1;
inline constexpr TokenId kBos = 2;
inline constexpr TokenId kEos = 3;
inline constexpr TokenId kCls = 4;
inline constexpr TokenId kSep = 5;
inline constexpr std::size_t kReservedCount = 6;

class Vocabulary {
 public:
  // Creates a vocabulary holding only the reserved tokens.
  Vocabulary();
  explicit Vocabulary(const std::vector<std::string>& non_reserved);

  TokenId id(const std::string& token) const;  // unknown -> kUnk
  bool contains(const std::string& token) const { return index_.count(token) != 0; }
  const std::string& token(TokenId id) const;
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::vector<TokenId> encode(const std::vector<std::string>& tokens) const;
  // Drops reserved control tokens except UNK.
  std::vector<std::string> decode(std::span<const TokenId> ids) const;

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  void insert(const std::string& token);
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

const std::vector<std::string>& reserved_tokens();

// Keeps the most frequent tokens so the total size (reserved included) is at
// most `cap`. Ties break toward the earliest first occurrence.
Vocabulary build_vocab(std::span<const std::vector<std::string>> sequences, std::size_t cap);

}  // namespace vcdm
