#include "vcdm/vocabulary.hpp"

#include <algorithm>

#include "vcdm/errors.hpp"

namespace vcdm {

const std::vector<std::string>& reserved_tokens() {
  static const std::vector<std::string> tokens = {"<pad>", "<unk>", "<s>", "</s>", "[CLS]", "[SEP]"};
  return tokens;
}

Vocabulary::Vocabulary() {
  for (const auto& t : reserved_tokens()) insert(t);
}

Vocabulary::Vocabulary(const std::vector<std::string>& non_reserved) : Vocabulary() {
  for (const auto& t : non_reserved) {
    if (contains(t)) throw ContractError("vocabulary: duplicate token '" + t + "'");
    insert(t);
  }
}

void Vocabulary::insert(const std::string& token) {
  index_.emplace(token, static_cast<TokenId>(tokens_.size()));
  tokens_.push_back(token);
}

TokenId Vocabulary::id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw ContractError("vocabulary: id " + std::to_string(id) + " out of range");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<TokenId> Vocabulary::encode(const std::vector<std::string>& tokens) const {
  std::vector<TokenId> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

std::vector<std::string> Vocabulary::decode(std::span<const TokenId> ids) const {
  std::vector<std::string> out;
  for (TokenId id : ids) {
    if (id == kPad || id == kBos || id == kEos || id == kCls || id == kSep) continue;
    out.push_back(token(id));
  }
  return out;
}

Vocabulary build_vocab(std::span<const std::vector<std::string>> sequences, std::size_t cap) {
  if (cap < kReservedCount + 1) throw ContractError("build_vocab: cap must be >= 7");
  struct Entry {
    std::string token;
    std::size_t count;
    std::size_t first;
  };
  std::vector<Entry> entries;
  std::unordered_map<std::string, std::size_t> where;
  const Vocabulary reserved;
  for (const auto& seq : sequences) {
    for (const auto& tok : seq) {
      if (reserved.contains(tok)) continue;
      auto [it, fresh] = where.emplace(tok, entries.size());
      if (fresh) {
        entries.push_back({tok, 1, entries.size()});
      } else {
        ++entries[it->second].count;
      }
    }
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.first < b.first;
  });
  const std::size_t keep = std::min(entries.size(), cap - kReservedCount);
  std::vector<std::string> kept;
  kept.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) kept.push_back(entries[i].token);
  return Vocabulary(kept);
}

}  // namespace vcdm
