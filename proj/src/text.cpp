#include "vcdm/text.hpp"

#include <cctype>

namespace vcdm {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

bool is_marker(std::string_view chunk) {
  if (chunk.size() < 3 || chunk.front() != '<' || chunk.back() != '>') return false;
  for (char c : chunk.substr(1, chunk.size() - 2)) {
    if (!std::isalpha(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j == i) break;
    std::string chunk;
    for (char c : text.substr(i, j - i)) chunk.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    i = j;
    if (is_marker(chunk)) {
      tokens.push_back(std::move(chunk));
      continue;
    }
    std::string word;
    for (char c : chunk) {
      if (is_punct(c)) {
        if (!word.empty()) tokens.push_back(std::move(word));
        word.clear();
        tokens.emplace_back(1, c);
      } else {
        word.push_back(c);
      }
    }
    if (!word.empty()) tokens.push_back(std::move(word));
  }
  return tokens;
}

std::string detokenize(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(c);
    }
  }
  return out;
}

std::vector<std::string> bigram_pieces(std::string_view token) {
  std::vector<std::string> pieces;
  for (std::size_t i = 0; i < token.size(); i += 2) {
    std::string piece = i == 0 ? std::string() : std::string("##");
    piece += token.substr(i, 2);
    pieces.push_back(std::move(piece));
  }
  return pieces;
}

}  // namespace vcdm
