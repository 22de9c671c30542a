#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vcdm {

// Lowercases ASCII, splits on whitespace, and separates ASCII punctuation into
// single-character tokens. Angle-bracket markers such as "<unk>" stay whole.
std::vector<std::string> tokenize(std::string_view text);

std::string detokenize(const std::vector<std::string>& tokens);

// Collapses whitespace runs to single spaces and trims both ends.
std::string normalize_whitespace(std::string_view text);

// Deterministic character-bigram split: "running" -> "ru", "##nn", "##in", "##g".
std::vector<std::string> bigram_pieces(std::string_view token);

}  // namespace vcdm
