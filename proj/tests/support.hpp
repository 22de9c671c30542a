#pragma once

// Shared helpers for the unit, integration and acceptance tests.

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vcdm/config.hpp"
#include "vcdm/corpus.hpp"
#include "vcdm/model.hpp"

namespace vcdm::testing {

inline std::filesystem::path source_dir() { return VCDM_SOURCE_DIR; }
inline std::filesystem::path fixture(const std::string& name) { return source_dir() / "data" / "fixtures" / name; }
inline std::filesystem::path cli_path() { return VCDM_CLI_PATH; }

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

// Fresh scratch directory under the build tree's temp area.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("vcdm_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline RunConfig small_config() {
  RunConfig c;
  c.model.encoder.embedding_dim = 8;
  c.model.encoder.context_hidden = 12;
  c.model.encoder.definition_hidden = 12;
  c.model.encoder.layers = 1;
  c.model.latent_dim = 4;
  c.model.decoder_hidden = 10;
  c.model.decoder_embedding = 6;
  c.model.init_scale = 0.5;
  return c;
}

inline Vocabulary word_vocab(std::size_t words) {
  std::vector<std::string> w;
  for (std::size_t i = 0; i < words; ++i) w.push_back("w" + std::to_string(i));
  return Vocabulary(w);
}

inline std::string random_sentence(std::mt19937_64& rng, std::size_t words, std::size_t min_len,
                                   std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<std::size_t> tok(0, words - 1);
  std::string s;
  const std::size_t n = len(rng);
  for (std::size_t i = 0; i < n; ++i) s += (i ? " w" : "w") + std::to_string(tok(rng));
  return s;
}

inline Example random_example(std::mt19937_64& rng, std::size_t words) {
  Example ex;
  ex.phrase = random_sentence(rng, words, 1, 2);
  ex.context = random_sentence(rng, words, 2, 6) + " " + ex.phrase + " " + random_sentence(rng, words, 1, 3);
  ex.definition = random_sentence(rng, words, 2, 5);
  return ex;
}

inline DefinitionModel random_model(std::uint64_t seed, const ModelConfig& config, std::size_t words = 10) {
  return DefinitionModel(config, word_vocab(words), word_vocab(words), seed);
}

}  // namespace vcdm::testing
