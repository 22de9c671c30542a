#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "vcdm/vocabulary.hpp"

namespace vcdm {

struct Example {
  std::string phrase;
  std::string context;
  std::string definition;
  std::optional<std::string> sense_id;
};

struct Corpus {
  std::vector<Example> train;
  std::vector<Example> valid;
  std::vector<Example> test;
  std::vector<std::string> warnings;
};

// Reads one JSON Lines partition. Blank lines are skipped. `require_definition`
// is false for generation inputs, which only need phrase and context.
std::vector<Example> read_examples(const std::filesystem::path& file, bool require_definition = true);

// Loads train.jsonl, valid.jsonl and test.jsonl from a directory.
Corpus load_corpus(const std::filesystem::path& dir);

// Inclusive token index range.
struct IndexRange {
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t width() const { return last - first + 1; }
  bool operator==(const IndexRange&) const = default;
};

// [CLS] phrase [SEP] context [SEP]
std::vector<std::string> build_phrase_context_pair(const std::vector<std::string>& phrase,
                                                   const std::vector<std::string>& context);

// Positions of the phrase tokens: between [CLS] and the first [SEP].
IndexRange locate_target_span(const std::vector<std::string>& pair);
IndexRange locate_target_span(std::span<const TokenId> pair_ids);

// Phrase-context pair mapped to encoder ids. With `subword_bigrams`, tokens
// outside the vocabulary are split into character-bigram pieces and the span
// covers every piece of the phrase.
struct EncodedPair {
  std::vector<TokenId> ids;
  IndexRange span;
};

EncodedPair encode_pair(const std::vector<std::string>& phrase, const std::vector<std::string>& context,
                        const Vocabulary& vocab, bool subword_bigrams);

std::vector<TokenId> encode_tokens(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                                   bool subword_bigrams);

// ---- statistics -------------------------------------------------------------

struct LengthStats {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1); 0 when n < 2
};

struct PartitionStats {
  std::string name;
  bool empty = true;
  std::size_t phrases = 0;
  std::size_t examples = 0;
  LengthStats phrase_length;
  LengthStats context_length;
  LengthStats definition_length;
};

struct CorpusStats {
  std::vector<PartitionStats> partitions;  // train, valid, test
  PartitionStats overall;
};

PartitionStats partition_stats(const std::string& name, const std::vector<Example>& examples);
CorpusStats corpus_stats(const Corpus& corpus);
std::string format_stats_table(const CorpusStats& stats);
nlohmann::json stats_to_json(const CorpusStats& stats);

}  // namespace vcdm
