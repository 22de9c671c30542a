#include "vcdm/corpus.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <tuple>

#include "vcdm/errors.hpp"
#include "vcdm/logging.hpp"
#include "vcdm/text.hpp"

namespace vcdm {

namespace {

std::string required_string(const nlohmann::json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(where + ": missing key \"" + key + "\"");
  if (!it->is_string()) throw SchemaError(where + ": key \"" + key + "\" must be a string");
  std::string value = normalize_whitespace(it->get<std::string>());
  if (value.empty()) throw SchemaError(where + ": key \"" + key + "\" is empty");
  return value;
}

}  // namespace

std::vector<Example> read_examples(const std::filesystem::path& file, bool require_definition) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  std::vector<Example> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (normalize_whitespace(line).empty()) continue;
    const std::string where = file.filename().string() + ":" + std::to_string(line_no);
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError(where + ": invalid JSON (" + e.what() + ")");
    }
    if (!obj.is_object()) throw SchemaError(where + ": expected a JSON object");
    Example ex;
    ex.phrase = required_string(obj, "phrase", where);
    ex.context = required_string(obj, "context", where);
    if (require_definition || obj.contains("definition")) ex.definition = required_string(obj, "definition", where);
    if (auto it = obj.find("sense_id"); it != obj.end() && !it->is_null()) {
      if (!it->is_string()) throw SchemaError(where + ": key \"sense_id\" must be a string");
      ex.sense_id = it->get<std::string>();
    }
    out.push_back(std::move(ex));
  }
  if (in.bad()) throw IoError("read failure on " + file.string());
  return out;
}

Corpus load_corpus(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("data directory not found: " + dir.string());
  Corpus corpus;
  corpus.train = read_examples(dir / "train.jsonl");
  corpus.valid = read_examples(dir / "valid.jsonl");
  corpus.test = read_examples(dir / "test.jsonl");
  for (auto [name, part] : {std::pair{"train", &corpus.train}, std::pair{"valid", &corpus.valid},
                            std::pair{"test", &corpus.test}}) {
    if (part->empty()) {
      corpus.warnings.push_back(std::string(name) + " partition is empty");
      logging::info("warning: ", name, " partition is empty");
    }
  }

  using Key = std::tuple<std::string, std::string, std::string>;
  std::set<Key> seen_train;
  for (const auto& ex : corpus.train) seen_train.emplace(ex.phrase, ex.context, ex.definition);
  std::set<Key> seen_valid;
  for (const auto& ex : corpus.valid) {
    Key k{ex.phrase, ex.context, ex.definition};
    if (seen_train.count(k)) throw SchemaError("example appears in both train and valid: " + ex.phrase);
    seen_valid.insert(std::move(k));
  }
  for (const auto& ex : corpus.test) {
    Key k{ex.phrase, ex.context, ex.definition};
    if (seen_train.count(k) || seen_valid.count(k))
      throw SchemaError("test example also appears in another partition: " + ex.phrase);
  }
  return corpus;
}

// ---- pairs ------------------------------------------------------------------

std::vector<std::string> build_phrase_context_pair(const std::vector<std::string>& phrase,
                                                   const std::vector<std::string>& context) {
  if (phrase.empty() || context.empty()) throw ContractError("build_phrase_context_pair: empty phrase or context");
  const auto& reserved = reserved_tokens();
  std::vector<std::string> pair;
  pair.reserve(phrase.size() + context.size() + 3);
  pair.push_back(reserved[kCls]);
  pair.insert(pair.end(), phrase.begin(), phrase.end());
  pair.push_back(reserved[kSep]);
  pair.insert(pair.end(), context.begin(), context.end());
  pair.push_back(reserved[kSep]);
  return pair;
}

IndexRange locate_target_span(const std::vector<std::string>& pair) {
  const auto& reserved = reserved_tokens();
  if (pair.empty() || pair.front() != reserved[kCls]) throw ContractError("locate_target_span: pair must start with [CLS]");
  for (std::size_t i = 1; i < pair.size(); ++i) {
    if (pair[i] == reserved[kSep]) {
      if (i == 1) throw ContractError("locate_target_span: empty phrase");
      return {1, i - 1};
    }
  }
  throw ContractError("locate_target_span: no [SEP] in pair");
}

IndexRange locate_target_span(std::span<const TokenId> ids) {
  if (ids.empty() || ids.front() != kCls) throw ContractError("locate_target_span: pair must start with [CLS]");
  for (std::size_t i = 1; i < ids.size(); ++i) {
    if (ids[i] == kSep) {
      if (i == 1) throw ContractError("locate_target_span: empty phrase");
      return {1, i - 1};
    }
  }
  throw ContractError("locate_target_span: no [SEP] in pair");
}

std::vector<TokenId> encode_tokens(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                                   bool subword_bigrams) {
  std::vector<TokenId> ids;
  for (const auto& tok : tokens) {
    if (!subword_bigrams || vocab.contains(tok)) {
      ids.push_back(vocab.id(tok));
      continue;
    }
    for (const auto& piece : bigram_pieces(tok)) ids.push_back(vocab.id(piece));
  }
  return ids;
}

EncodedPair encode_pair(const std::vector<std::string>& phrase, const std::vector<std::string>& context,
                        const Vocabulary& vocab, bool subword_bigrams) {
  if (phrase.empty() || context.empty()) throw ContractError("encode_pair: empty phrase or context");
  EncodedPair out;
  out.ids.push_back(kCls);
  const auto phrase_ids = encode_tokens(phrase, vocab, subword_bigrams);
  out.ids.insert(out.ids.end(), phrase_ids.begin(), phrase_ids.end());
  out.ids.push_back(kSep);
  const auto context_ids = encode_tokens(context, vocab, subword_bigrams);
  out.ids.insert(out.ids.end(), context_ids.begin(), context_ids.end());
  out.ids.push_back(kSep);
  out.span = {1, phrase_ids.size()};
  return out;
}

// ---- statistics -------------------------------------------------------------

namespace {

LengthStats length_stats(const std::vector<std::size_t>& lengths) {
  LengthStats s;
  if (lengths.empty()) return s;
  double total = 0.0;
  for (auto n : lengths) total += static_cast<double>(n);
  s.mean = total / static_cast<double>(lengths.size());
  if (lengths.size() > 1) {
    double sq = 0.0;
    for (auto n : lengths) sq += (static_cast<double>(n) - s.mean) * (static_cast<double>(n) - s.mean);
    s.sd = std::sqrt(sq / static_cast<double>(lengths.size() - 1));
  }
  return s;
}

std::string fixed(double v, int digits = 2) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

nlohmann::json length_json(const LengthStats& s) { return {{"mean", round2(s.mean)}, {"sd", round2(s.sd)}}; }

nlohmann::json partition_json(const PartitionStats& p) {
  return {{"name", p.name},
          {"empty", p.empty},
          {"phrases", p.phrases},
          {"examples", p.examples},
          {"phrase_length", length_json(p.phrase_length)},
          {"context_length", length_json(p.context_length)},
          {"definition_length", length_json(p.definition_length)}};
}

}  // namespace

PartitionStats partition_stats(const std::string& name, const std::vector<Example>& examples) {
  PartitionStats p;
  p.name = name;
  p.examples = examples.size();
  p.empty = examples.empty();
  std::set<std::string> phrases;
  std::vector<std::size_t> pl, cl, dl;
  for (const auto& ex : examples) {
    const auto phrase_tokens = tokenize(ex.phrase);
    phrases.insert(detokenize(phrase_tokens));
    pl.push_back(phrase_tokens.size());
    cl.push_back(tokenize(ex.context).size());
    dl.push_back(tokenize(ex.definition).size());
  }
  p.phrases = phrases.size();
  p.phrase_length = length_stats(pl);
  p.context_length = length_stats(cl);
  p.definition_length = length_stats(dl);
  return p;
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  stats.partitions.push_back(partition_stats("train", corpus.train));
  stats.partitions.push_back(partition_stats("valid", corpus.valid));
  stats.partitions.push_back(partition_stats("test", corpus.test));
  std::vector<Example> all;
  all.insert(all.end(), corpus.train.begin(), corpus.train.end());
  all.insert(all.end(), corpus.valid.begin(), corpus.valid.end());
  all.insert(all.end(), corpus.test.begin(), corpus.test.end());
  stats.overall = partition_stats("overall", all);
  return stats;
}

std::string format_stats_table(const CorpusStats& stats) {
  auto cell = [](const LengthStats& s) { return fixed(s.mean) + " ± " + fixed(s.sd); };
  std::ostringstream out;
  // Pads by display width; UTF-8 continuation bytes (the "±") take no column.
  auto pad = [](const std::string& s, std::size_t width) {
    std::size_t cols = 0;
    for (unsigned char ch : s) cols += (ch & 0xC0) != 0x80;
    return s + std::string(width > cols ? width - cols : 0, ' ');
  };
  auto line = [&](const std::string& a, const std::string& b, const std::string& c, const std::string& d,
                  const std::string& e, const std::string& f, const std::string& g) {
    std::string row = pad(a, 10);
    row += std::string(b.size() < 9 ? 9 - b.size() : 0, ' ') + b;
    row += std::string(c.size() < 10 ? 10 - c.size() : 0, ' ') + c + "  ";
    row += pad(d, 15) + pad(e, 16) + pad(f, 16) + g;
    while (!row.empty() && row.back() == ' ') row.pop_back();
    out << row << '\n';
  };
  line("Partition", "Phrases", "Examples", "Phrase", "Context", "Definition", "");
  auto emit = [&](const PartitionStats& p) {
    std::string name = p.name;
    name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    line(name, std::to_string(p.phrases), std::to_string(p.examples), cell(p.phrase_length),
         cell(p.context_length), cell(p.definition_length), p.empty ? "(empty)" : "");
  };
  for (const auto& p : stats.partitions) emit(p);
  emit(stats.overall);
  return out.str();
}

nlohmann::json stats_to_json(const CorpusStats& stats) {
  nlohmann::json parts = nlohmann::json::array();
  for (const auto& p : stats.partitions) parts.push_back(partition_json(p));
  return {{"partitions", parts}, {"overall", partition_json(stats.overall)}};
}

}  // namespace vcdm
