#include "vcdm/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "vcdm/errors.hpp"
#include "vcdm/text.hpp"

namespace vcdm {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(const std::string& key, const std::string& raw) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (ec != std::errc() || end != raw.data() + raw.size()) throw ConfigError("config: " + key + ": not a number: " + raw);
  return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& raw) {
  std::uint64_t v = 0;
  auto [end, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (ec != std::errc() || end != raw.data() + raw.size())
    throw ConfigError("config: " + key + ": not a non-negative integer: " + raw);
  return v;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  if (raw == "true" || raw == "1") return true;
  if (raw == "false" || raw == "0") return false;
  throw ConfigError("config: " + key + ": expected true or false, got " + raw);
}

struct Key {
  std::string name;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <class Access>
Key uint_key(std::string name, Access access) {
  return {name, [access](RunConfig copy) { return std::to_string(access(copy)); },
          [access, name](RunConfig& c, const std::string& v) {
            access(c) = static_cast<std::remove_reference_t<decltype(access(c))>>(parse_uint(name, v));
          }};
}

template <class Access>
Key double_key(std::string name, Access access) {
  return {name, [access](RunConfig copy) { return format_double(access(copy)); },
          [access, name](RunConfig& c, const std::string& v) { access(c) = parse_double(name, v); }};
}

template <class Access>
Key bool_key(std::string name, Access access) {
  return {name, [access](RunConfig copy) { return access(copy) ? "true" : "false"; },
          [access, name](RunConfig& c, const std::string& v) { access(c) = parse_bool(name, v); }};
}

template <class Enum, class Access>
Key enum_key(std::string name, Access access, std::vector<std::pair<std::string, Enum>> names) {
  return {name,
          [access, names](RunConfig copy) {
            const Enum value = access(copy);
            for (const auto& [n, e] : names) {
              if (e == value) return n;
            }
            return std::string("?");
          },
          [access, names, name](RunConfig& c, const std::string& v) {
            for (const auto& [n, e] : names) {
              if (n == v) {
                access(c) = e;
                return;
              }
            }
            throw ConfigError("config: " + name + ": unknown value " + v);
          }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    // model
    k.push_back(enum_key<EncoderKind>("encoder_kind", [](RunConfig& c) -> auto& { return c.model.encoder.kind; },
                                      {{"bilstm", EncoderKind::bilstm},
                                       {"self_attention", EncoderKind::self_attention},
                                       {"bag_of_words", EncoderKind::bag_of_words}}));
    k.push_back(uint_key("embedding_dim", [](RunConfig& c) -> auto& { return c.model.encoder.embedding_dim; }));
    k.push_back(uint_key("context_hidden", [](RunConfig& c) -> auto& { return c.model.encoder.context_hidden; }));
    k.push_back(uint_key("definition_hidden", [](RunConfig& c) -> auto& { return c.model.encoder.definition_hidden; }));
    k.push_back(uint_key("encoder_layers", [](RunConfig& c) -> auto& { return c.model.encoder.layers; }));
    k.push_back(uint_key("encoder_vocab_cap", [](RunConfig& c) -> auto& { return c.model.encoder.vocab_cap; }));
    k.push_back(bool_key("subword_bigrams", [](RunConfig& c) -> auto& { return c.model.encoder.subword_bigrams; }));
    k.push_back(uint_key("latent_dim", [](RunConfig& c) -> auto& { return c.model.latent_dim; }));
    k.push_back(uint_key("decoder_hidden", [](RunConfig& c) -> auto& { return c.model.decoder_hidden; }));
    k.push_back(uint_key("decoder_embedding", [](RunConfig& c) -> auto& { return c.model.decoder_embedding; }));
    k.push_back(uint_key("output_vocab_cap", [](RunConfig& c) -> auto& { return c.model.output_vocab_cap; }));
    k.push_back(bool_key("standard_lstm_cell", [](RunConfig& c) -> auto& { return c.model.standard_lstm_cell; }));
    k.push_back(bool_key("tied_encoders", [](RunConfig& c) -> auto& { return c.model.tied_encoders; }));
    k.push_back(bool_key("prior_hidden_layer", [](RunConfig& c) -> auto& { return c.model.prior_hidden_layer; }));
    k.push_back(enum_key<AttentionProjection>(
        "attention_projection", [](RunConfig& c) -> auto& { return c.model.attention_projection; },
        {{"shared", AttentionProjection::shared}, {"separate", AttentionProjection::separate}}));
    k.push_back(double_key("init_scale", [](RunConfig& c) -> auto& { return c.model.init_scale; }));
    // training
    k.push_back(uint_key("batch_size", [](RunConfig& c) -> auto& { return c.train.batch_size; }));
    k.push_back(double_key("learning_rate", [](RunConfig& c) -> auto& { return c.train.learning_rate; }));
    k.push_back(double_key("target_rate", [](RunConfig& c) -> auto& { return c.train.target_rate; }));
    k.push_back(enum_key<FreeBitsMode>("free_bits_mode", [](RunConfig& c) -> auto& { return c.train.free_bits_mode; },
                                       {{"total", FreeBitsMode::total}, {"per_dim", FreeBitsMode::per_dim}}));
    k.push_back(bool_key("anneal_kl", [](RunConfig& c) -> auto& { return c.train.anneal_kl; }));
    k.push_back(double_key("anneal_midpoint", [](RunConfig& c) -> auto& { return c.train.anneal_midpoint; }));
    k.push_back(double_key("anneal_temperature", [](RunConfig& c) -> auto& { return c.train.anneal_temperature; }));
    k.push_back(uint_key("max_epochs", [](RunConfig& c) -> auto& { return c.train.max_epochs; }));
    k.push_back(uint_key("seed", [](RunConfig& c) -> auto& { return c.train.seed; }));
    k.push_back(bool_key("freeze_context_encoder", [](RunConfig& c) -> auto& { return c.train.freeze_context_encoder; }));
    k.push_back(
        bool_key("freeze_definition_encoder", [](RunConfig& c) -> auto& { return c.train.freeze_definition_encoder; }));
    k.push_back(bool_key("freeze_both", [](RunConfig& c) -> auto& { return c.train.freeze_both; }));
    k.push_back(double_key("clip_norm", [](RunConfig& c) -> auto& { return c.train.clip_norm; }));
    k.push_back(uint_key("max_len", [](RunConfig& c) -> auto& { return c.train.max_len; }));
    k.push_back(uint_key("beam", [](RunConfig& c) -> auto& { return c.train.beam; }));
    return k;
  }();
  return table;
}

}  // namespace

void validate_config(const RunConfig& c) {
  const auto& e = c.model.encoder;
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError("config: " + msg);
  };
  need(e.embedding_dim > 0 && e.context_hidden > 0 && e.definition_hidden > 0, "encoder dimensions must be positive");
  need(e.layers > 0, "encoder_layers must be positive");
  if (e.kind == EncoderKind::bilstm) {
    need(e.context_hidden % 2 == 0 && e.definition_hidden % 2 == 0,
         "bilstm encoders need even context_hidden and definition_hidden");
  }
  need(c.model.latent_dim > 0 && c.model.decoder_hidden > 0 && c.model.decoder_embedding > 0,
       "decoder and latent dimensions must be positive");
  need(e.vocab_cap >= 7 && c.model.output_vocab_cap >= 7, "vocabulary caps must be >= 7");
  need(!c.model.tied_encoders || e.context_hidden == e.definition_hidden,
       "tied_encoders requires context_hidden == definition_hidden");
  need(c.model.init_scale > 0.0, "init_scale must be > 0");
  need(c.train.batch_size >= 1, "batch_size must be >= 1");
  need(c.train.learning_rate > 0.0, "learning_rate must be > 0");
  need(c.train.target_rate >= 0.0, "target_rate must be >= 0");
  need(c.train.anneal_temperature != 0.0, "anneal_temperature must be > 0 (or negative for the default)");
  need(c.train.clip_norm >= 0.0, "clip_norm must be >= 0");
  need(c.train.max_len >= 1 && c.train.beam >= 1, "max_len and beam must be >= 1");
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = normalize_whitespace(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = normalize_whitespace(line.substr(0, eq));
    const std::string value = normalize_whitespace(line.substr(eq + 1));
    const Key* match = nullptr;
    for (const auto& k : keys()) {
      if (k.name == key) match = &k;
    }
    if (!match) throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    match->set(config, value);
  }
  validate_config(config);
  return config;
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open config " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const auto& k : keys()) out += k.name + " = " + k.get(config) + "\n";
  return out;
}

}  // namespace vcdm
