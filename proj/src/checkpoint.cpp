#include "vcdm/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "vcdm/errors.hpp"

namespace vcdm {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

class Writer {
 public:
  void raw(const void* data, std::size_t n) { out_.append(static_cast<const char*>(data), n); }
  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void u64(std::uint64_t v) { raw(&v, sizeof v); }
  void str(const std::string& s) {
    u64(s.size());
    raw(s.data(), s.size());
  }
  void vocab(const Vocabulary& v) {
    u64(v.size());
    for (const auto& t : v.tokens()) str(t);
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}
  void raw(void* dst, std::size_t n) {
    if (n > bytes_.size() - pos_) throw SchemaError("checkpoint: truncated file");
    std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
  }
  std::uint32_t u32() {
    std::uint32_t v;
    raw(&v, sizeof v);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    raw(&v, sizeof v);
    return v;
  }
  std::string str() {
    const std::uint64_t n = u64();
    if (n > bytes_.size() - pos_) throw SchemaError("checkpoint: truncated string");
    std::string s(bytes_.data() + pos_, n);
    pos_ += n;
    return s;
  }
  std::vector<std::string> vocab() {
    const std::uint64_t n = u64();
    if (n > bytes_.size()) throw SchemaError("checkpoint: implausible vocabulary size");
    std::vector<std::string> tokens;
    for (std::uint64_t i = 0; i < n; ++i) tokens.push_back(str());
    return tokens;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

Vocabulary vocab_from_tokens(const std::vector<std::string>& tokens) {
  const auto& reserved = reserved_tokens();
  if (tokens.size() < reserved.size() || !std::equal(reserved.begin(), reserved.end(), tokens.begin())) {
    throw SchemaError("checkpoint: vocabulary does not start with the reserved tokens");
  }
  return Vocabulary(std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(reserved.size()), tokens.end()));
}

}  // namespace

std::string serialize_checkpoint(const DefinitionModel& model, const RunConfig& config) {
  Writer w;
  w.raw(kCheckpointMagic, sizeof kCheckpointMagic);
  w.u32(kCheckpointVersion);
  RunConfig stored = config;
  stored.model = model.config();
  w.str(serialize_config(stored));
  w.vocab(model.encoder_vocab());
  w.vocab(model.output_vocab());
  const auto& entries = model.parameters().entries();
  w.u64(entries.size());
  for (const auto& p : entries) {
    w.str(p.name);
    const Shape& shape = p.tensor.shape();
    w.u32(static_cast<std::uint32_t>(shape.size()));
    for (std::size_t d : shape) w.u64(d);
    auto values = p.tensor.values();
    w.raw(values.data(), values.size() * sizeof(double));
  }
  return w.take();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

void save_checkpoint(const DefinitionModel& model, const RunConfig& config, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_checkpoint(model, config));
}

LoadedCheckpoint deserialize_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  char magic[8];
  r.raw(magic, sizeof magic);
  if (std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0) throw SchemaError("checkpoint: bad magic (not a VCDM checkpoint)");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw VersionError("checkpoint: format version " + std::to_string(version) + " is not supported (expected " +
                       std::to_string(kCheckpointVersion) + ")");
  }
  RunConfig config;
  try {
    config = parse_config(r.str());
  } catch (const ConfigError& e) {
    throw SchemaError(std::string("checkpoint: stored config invalid: ") + e.what());
  }
  Vocabulary enc = vocab_from_tokens(r.vocab());
  Vocabulary out = vocab_from_tokens(r.vocab());
  DefinitionModel model(config.model, std::move(enc), std::move(out), config.train.seed);

  auto& entries = model.parameters().entries();
  const std::uint64_t count = r.u64();
  if (count != entries.size()) {
    throw SchemaError("checkpoint: holds " + std::to_string(count) + " parameters, model declares " +
                      std::to_string(entries.size()));
  }
  for (auto& p : entries) {
    const std::string name = r.str();
    if (name != p.name) throw SchemaError("checkpoint: expected parameter " + p.name + ", found " + name);
    const std::uint32_t rank = r.u32();
    Shape shape(rank);
    for (auto& d : shape) d = r.u64();
    if (shape != p.tensor.shape()) {
      throw SchemaError("checkpoint: parameter " + name + " has shape " + shape_string(shape) + ", expected " +
                        shape_string(p.tensor.shape()));
    }
    auto values = p.tensor.mutable_values();
    r.raw(values.data(), values.size() * sizeof(double));
  }
  if (!r.done()) throw SchemaError("checkpoint: trailing bytes");
  return {config, std::move(model)};
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_checkpoint(buf.str());
}

}  // namespace vcdm
