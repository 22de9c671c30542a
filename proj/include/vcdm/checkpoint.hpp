#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "vcdm/config.hpp"
#include "vcdm/model.hpp"

namespace vcdm {

inline constexpr char kCheckpointMagic[8] = {'V', 'C', 'D', 'M', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

// Layout (little-endian):
//   magic[8] | u32 version | str config | vocab encoder | vocab output |
//   u64 param count | { str name | u32 rank | u64 dims[rank] | f64 values[] }...
// with str = u64 length + bytes and vocab = u64 count + str tokens.
std::string serialize_checkpoint(const DefinitionModel& model, const RunConfig& config);
void save_checkpoint(const DefinitionModel& model, const RunConfig& config, const std::filesystem::path& path);

struct LoadedCheckpoint {
  RunConfig config;
  DefinitionModel model;
};

LoadedCheckpoint deserialize_checkpoint(const std::string& bytes);
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

// Writes `bytes` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

}  // namespace vcdm
