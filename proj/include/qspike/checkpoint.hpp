#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qspike/model.hpp"
#include "qspike/train.hpp"

namespace qspike::checkpoint {

inline constexpr char kMagic[8] = {'Q', 'S', 'P', 'K', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kVersion = 1;

struct Checkpoint {
  model::RqnnModel model;
  train::AdamState optimizer;
  std::uint64_t seed = 0;
};

/// Serialises to the version-1 layout described in docs/checkpoint-format.md.
std::vector<std::uint8_t> encode(const Checkpoint& ckpt);

/// Throws FormatError on bad magic, unknown version, truncation, trailing
/// bytes, checksum mismatch or inconsistent tensor shapes.
Checkpoint decode(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const model::RqnnModel& model, const train::AdamState& optimizer, std::uint64_t seed,
                     const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace qspike::checkpoint
