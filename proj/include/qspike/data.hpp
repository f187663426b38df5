#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace qspike::data {

inline constexpr std::uint32_t kImageMagic = 0x00000803;
inline constexpr std::uint32_t kLabelMagic = 0x00000801;

/// Images stored row-major, `rows*cols` pixels in [0, 1] per sample.
struct Dataset {
  std::string name;
  std::size_t rows = 28;
  std::size_t cols = 28;
  std::vector<double> images;
  std::vector<int> labels;
  int n_classes = 10;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t pixels() const noexcept { return rows * cols; }
  std::span<const double> image(std::size_t i) const { return {images.data() + i * pixels(), pixels()}; }
  std::span<double> image(std::size_t i) { return {images.data() + i * pixels(), pixels()}; }
};

/// Reads an IDX image/label pair (optionally gzip-compressed) and scales
/// bytes to [0, 1] by /255.
Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path);

/// Writes the pair uncompressed; pixels are quantised with round(255 * x).
void write_idx(const Dataset& ds, const std::filesystem::path& images_path, const std::filesystem::path& labels_path);

/// Keeps samples whose label is in `keep`, relabelled to its position in
/// `keep`. Sample order is preserved. Unless `allow_empty`, an empty result
/// throws ArgumentError.
Dataset filter_classes(const Dataset& ds, std::span<const int> keep, bool allow_empty = false);

/// First `n` samples (all of them when n >= size).
Dataset take_first(const Dataset& ds, std::size_t n);

/// Subset by sample indices, in the given order.
Dataset select(const Dataset& ds, std::span<const std::size_t> indices);

struct FoldPlan {
  int k = 5;
  std::vector<int> assignments;  // fold index per sample

  std::vector<std::size_t> members(int fold) const;
  std::vector<std::size_t> complement(int fold) const;
};

/// Seeded shuffle of [0, n) then round-robin assignment to k folds.
FoldPlan kfold_splits(std::size_t n, int k, std::uint64_t seed);

// --- Known datasets -------------------------------------------------------

enum class Split { train, test };

struct DatasetInfo {
  std::string name;                 // mnist | fashion | kmnist
  std::vector<int> default_classes; // the four-class reduction
};

/// Throws ArgumentError for unknown names.
DatasetInfo dataset_info(const std::string& name);

/// Locates the IDX pair for `split` under `dir` (also `dir/<name>`), accepting
/// the standard file names with or without `.gz`, and loads it.
Dataset load_named(const std::string& name, const std::filesystem::path& dir, Split split);

/// Parses "6,7,8,9".
std::vector<int> parse_class_list(const std::string& text);

}  // namespace qspike::data
