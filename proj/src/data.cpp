#include "qspike/data.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "qspike/error.hpp"

namespace qspike::data {

namespace fs = std::filesystem;

namespace {

// gzread passes uncompressed files through unchanged.
std::vector<std::uint8_t> read_all(const fs::path& path) {
  gzFile f = gzopen(path.c_str(), "rb");
  if (f == nullptr) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> out;
  std::uint8_t buf[1 << 16];
  int got = 0;
  while ((got = gzread(f, buf, sizeof buf)) > 0) out.insert(out.end(), buf, buf + got);
  int errnum = Z_OK;
  const char* msg = gzerror(f, &errnum);
  gzclose(f);
  if (got < 0 || (errnum != Z_OK && errnum != Z_STREAM_END)) {
    throw FormatError("corrupt compressed stream in " + path.string() + ": " + msg);
  }
  return out;
}

std::uint32_t be32(const std::vector<std::uint8_t>& b, std::size_t off) {
  return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) | (std::uint32_t{b[off + 2]} << 8) |
         std::uint32_t{b[off + 3]};
}

void put_be32(std::ostream& os, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8),
                         static_cast<char>(v)};
  os.write(bytes, 4);
}

}  // namespace

Dataset load_idx(const fs::path& images_path, const fs::path& labels_path) {
  const auto img = read_all(images_path);
  const auto lab = read_all(labels_path);

  if (img.size() < 16) throw FormatError(images_path.string() + ": too short for an IDX image header");
  if (be32(img, 0) != kImageMagic) throw FormatError(images_path.string() + ": bad magic number for IDX images");
  if (lab.size() < 8) throw FormatError(labels_path.string() + ": too short for an IDX label header");
  if (be32(lab, 0) != kLabelMagic) throw FormatError(labels_path.string() + ": bad magic number for IDX labels");

  const std::size_t n = be32(img, 4);
  const std::size_t rows = be32(img, 8);
  const std::size_t cols = be32(img, 12);
  const std::size_t n_labels = be32(lab, 4);
  if (img.size() != 16 + n * rows * cols) {
    throw FormatError(images_path.string() + ": length " + std::to_string(img.size()) + " does not match header (" +
                      std::to_string(16 + n * rows * cols) + " bytes)");
  }
  if (lab.size() != 8 + n_labels) {
    throw FormatError(labels_path.string() + ": length does not match header");
  }
  if (n != n_labels) {
    throw FormatError("image count " + std::to_string(n) + " differs from label count " + std::to_string(n_labels));
  }

  Dataset ds;
  ds.name = images_path.stem().string();
  ds.rows = rows;
  ds.cols = cols;
  ds.images.resize(n * rows * cols);
  for (std::size_t i = 0; i < ds.images.size(); ++i) ds.images[i] = img[16 + i] / 255.0;
  ds.labels.resize(n);
  int max_label = -1;
  for (std::size_t i = 0; i < n; ++i) {
    ds.labels[i] = lab[8 + i];
    max_label = std::max(max_label, ds.labels[i]);
  }
  ds.n_classes = std::max(10, max_label + 1);
  return ds;
}

void write_idx(const Dataset& ds, const fs::path& images_path, const fs::path& labels_path) {
  if (ds.images.size() != ds.size() * ds.pixels()) throw ShapeError("dataset images and labels disagree in count");
  std::ofstream img(images_path, std::ios::binary);
  std::ofstream lab(labels_path, std::ios::binary);
  if (!img || !lab) throw IoError("cannot create IDX files " + images_path.string() + ", " + labels_path.string());

  put_be32(img, kImageMagic);
  put_be32(img, static_cast<std::uint32_t>(ds.size()));
  put_be32(img, static_cast<std::uint32_t>(ds.rows));
  put_be32(img, static_cast<std::uint32_t>(ds.cols));
  std::vector<char> bytes(ds.images.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const double v = std::clamp(ds.images[i], 0.0, 1.0);
    bytes[i] = static_cast<char>(static_cast<std::uint8_t>(std::lround(v * 255.0)));
  }
  img.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));

  put_be32(lab, kLabelMagic);
  put_be32(lab, static_cast<std::uint32_t>(ds.size()));
  for (int l : ds.labels) {
    if (l < 0 || l > 255) throw ArgumentError("label " + std::to_string(l) + " does not fit an IDX byte");
    lab.put(static_cast<char>(l));
  }
  if (!img || !lab) throw IoError("write failed for " + images_path.string());
}

Dataset filter_classes(const Dataset& ds, std::span<const int> keep, bool allow_empty) {
  if (keep.empty()) throw ArgumentError("class list is empty");
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] < 0 || keep[i] >= ds.n_classes) {
      throw ArgumentError("class " + std::to_string(keep[i]) + " does not exist in " + ds.name);
    }
    if (std::find(keep.begin(), keep.begin() + i, keep[i]) != keep.begin() + i) {
      throw ArgumentError("class " + std::to_string(keep[i]) + " listed twice");
    }
  }
  Dataset out;
  out.name = ds.name;
  out.rows = ds.rows;
  out.cols = ds.cols;
  out.n_classes = static_cast<int>(keep.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto it = std::find(keep.begin(), keep.end(), ds.labels[i]);
    if (it == keep.end()) continue;
    out.labels.push_back(static_cast<int>(it - keep.begin()));
    const auto src = ds.image(i);
    out.images.insert(out.images.end(), src.begin(), src.end());
  }
  if (out.size() == 0 && !allow_empty) throw ArgumentError("no samples of the requested classes in " + ds.name);
  return out;
}

Dataset take_first(const Dataset& ds, std::size_t n) {
  std::vector<std::size_t> idx(std::min(n, ds.size()));
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return select(ds, idx);
}

Dataset select(const Dataset& ds, std::span<const std::size_t> indices) {
  Dataset out;
  out.name = ds.name;
  out.rows = ds.rows;
  out.cols = ds.cols;
  out.n_classes = ds.n_classes;
  out.labels.reserve(indices.size());
  out.images.reserve(indices.size() * ds.pixels());
  for (std::size_t i : indices) {
    if (i >= ds.size()) throw IndexError("sample " + std::to_string(i));
    out.labels.push_back(ds.labels[i]);
    const auto src = ds.image(i);
    out.images.insert(out.images.end(), src.begin(), src.end());
  }
  return out;
}

std::vector<std::size_t> FoldPlan::members(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::complement(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != fold) out.push_back(i);
  }
  return out;
}

FoldPlan kfold_splits(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2) throw ArgumentError("k-fold needs k >= 2");
  if (n < static_cast<std::size_t>(k)) {
    throw ArgumentError("cannot split " + std::to_string(n) + " samples into " + std::to_string(k) + " folds");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  FoldPlan plan{k, std::vector<int>(n, 0)};
  for (std::size_t pos = 0; pos < n; ++pos) plan.assignments[order[pos]] = static_cast<int>(pos % k);
  return plan;
}

DatasetInfo dataset_info(const std::string& name) {
  if (name == "mnist") return {name, {6, 7, 8, 9}};
  // Sneaker, Ankle boot, Bag, Shirt in the published label numbering.
  if (name == "fashion") return {name, {7, 9, 8, 6}};
  if (name == "kmnist") return {name, {0, 1, 2, 3}};
  throw ArgumentError("unknown dataset '" + name + "' (expected mnist, fashion or kmnist)");
}

Dataset load_named(const std::string& name, const fs::path& dir, Split split) {
  dataset_info(name);
  const std::string prefix = split == Split::train ? "train" : "t10k";
  const std::string images = prefix + "-images-idx3-ubyte";
  const std::string labels = prefix + "-labels-idx1-ubyte";
  for (const fs::path& base : {dir / name, dir}) {
    for (const char* ext : {"", ".gz"}) {
      const fs::path ip = base / (images + ext);
      const fs::path lp = base / (labels + ext);
      if (fs::exists(ip) && fs::exists(lp)) {
        Dataset ds = load_idx(ip, lp);
        ds.name = name;
        return ds;
      }
    }
  }
  throw IoError("no " + prefix + " IDX files for " + name + " under " + dir.string());
}

std::vector<int> parse_class_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::logic_error&) {
      throw ArgumentError("bad class list entry '" + item + "'");
    }
  }
  if (out.empty()) throw ArgumentError("class list is empty");
  return out;
}

}  // namespace qspike::data
