#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qspike/model.hpp"
#include "qspike/noise.hpp"
#include "qspike/train.hpp"

namespace qspike::cli {

enum class Command { train, eval, corrupt, report };

/// A noise kind swept over a list of values of one parameter.
struct Sweep {
  noise::NoiseSpec base;
  std::string param;
  std::vector<double> values;

  std::vector<noise::NoiseSpec> points() const;
};

/// Parses `kind:param=a,b,c`; an empty value list is allowed.
Sweep parse_sweep(const std::string& text);

struct ExperimentSpec {
  Command command = Command::train;
  std::string dataset = "mnist";
  std::filesystem::path data_dir = ".";
  std::optional<std::vector<int>> classes;  // default: the dataset's four-class set
  std::size_t train_size = 954;
  std::string split = "test";  // corrupt only
  std::optional<noise::NoiseSpec> noise;
  std::optional<Sweep> sweep;
  std::filesystem::path checkpoint;
  std::filesystem::path out = "out";
  std::uint64_t seed = 0;
  model::ModelConfig model;
  train::TrainConfig train;
  std::string name;  // model column of metric rows; defaults from the head kind
  std::vector<std::filesystem::path> inputs;  // report only
  bool plot = false;
};

/// Executes a resolved spec, logging progress to `log`. Throws qspike::Error.
void run(const ExperimentSpec& spec, std::ostream& log);

/// Parses argv (CLI11), merges an optional --config file under the flags,
/// runs, and maps failures to exit codes: 2 arguments, 3 I/O, 4 format,
/// 5 numeric.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qspike::cli
