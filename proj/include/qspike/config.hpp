#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace qspike::config {

/// Flat view of a `[section]` / `key = value` text file, keyed "section.key".
/// `#` and `;` start comment lines. Keys before any section header live in
/// the "" section and are keyed by their bare name.
class ConfigFile {
 public:
  static ConfigFile parse(const std::string& text);
  static ConfigFile load(const std::filesystem::path& path);

  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace qspike::config
