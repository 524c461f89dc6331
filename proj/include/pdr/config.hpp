#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pdr {

/// Flat `key = value` text; `#` starts a comment, blank lines are ignored.
class KeyValues {
 public:
  static KeyValues parse(std::string_view text, const std::string& origin = "config");
  static KeyValues load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }
  [[nodiscard]] std::optional<std::string> get(const std::string& key) const;
  [[nodiscard]] const std::map<std::string, std::string>& entries() const { return values_; }

  // Typed reads; malformed values raise InputError naming the key.
  [[nodiscard]] double number(const std::string& key, double fallback) const;
  [[nodiscard]] long integer(const std::string& key, long fallback) const;
  [[nodiscard]] bool boolean(const std::string& key, bool fallback) const;
  [[nodiscard]] std::string text(const std::string& key, const std::string& fallback) const;

  /// Keys not in `known`; used to reject typos in config files.
  [[nodiscard]] std::vector<std::string> unknown_keys(const std::vector<std::string>& known) const;

  [[nodiscard]] std::string dump() const;

 private:
  std::map<std::string, std::string> values_;
  std::string origin_ = "config";
};

double parse_number(std::string_view text, const std::string& what);
std::string format_number(double value);
std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char delimiter);

}  // namespace pdr
