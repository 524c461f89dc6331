#include "pdr/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pdr/core.hpp"

namespace pdr {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char delimiter) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(delimiter, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_number(std::string_view text, const std::string& what) {
  const auto s = trim(text);
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  double value = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || std::isnan(value))
    throw InputError("config", "'" + what + "': not a number: '" + std::string(s) + "'");
  return value;
}

std::string format_number(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

KeyValues KeyValues::parse(std::string_view text, const std::string& origin) {
  KeyValues kv;
  kv.origin_ = origin;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw InputError("config", origin + " line " + std::to_string(line_no) + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw InputError("config", origin + " line " + std::to_string(line_no) + ": empty key");
    kv.values_[std::string(key)] = std::string(trim(line.substr(eq + 1)));
  }
  return kv;
}

KeyValues KeyValues::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("config", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

std::optional<std::string> KeyValues::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double KeyValues::number(const std::string& key, double fallback) const {
  const auto v = get(key);
  return v ? parse_number(*v, origin_ + ": " + key) : fallback;
}

long KeyValues::integer(const std::string& key, long fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  const auto s = trim(*v);
  long value = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw InputError("config", origin_ + ": '" + key + "' is not an integer: '" + *v + "'");
  return value;
}

bool KeyValues::boolean(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  throw InputError("config", origin_ + ": '" + key + "' is not a boolean: '" + *v + "'");
}

std::string KeyValues::text(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

std::vector<std::string> KeyValues::unknown_keys(const std::vector<std::string>& known) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_)
    if (std::find(known.begin(), known.end(), k) == known.end()) out.push_back(k);
  return out;
}

std::string KeyValues::dump() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

}  // namespace pdr
