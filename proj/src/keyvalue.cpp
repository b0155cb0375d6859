// SPDX-License-Identifier: Apache-2.0
#include "framing/keyvalue.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "framing/error.hpp"

namespace framing {

std::string trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

KeyValues KeyValues::parse(std::istream& in, const std::string& source) {
  KeyValues kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) throw DataError(source, lineno, "expected 'key = value'");
    std::string key = trim(std::string_view(t).substr(0, eq));
    if (key.empty()) throw DataError(source, lineno, "empty key");
    kv.values_[key] = trim(std::string_view(t).substr(eq + 1));
  }
  return kv;
}

KeyValues KeyValues::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse(in, path.string());
}

void KeyValues::write(std::ostream& out) const {
  for (const auto& [key, value] : values_) out << key << " = " << value << '\n';
}

void KeyValues::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write(out);
}

std::optional<std::string> KeyValues::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValues::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

double KeyValues::get_double(const std::string& key, double fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    double d = std::stod(*v, &used);
    if (used != v->size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + *v + "'");
  }
}

std::int64_t KeyValues::get_int(const std::string& key, std::int64_t fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size()) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + *v + "'");
  }
  return out;
}

std::vector<double> KeyValues::get_doubles(const std::string& key,
                                           std::vector<double> fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(*v)) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': '" + item + "' is not a number");
    }
  }
  return out;
}

std::vector<std::string> KeyValues::get_list(const std::string& key) const {
  auto v = get(key);
  return v ? split_list(*v) : std::vector<std::string>{};
}

void KeyValues::require_known(const std::vector<std::string>& known) const {
  for (const auto& [key, _] : values_) {
    bool ok = false;
    for (const auto& k : known) ok = ok || k == key;
    if (!ok) throw ConfigError("unknown key '" + key + "'");
  }
}

}  // namespace framing
