#include "config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <string_view>
#include <vector>

#include "blat/errors.hpp"

namespace blat::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    parts.push_back(trim(s.substr(pos, next == std::string_view::npos ? next : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

double to_double(std::string_view text, const std::string& key) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::ConfigError, key, "not a number: '" + std::string(text) + "'");
  }
  return value;
}

Vector to_vector(std::string_view text, const std::string& key) {
  const auto parts = split(text, ',');
  Vector v(static_cast<Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v(static_cast<Index>(i)) = to_double(parts[i], key);
  return v;
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& source) {
  Config cfg;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ConfigError, source + ":" + std::to_string(number), "expected key = value");
    }
    const std::string key(trim(text.substr(0, eq)));
    if (key.empty()) {
      throw Error(ErrorCode::ConfigError, source + ":" + std::to_string(number), "empty key");
    }
    if (cfg.has(key)) throw Error(ErrorCode::ConfigError, key, "duplicate key");
    cfg.values_[key] = std::string(trim(text.substr(eq + 1)));
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, path.string(), "cannot open config file");
  return parse(in, path.string());
}

const std::string& Config::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorCode::ConfigError, key, "required key is missing");
  return it->second;
}

std::string Config::text_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

double Config::number(const std::string& key) const { return to_double(text(key), key); }

double Config::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

long long Config::integer(const std::string& key) const {
  const std::string& t = text(key);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw Error(ErrorCode::ConfigError, key, "not an integer: '" + t + "'");
  }
  return value;
}

Vector Config::vector(const std::string& key) const { return to_vector(text(key), key); }

Matrix Config::matrix(const std::string& key) const {
  const auto rows = split(text(key), ';');
  std::vector<Vector> parsed;
  for (const auto row : rows) parsed.push_back(to_vector(row, key));
  const Index cols = parsed.front().size();
  Matrix a(static_cast<Index>(parsed.size()), cols);
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    if (parsed[i].size() != cols) throw Error(ErrorCode::ConfigError, key, "ragged matrix rows");
    a.row(static_cast<Index>(i)) = parsed[i].transpose();
  }
  return a;
}

void Config::require_known(const std::set<std::string>& allowed) const {
  for (const auto& [key, value] : values_) {
    if (allowed.count(key) == 0) throw Error(ErrorCode::ConfigError, key, "unknown key");
  }
}

}  // namespace blat::cli
