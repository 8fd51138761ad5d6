#include "config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wdrocli {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_num(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const std::string t = trim(v);
  const double x = std::strtod(t.c_str(), &end);
  if (end == t.c_str() || *end != '\0')
    throw std::runtime_error("config: key '" + key + "' is not a number: '" + v + "'");
  return x;
}

}  // namespace

Config Config::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::ostringstream whole;
  whole << in.rdbuf();

  Config cfg;
  cfg.raw_ = whole.str();

  std::istringstream lines(cfg.raw_);
  std::string line, section;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: line " + std::to_string(lineno) + " has no '='");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.find('.') == std::string::npos && !section.empty()) key = section + "." + key;
    cfg.kv_[key] = value;
  }
  return cfg;
}

std::string Config::str(const std::string& key, const std::string& fallback) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

std::string Config::require_str(const std::string& key) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) throw std::runtime_error("config: missing required key '" + key + "'");
  return it->second;
}

double Config::num(const std::string& key, double fallback) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? fallback : parse_num(key, it->second);
}

double Config::require_num(const std::string& key) const {
  return parse_num(key, require_str(key));
}

std::uint64_t Config::u64(const std::string& key, std::uint64_t fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  return static_cast<std::uint64_t>(std::strtoull(trim(it->second).c_str(), nullptr, 10));
}

bool Config::flag(const std::string& key, bool fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  const std::string v = trim(it->second);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::runtime_error("config: key '" + key + "' is not a boolean: '" + v + "'");
}

std::vector<double> Config::num_list(const std::string& key) const {
  std::vector<double> out;
  const auto it = kv_.find(key);
  if (it == kv_.end()) return out;
  std::istringstream ss(it->second);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(parse_num(key, tok));
  }
  return out;
}

std::vector<std::vector<double>> Config::num_rows(const std::string& key) const {
  std::vector<std::vector<double>> out;
  const auto it = kv_.find(key);
  if (it == kv_.end()) return out;
  std::istringstream ss(it->second);
  std::string row;
  while (std::getline(ss, row, ';')) {
    std::vector<double> r;
    std::istringstream rs(row);
    std::string tok;
    while (std::getline(rs, tok, ',')) {
      tok = trim(tok);
      if (!tok.empty()) r.push_back(parse_num(key, tok));
    }
    if (!r.empty()) out.push_back(std::move(r));
  }
  return out;
}

std::string config_hash(const std::string& raw, std::optional<std::uint64_t> seed_override) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (unsigned char c : raw) mix(c);
  if (seed_override) {
    const std::string tag = "\nseed-override=" + std::to_string(*seed_override);
    for (unsigned char c : tag) mix(c);
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

CsvData load_returns_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open '" + path + "'");
  CsvData data;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::istringstream ss(line);
    std::string tok;
    bool numeric = true;
    while (std::getline(ss, tok, ',')) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      while (end && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
      if (end == tok.c_str() || (end && *end != '\0')) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (data.atoms.empty() && lineno == 1) continue;  // header row
      throw std::runtime_error("csv: non-numeric value at line " + std::to_string(lineno));
    }
    if (row.empty()) continue;
    if (data.dim == 0) data.dim = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != data.dim)
      throw std::runtime_error("csv: inconsistent column count at line " + std::to_string(lineno));
    data.atoms.insert(data.atoms.end(), row.begin(), row.end());
  }
  if (data.atoms.empty()) throw std::runtime_error("csv: no data rows in '" + path + "'");
  return data;
}

}  // namespace wdrocli
