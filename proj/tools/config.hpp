#ifndef WDRO_CLI_CONFIG_HPP
#define WDRO_CLI_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wdrocli {

// Flat sectioned key = value file. `[section]` headers prefix bare keys with
// "section."; fully dotted keys work anywhere; '#' starts a comment.
class Config {
public:
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  std::string str(const std::string& key, const std::string& fallback = "") const;
  std::string require_str(const std::string& key) const;
  double num(const std::string& key, double fallback) const;
  double require_num(const std::string& key) const;
  std::uint64_t u64(const std::string& key, std::uint64_t fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> num_list(const std::string& key) const;            // comma separated
  std::vector<std::vector<double>> num_rows(const std::string& key) const;  // ';' rows

  const std::string& raw_text() const { return raw_; }

private:
  std::map<std::string, std::string> kv_;
  std::string raw_;
};

// FNV-1a 64 over the raw config bytes plus any seed override.
std::string config_hash(const std::string& raw, std::optional<std::uint64_t> seed_override);

struct CsvData {
  int dim = 0;
  std::vector<double> atoms;  // row-major
};

CsvData load_returns_csv(const std::string& path);

}  // namespace wdrocli

#endif
