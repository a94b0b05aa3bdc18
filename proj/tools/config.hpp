#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace nrw::cli {

// Bad input in a config file or on the command line (exit status 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Entry {
  std::string value;
  std::string section;  // "" for keys before any [section]
  int line = 0;         // 0 for command-line overrides
};

// `key = value` lines with optional [section] headers and # comments. Sections
// only group keys; a key may appear once across all sections except [sweep],
// whose entries are value lists for the parameter grid.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& source);
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value, const std::string& origin = "command line");
  bool has(const std::string& key) const;
  const Entry& entry(const std::string& key) const;

  std::string str(const std::string& key) const;
  std::string str(const std::string& key, const std::string& fallback) const;
  double num(const std::string& key) const;
  double num(const std::string& key, double fallback) const;
  long integer(const std::string& key, long fallback) const;
  std::vector<double> nums(const std::string& key) const;
  std::vector<double> nums(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<int> ints(const std::string& key) const;
  std::vector<std::string> list(const std::string& key, const std::string& fallback) const;

  // The sweep grid in file order.
  const std::vector<std::pair<std::string, std::vector<std::string>>>& sweep() const { return sweep_; }
  const std::map<std::string, Entry>& entries() const { return entries_; }
  const std::string& source() const { return source_; }

  // Verbatim input text (comments included), then overrides, one `# ` line each.
  std::string echo() const;

  // ConfigError anchored at the line (or command-line flag) that set `key`.
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;

 private:
  std::string source_;
  std::string text_;
  std::map<std::string, Entry> entries_;
  struct Override {
    std::string key, value, origin;
  };
  std::vector<Override> overrides_;
  std::vector<std::pair<std::string, std::vector<std::string>>> sweep_;
};

// Splits on commas outside [...] and trims each item; empty input gives no items.
std::vector<std::string> split_list(const std::string& s);
std::string trim(const std::string& s);

}  // namespace nrw::cli
