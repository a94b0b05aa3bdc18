#include "config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace nrw::cli {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '[') ++depth;
    if (c == ']') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

Config Config::parse(const std::string& text, const std::string& source) {
  Config c;
  c.source_ = source;
  c.text_ = text;
  std::istringstream is(text);
  std::string raw, section;
  int line = 0;
  auto where = [&] { return source + ":" + std::to_string(line) + ": "; };
  while (std::getline(is, raw)) {
    ++line;
    std::string s = trim(raw.substr(0, raw.find('#')));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(where() + "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) throw ConfigError(where() + "empty section name");
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(where() + "expected `key = value`");
    std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(where() + "missing key before '='");
    if (section == "sweep") {
      for (const auto& [k, v] : c.sweep_)
        if (k == key) throw ConfigError(where() + "duplicate sweep key '" + key + "'");
      c.sweep_.emplace_back(key, split_list(value));
      continue;
    }
    auto it = c.entries_.find(key);
    if (it != c.entries_.end())
      throw ConfigError(where() + "duplicate key '" + key + "' (first set on line " + std::to_string(it->second.line) +
                        ")");
    c.entries_[key] = Entry{value, section, line};
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void Config::set(const std::string& key, const std::string& value, const std::string& origin) {
  entries_[key] = Entry{value, "", 0};
  overrides_.push_back({key, value, origin});
}

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

const Entry& Config::entry(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(source_ + ": missing required key '" + key + "'");
  return it->second;
}

void Config::fail(const std::string& key, const std::string& what) const {
  auto it = entries_.find(key);
  std::string at = it == entries_.end() ? source_ + " (default)"
                   : it->second.line > 0 ? source_ + ":" + std::to_string(it->second.line)
                                         : std::string("command line");
  throw ConfigError(at + ": key '" + key + "': " + what);
}

std::string Config::str(const std::string& key) const { return entry(key).value; }

std::string Config::str(const std::string& key, const std::string& fallback) const {
  return has(key) ? str(key) : fallback;
}

namespace {

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  // Allow simple ratios such as 1/512.
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    double a, b;
    if (!parse_double(trim(s.substr(0, slash)), a) || !parse_double(trim(s.substr(slash + 1)), b) || b == 0.0)
      return false;
    out = a / b;
    return true;
  }
  char* end = nullptr;
  errno = 0;
  out = std::strtod(s.c_str(), &end);
  return errno == 0 && end && *end == '\0' && std::isfinite(out);
}

}  // namespace

double Config::num(const std::string& key) const {
  double v;
  if (!parse_double(str(key), v)) fail(key, "expected a number, got '" + str(key) + "'");
  return v;
}

double Config::num(const std::string& key, double fallback) const { return has(key) ? num(key) : fallback; }

long Config::integer(const std::string& key, long fallback) const {
  if (!has(key)) return fallback;
  double v = num(key);
  if (v != std::floor(v) || std::abs(v) > 1e15) fail(key, "expected an integer");
  return static_cast<long>(v);
}

std::vector<double> Config::nums(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(str(key))) {
    double v;
    if (!parse_double(item, v)) fail(key, "expected a list of numbers, got '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) fail(key, "empty list");
  return out;
}

std::vector<double> Config::nums(const std::string& key, const std::vector<double>& fallback) const {
  return has(key) ? nums(key) : fallback;
}

std::vector<int> Config::ints(const std::string& key) const {
  std::vector<int> out;
  for (double v : nums(key)) {
    if (v != std::floor(v) || std::abs(v) > 1e9) fail(key, "expected integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<std::string> Config::list(const std::string& key, const std::string& fallback) const {
  auto out = split_list(str(key, fallback));
  if (out.empty()) {
    if (has(key)) fail(key, "empty list");
    throw ConfigError(source_ + ": key '" + key + "' has no value");
  }
  return out;
}

std::string Config::echo() const {
  std::ostringstream os;
  std::istringstream is(text_);
  std::string line;
  while (std::getline(is, line)) os << "# " << line << "\n";
  for (const auto& o : overrides_) os << "# " << o.key << " = " << o.value << "  (" << o.origin << ")\n";
  return os.str();
}

}  // namespace nrw::cli
