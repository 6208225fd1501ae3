#pragma once

// Experiment configuration files: INI-style sections of key = value pairs,
// '#' or ';' comments, whitespace-insensitive. Lists are space-separated.

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nrj {

class Config {
 public:
  static Config parse(std::istream& in, const std::string& name = "config") {
    Config cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find_first_of("#;");
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      if (trimmed.front() == '[') {
        if (trimmed.back() != ']')
          throw std::runtime_error(name + ":" + std::to_string(lineno) +
                                   ": malformed section header");
        section = trim(trimmed.substr(1, trimmed.size() - 2));
        continue;
      }
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error(name + ":" + std::to_string(lineno) +
                                 ": expected key = value");
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty())
        throw std::runtime_error(name + ":" + std::to_string(lineno) +
                                 ": empty key");
      cfg.values_[section + "." + key] = value;
    }
    return cfg;
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    return parse(in, path);
  }

  bool has(const std::string& section, const std::string& key) const {
    return values_.count(section + "." + key) > 0;
  }

  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const {
    const auto it = values_.find(section + "." + key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_double(const std::string& section, const std::string& key,
                    double fallback) const {
    const auto it = values_.find(section + "." + key);
    return it == values_.end() ? fallback : std::stod(it->second);
  }

  long long get_int(const std::string& section, const std::string& key,
                    long long fallback) const {
    const auto it = values_.find(section + "." + key);
    return it == values_.end() ? fallback : std::stoll(it->second);
  }

  std::vector<double> get_list(const std::string& section,
                               const std::string& key,
                               std::vector<double> fallback) const {
    const auto it = values_.find(section + "." + key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    std::istringstream ss(it->second);
    double v;
    while (ss >> v) out.push_back(v);
    if (out.empty())
      throw std::runtime_error("empty list for " + section + "." + key);
    return out;
  }

  std::vector<std::string> get_words(const std::string& section,
                                     const std::string& key,
                                     std::vector<std::string> fallback) const {
    const auto it = values_.find(section + "." + key);
    if (it == values_.end()) return fallback;
    std::vector<std::string> out;
    std::istringstream ss(it->second);
    std::string w;
    while (ss >> w) out.push_back(w);
    return out;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  std::map<std::string, std::string> values_;
};

}  // namespace nrj
