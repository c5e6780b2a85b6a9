#include "blendsim/util/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace blendsim::util {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": expected 'key = value', got '" + line + "'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": empty key");
    }
    cfg.values_[key] = value;  // later entries win
  }
  return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

double Config::get_double(const std::string& key, double def) const {
  touched_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  size_t pos = 0;
  double v = std::stod(it->second, &pos);
  if (pos != it->second.size()) {
    throw std::runtime_error("config key '" + key + "': not a number: " + it->second);
  }
  return v;
}

int Config::get_int(const std::string& key, int def) const {
  touched_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  size_t pos = 0;
  int v = std::stoi(it->second, &pos);
  if (pos != it->second.size()) {
    throw std::runtime_error("config key '" + key + "': not an integer: " + it->second);
  }
  return v;
}

bool Config::get_bool(const std::string& key, bool def) const {
  touched_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  const std::string& v = it->second;
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw std::runtime_error("config key '" + key + "': not a boolean: " + v);
}

std::string Config::get_string(const std::string& key, const std::string& def) const {
  touched_.insert(key);
  auto it = values_.find(key);
  return it == values_.end() ? def : it->second;
}

std::vector<double> Config::get_list(const std::string& key,
                                     const std::vector<double>& def) const {
  touched_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  std::vector<double> out;
  std::istringstream in(it->second);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    size_t pos = 0;
    std::string t = cell;
    // reuse trim logic locally
    size_t a = t.find_first_not_of(" \t");
    size_t b = t.find_last_not_of(" \t");
    if (a == std::string::npos) {
      throw std::runtime_error("config key '" + key + "': empty list element");
    }
    t = t.substr(a, b - a + 1);
    double v = std::stod(t, &pos);
    if (pos != t.size()) {
      throw std::runtime_error("config key '" + key + "': not a number: " + t);
    }
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> Config::unconsumed() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) {
    if (!touched_.count(k)) out.push_back(k);
  }
  return out;
}

void Config::require_all_consumed() const {
  auto unknown = unconsumed();
  if (unknown.empty()) return;
  std::string msg = "unknown config keys:";
  for (const auto& k : unknown) msg += " '" + k + "'";
  throw std::runtime_error(msg);
}

}  // namespace blendsim::util
