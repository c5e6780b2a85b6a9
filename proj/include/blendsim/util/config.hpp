#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace blendsim::util {

// Flat key-value configuration with dotted keys ("rl.alpha = 0.1").
// '#' starts a comment; blank lines are skipped. Every getter records the
// key it touched so require_all_consumed() can reject unknown keys.
class Config {
 public:
  Config() = default;

  static Config load_file(const std::string& path);
  static Config parse(const std::string& text, const std::string& origin = "<string>");

  // CLI-style override; wins over file values.
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  double get_double(const std::string& key, double def) const;
  int get_int(const std::string& key, int def) const;
  bool get_bool(const std::string& key, bool def) const;
  std::string get_string(const std::string& key, const std::string& def) const;
  std::vector<double> get_list(const std::string& key, const std::vector<double>& def) const;

  // Keys present in the sources but never read by any getter.
  std::vector<std::string> unconsumed() const;
  // Throws std::runtime_error naming every unknown key.
  void require_all_consumed() const;

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> touched_;
};

}  // namespace blendsim::util
