#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace elvis {

// Flat `key = value` settings. Lines starting with '#' are comments; later
// assignments win.
class KeyValues {
 public:
  static KeyValues parse(const std::string& text);
  static KeyValues load(const std::filesystem::path& file);

  // Overrides every key in `keys` (and every key already present) from
  // environment variables named ELVIS_<KEY>, with the key upper-cased and
  // non-alphanumerics replaced by '_'. e.g. block_size -> ELVIS_BLOCK_SIZE.
  void apply_environment(const std::vector<std::string>& keys);

  // `key=value` assignments, as given on the command line.
  void apply_assignment(const std::string& assignment);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback = "") const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  // Comma-separated list; empty when the key is absent.
  std::vector<std::string> get_list(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

  static std::string env_name(const std::string& key);

 private:
  std::map<std::string, std::string> values_;
};

std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);
double parse_double(const std::string& s, const std::string& what);
int parse_int(const std::string& s, const std::string& what);

}  // namespace elvis
