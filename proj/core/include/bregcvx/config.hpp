#pragma once

#include <map>
#include <string>
#include <vector>

namespace bregcvx {

/// Line-oriented key=value settings. '#' starts a comment; repeated keys accumulate.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  /// Last value for key, or `fallback`.
  std::string get(const std::string& key, const std::string& fallback = {}) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  /// Every value for key, split on commas.
  std::vector<std::string> get_list(const std::string& key) const;
  /// Keys beginning with `prefix`, in sorted order.
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;
  void set(const std::string& key, const std::string& value) { values_[key] = {value}; }

 private:
  std::map<std::string, std::vector<std::string>> values_;
};

}  // namespace bregcvx
