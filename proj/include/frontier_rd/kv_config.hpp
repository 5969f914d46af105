#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace frontier_rd {

/// Plain-text `key = value` configuration, one entry per line, `#` starts a
/// comment. Used for design/DGP configs and for ingest schema sidecars.
///
/// Reads are tracked so callers can reject keys nobody consumed (typos).
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::istream& in, const std::string& source = "<config>");
  static KeyValueConfig parse_string(std::string_view text, const std::string& source = "<config>");
  static KeyValueConfig load(const std::filesystem::path& path);

  void set(const std::string& key, std::string value);
  bool contains(std::string_view key) const;
  bool empty() const { return entries_.empty(); }

  std::optional<std::string> get(std::string_view key) const;
  std::string get_string(std::string_view key, const std::string& fallback) const;
  double get_double(std::string_view key, double fallback) const;
  long long get_int(std::string_view key, long long fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;

  /// Keys beginning with `prefix`, in sorted order. Does not mark them consumed.
  std::vector<std::string> keys_with_prefix(std::string_view prefix) const;
  std::vector<std::string> unconsumed() const;
  void mark_consumed(std::string_view key) const;

  /// Canonical form: sorted `key = value` lines. Stable across runs.
  std::string serialize() const;
  const std::map<std::string, std::string, std::less<>>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string, std::less<>> entries_;
  mutable std::set<std::string, std::less<>> consumed_;
};

bool parse_bool(std::string_view text, bool& out);

}  // namespace frontier_rd
