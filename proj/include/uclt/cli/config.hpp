#pragma once

// Schema-checked access to a JSON run configuration with line numbers for every key.

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uclt/serialization.hpp"

namespace uclt::cli {

/// A parsed config document plus the source line of every object key, by JSON pointer.
class ConfigDocument {
 public:
  /// Throws ConfigError with the line of a syntax error.
  static ConfigDocument parse(const std::string& text);
  static ConfigDocument load(const std::filesystem::path& path);

  const Json& root() const { return root_; }
  /// Line of the key at `pointer` (e.g. "/model/kind"), else of the nearest enclosing key, else 1.
  int line_of(const std::string& pointer) const;

 private:
  Json root_;
  std::map<std::string, int> lines_;
};

/// Typed view of one JSON object within a document. Every accessor validates type and range and
/// throws ConfigError naming the key and its line.
class Section {
 public:
  Section(const ConfigDocument& doc, std::string pointer);

  const std::string& pointer() const { return pointer_; }
  bool has(const std::string& key) const;
  /// Rejects keys outside `allowed`.
  void allow_only(std::initializer_list<const char*> allowed) const;
  Section child(const std::string& key) const;

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) const;
  /// Strictly positive finite number.
  double positive(const std::string& key, std::optional<double> fallback = std::nullopt) const;
  /// Finite number or null (read as +inf).
  double number_or_inf(const std::string& key, double fallback) const;
  std::int64_t integer(const std::string& key, std::optional<std::int64_t> fallback = std::nullopt,
                       std::int64_t min = 0) const;
  std::uint64_t unsigned_integer(const std::string& key,
                                 std::optional<std::uint64_t> fallback = std::nullopt) const;
  bool boolean(const std::string& key, std::optional<bool> fallback = std::nullopt) const;
  std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) const;
  std::string choice(const std::string& key, std::initializer_list<const char*> options,
                     std::optional<std::string> fallback = std::nullopt) const;
  std::vector<double> numbers(const std::string& key,
                              std::optional<std::vector<double>> fallback = std::nullopt) const;
  std::vector<std::size_t> counts(const std::string& key,
                                  std::optional<std::vector<std::size_t>> fallback = std::nullopt) const;
  /// Array of objects, one Section each.
  std::vector<Section> objects(const std::string& key) const;
  const Json& raw(const std::string& key) const;

  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

 private:
  const Json& value(const std::string& key) const;

  const ConfigDocument* doc_;
  std::string pointer_;
  const Json* node_;
};

/// FNV-1a 64 of the canonical (key-sorted, compact) serialization, as 16 hex digits.
std::string config_hash(const Json& effective_config);

}  // namespace uclt::cli
