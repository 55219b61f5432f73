#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "epinet/errors.hpp"

namespace epinet::toml {

// Minimal TOML subset used by the config files: bare keys, strings, integers,
// floats, booleans, inline arrays (nestable), [table] and [[array-of-table]]
// headers, and # comments. Dotted keys and inline tables are rejected.

class Value;
using Array = std::vector<Value>;
using Table = std::map<std::string, Value, std::less<>>;

class Value {
 public:
  Value() : v_(false) {}
  explicit Value(bool b) : v_(b) {}
  explicit Value(std::int64_t i) : v_(i) {}
  explicit Value(double d) : v_(d) {}
  explicit Value(std::string s) : v_(std::move(s)) {}
  explicit Value(Array a) : v_(std::move(a)) {}
  explicit Value(Table t) : v_(std::make_shared<Table>(std::move(t))) {}

  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(v_); }
  bool is_float() const { return std::holds_alternative<double>(v_); }
  bool is_number() const { return is_int() || is_float(); }
  bool is_string() const { return std::holds_alternative<std::string>(v_); }
  bool is_array() const { return std::holds_alternative<Array>(v_); }
  bool is_table() const {
    return std::holds_alternative<std::shared_ptr<Table>>(v_);
  }

  bool as_bool() const { return std::get<bool>(v_); }
  std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
  double as_number() const {
    return is_int() ? static_cast<double>(as_int()) : std::get<double>(v_);
  }
  const std::string& as_string() const { return std::get<std::string>(v_); }
  const Array& as_array() const { return std::get<Array>(v_); }
  Array& as_array() { return std::get<Array>(v_); }
  const Table& as_table() const {
    return *std::get<std::shared_ptr<Table>>(v_);
  }
  Table& as_table() { return *std::get<std::shared_ptr<Table>>(v_); }

 private:
  std::variant<bool, std::int64_t, double, std::string, Array,
               std::shared_ptr<Table>>
      v_;
};

/// Parses a document. Throws ConfigError with a line-numbered message.
Table parse(std::string_view text);
Table parse_file(const std::string& path);

// Typed lookups; `path` is the dotted location used in error messages.
const Value* find(const Table& t, std::string_view key);
double get_number(const Table& t, const std::string& key,
                  const std::string& path);
std::int64_t get_int(const Table& t, const std::string& key,
                     const std::string& path);
std::string get_string(const Table& t, const std::string& key,
                       const std::string& path);
const Table& get_table(const Table& t, const std::string& key,
                       const std::string& path);

/// Rejects keys outside `allowed`, reporting the full field path.
void reject_unknown_keys(const Table& t,
                         const std::vector<std::string>& allowed,
                         const std::string& path);

}  // namespace epinet::toml
