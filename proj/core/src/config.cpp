#include "epinet/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace epinet::toml {

namespace {

struct Parser {
  std::string_view text;
  std::size_t pos = 0;
  int line = 1;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("", "line " + std::to_string(line) + ": " + msg);
  }

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  void advance() {
    if (text[pos] == '\n') ++line;
    ++pos;
  }

  void skip_ws_inline() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) advance();
  }

  void skip_comment() {
    if (!eof() && peek() == '#')
      while (!eof() && peek() != '\n') advance();
  }

  // whitespace, comments and newlines
  void skip_blank() {
    while (!eof()) {
      skip_ws_inline();
      skip_comment();
      if (!eof() && peek() == '\n') {
        advance();
        continue;
      }
      if (!eof() && peek() == '\r') {
        advance();
        continue;
      }
      break;
    }
  }

  void expect_line_end() {
    skip_ws_inline();
    skip_comment();
    if (eof()) return;
    if (peek() == '\n' || peek() == '\r') return;
    fail(std::string("unexpected character '") + peek() + "'");
  }

  std::string parse_bare_key() {
    skip_ws_inline();
    std::string key;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) ||
                      peek() == '_' || peek() == '-'))
    {
      key.push_back(peek());
      advance();
    }
    if (key.empty()) fail("expected a key");
    skip_ws_inline();
    return key;
  }

  std::string parse_key() {
    std::string key = parse_bare_key();
    if (!eof() && peek() == '.')
      fail("dotted keys are not supported; use a [section] header");
    return key;
  }

  // Table headers may be dotted paths: [a.b] nests b under a.
  std::vector<std::string> parse_header_path() {
    std::vector<std::string> path;
    path.push_back(parse_bare_key());
    while (!eof() && peek() == '.') {
      advance();
      path.push_back(parse_bare_key());
    }
    return path;
  }

  std::string parse_basic_string() {
    advance();  // opening quote
    std::string out;
    while (!eof() && peek() != '"') {
      if (peek() == '\n') fail("unterminated string");
      if (peek() == '\\') {
        advance();
        if (eof()) fail("unterminated escape");
        switch (peek()) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          default: fail("unsupported escape sequence");
        }
        advance();
        continue;
      }
      out.push_back(peek());
      advance();
    }
    if (eof()) fail("unterminated string");
    advance();  // closing quote
    return out;
  }

  Value parse_number_or_bool() {
    const std::size_t start = pos;
    while (!eof() && peek() != ',' && peek() != ']' && peek() != '\n' &&
           peek() != '\r' && peek() != '#' && peek() != ' ' && peek() != '\t')
      advance();
    std::string tok(text.substr(start, pos - start));
    if (tok == "true") return Value(true);
    if (tok == "false") return Value(false);
    if (tok.empty()) fail("expected a value");

    const bool looks_float = tok.find_first_of(".eE") != std::string::npos ||
                             tok == "inf" || tok == "-inf" || tok == "nan";
    if (!looks_float) {
      std::int64_t iv = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), iv);
      if (ec == std::errc() && p == tok.data() + tok.size()) return Value(iv);
    }
    double dv = 0.0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), dv);
    if (ec == std::errc() && p == tok.data() + tok.size()) return Value(dv);
    fail("cannot parse value '" + tok + "'");
  }

  Value parse_value() {
    skip_ws_inline();
    if (eof()) fail("expected a value");
    if (peek() == '"') return Value(parse_basic_string());
    if (peek() == '{') fail("inline tables are not supported");
    if (peek() == '[') {
      advance();
      Array arr;
      while (true) {
        skip_blank();
        if (eof()) fail("unterminated array");
        if (peek() == ']') {
          advance();
          break;
        }
        arr.push_back(parse_value());
        skip_blank();
        if (!eof() && peek() == ',') {
          advance();
          continue;
        }
        if (!eof() && peek() == ']') {
          advance();
          break;
        }
        fail("expected ',' or ']' in array");
      }
      return Value(std::move(arr));
    }
    return parse_number_or_bool();
  }
};

}  // namespace

Table parse(std::string_view text) {
  Parser p{text};
  Table root;
  Table* current = &root;

  p.skip_blank();
  while (!p.eof()) {
    if (p.peek() == '[') {
      p.advance();
      const bool array_of_tables = !p.eof() && p.peek() == '[';
      if (array_of_tables) p.advance();
      const auto path = p.parse_header_path();
      if (p.eof() || p.peek() != ']') p.fail("expected ']' after table name");
      p.advance();
      if (array_of_tables) {
        if (p.eof() || p.peek() != ']')
          p.fail("expected ']]' after array-of-tables name");
        p.advance();
      }
      p.expect_line_end();

      // walk/create intermediate tables
      Table* parent = &root;
      for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        auto [it, inserted] = parent->emplace(path[i], Value(Table{}));
        if (!it->second.is_table())
          p.fail("'" + path[i] + "' is already a non-table value");
        parent = &it->second.as_table();
      }
      const std::string& name = path.back();
      if (array_of_tables) {
        auto it = parent->find(name);
        if (it == parent->end())
          it = parent->emplace(name, Value(Array{})).first;
        if (!it->second.is_array())
          p.fail("'" + name + "' is already a non-array value");
        Array& arr = it->second.as_array();
        arr.push_back(Value(Table{}));
        current = &arr.back().as_table();
      } else {
        auto [it, inserted] = parent->emplace(name, Value(Table{}));
        if (!it->second.is_table())
          p.fail("'" + name + "' is already a non-table value");
        current = &it->second.as_table();
      }
      p.skip_blank();
      continue;
    }

    const std::string key = p.parse_key();
    p.skip_ws_inline();
    if (p.eof() || p.peek() != '=') p.fail("expected '=' after key");
    p.advance();
    Value v = p.parse_value();
    p.expect_line_end();
    if (!current->emplace(key, std::move(v)).second)
      p.fail("duplicate key '" + key + "'");
    p.skip_blank();
  }
  return root;
}

Table parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return parse(text);
  } catch (const ConfigError& e) {
    throw ConfigError("", path + ": " + e.what());
  }
}

const Value* find(const Table& t, std::string_view key) {
  auto it = t.find(key);
  return it == t.end() ? nullptr : &it->second;
}

double get_number(const Table& t, const std::string& key,
                  const std::string& path) {
  const Value* v = find(t, key);
  if (!v) throw ConfigError(path + "." + key, "missing required field");
  if (!v->is_number())
    throw ConfigError(path + "." + key, "expected a number");
  return v->as_number();
}

std::int64_t get_int(const Table& t, const std::string& key,
                     const std::string& path) {
  const Value* v = find(t, key);
  if (!v) throw ConfigError(path + "." + key, "missing required field");
  if (!v->is_int()) throw ConfigError(path + "." + key, "expected an integer");
  return v->as_int();
}

std::string get_string(const Table& t, const std::string& key,
                       const std::string& path) {
  const Value* v = find(t, key);
  if (!v) throw ConfigError(path + "." + key, "missing required field");
  if (!v->is_string())
    throw ConfigError(path + "." + key, "expected a string");
  return v->as_string();
}

const Table& get_table(const Table& t, const std::string& key,
                       const std::string& path) {
  const Value* v = find(t, key);
  if (!v) throw ConfigError(path.empty() ? key : path + "." + key,
                            "missing required section");
  if (!v->is_table())
    throw ConfigError(path.empty() ? key : path + "." + key,
                      "expected a table");
  return v->as_table();
}

void reject_unknown_keys(const Table& t,
                         const std::vector<std::string>& allowed,
                         const std::string& path) {
  for (const auto& [key, value] : t) {
    bool ok = false;
    for (const auto& a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError(path + "." + key, "unknown field");
  }
}

}  // namespace epinet::toml
