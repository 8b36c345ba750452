#pragma once

// Minimal TOML-subset parser covering what study configs need: tables,
// arrays of tables, dotted/bare/quoted keys, strings, integers, floats,
// booleans, homogeneous arrays (multi-line allowed) and inline tables.
// Errors carry line and column.

#include <cctype>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace qrb {

struct ConfigValue;
using ConfigArray = std::vector<ConfigValue>;
using ConfigTable = std::map<std::string, ConfigValue>;

struct ConfigValue {
  std::variant<bool, long long, double, std::string, ConfigArray, ConfigTable> v;

  bool is_table() const { return std::holds_alternative<ConfigTable>(v); }
  bool is_array() const { return std::holds_alternative<ConfigArray>(v); }
};

struct ConfigParseError : std::runtime_error {
  int line;
  int column;
  ConfigParseError(int l, int c, const std::string& message)
      : std::runtime_error("line " + std::to_string(l) + ", column " + std::to_string(c) + ": " + message),
        line(l),
        column(c) {}
};

namespace toml_detail {

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1;
  int col = 1;

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  char advance() {
    const char c = text[pos++];
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return c;
  }

  [[noreturn]] void fail(const std::string& message) const { throw ConfigParseError(line, col, message); }

  void skip_ws_inline() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) advance();
  }

  /// Whitespace, newlines and comments.
  void skip_ws_and_comments() {
    while (!eof()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        advance();
      } else if (c == '#') {
        while (!eof() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }
};

inline bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

inline std::string parse_basic_string(Cursor& cur) {
  // Opening quote already consumed by the caller.
  std::string out;
  while (true) {
    if (cur.eof()) cur.fail("unterminated string");
    const char c = cur.advance();
    if (c == '"') break;
    if (c == '\n') cur.fail("newline in string");
    if (c == '\\') {
      if (cur.eof()) cur.fail("unterminated escape");
      const char e = cur.advance();
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        default: cur.fail(std::string("unsupported escape '\\") + e + "'");
      }
    } else {
      out += c;
    }
  }
  return out;
}

inline std::string parse_key_part(Cursor& cur) {
  cur.skip_ws_inline();
  if (cur.eof()) cur.fail("expected key");
  if (cur.peek() == '"') {
    cur.advance();
    return parse_basic_string(cur);
  }
  std::string key;
  while (!cur.eof() && is_bare_key_char(cur.peek())) key += cur.advance();
  if (key.empty()) cur.fail("expected key");
  return key;
}

inline std::vector<std::string> parse_dotted_key(Cursor& cur) {
  std::vector<std::string> parts = {parse_key_part(cur)};
  cur.skip_ws_inline();
  while (!cur.eof() && cur.peek() == '.') {
    cur.advance();
    parts.push_back(parse_key_part(cur));
    cur.skip_ws_inline();
  }
  return parts;
}

ConfigValue parse_value(Cursor& cur);

inline ConfigValue parse_number_or_literal(Cursor& cur) {
  const int line = cur.line, col = cur.col;
  std::string token;
  while (!cur.eof()) {
    const char c = cur.peek();
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.' || c == '_') {
      token += cur.advance();
    } else {
      break;
    }
  }
  if (token.empty()) throw ConfigParseError(line, col, "expected a value");
  if (token == "true") return ConfigValue{true};
  if (token == "false") return ConfigValue{false};

  std::string digits;
  for (char c : token)
    if (c != '_') digits += c;
  const bool looks_float = digits.find('.') != std::string::npos || digits.find('e') != std::string::npos ||
                           digits.find('E') != std::string::npos;
  try {
    std::size_t used = 0;
    if (looks_float) {
      const double d = std::stod(digits, &used);
      if (used != digits.size()) throw std::invalid_argument("trailing");
      return ConfigValue{d};
    }
    const long long i = std::stoll(digits, &used);
    if (used != digits.size()) throw std::invalid_argument("trailing");
    return ConfigValue{i};
  } catch (const std::exception&) {
    throw ConfigParseError(line, col, "malformed value '" + token + "'");
  }
}

inline ConfigValue parse_array(Cursor& cur) {
  // '[' already consumed.
  ConfigArray arr;
  while (true) {
    cur.skip_ws_and_comments();
    if (cur.eof()) cur.fail("unterminated array");
    if (cur.peek() == ']') {
      cur.advance();
      break;
    }
    arr.push_back(parse_value(cur));
    cur.skip_ws_and_comments();
    if (cur.eof()) cur.fail("unterminated array");
    if (cur.peek() == ',') {
      cur.advance();
    } else if (cur.peek() != ']') {
      cur.fail("expected ',' or ']' in array");
    }
  }
  return ConfigValue{std::move(arr)};
}

inline ConfigValue parse_inline_table(Cursor& cur) {
  // '{' already consumed.
  ConfigTable table;
  cur.skip_ws_inline();
  if (!cur.eof() && cur.peek() == '}') {
    cur.advance();
    return ConfigValue{std::move(table)};
  }
  while (true) {
    const std::string key = parse_key_part(cur);
    cur.skip_ws_inline();
    if (cur.eof() || cur.peek() != '=') cur.fail("expected '=' in inline table");
    cur.advance();
    cur.skip_ws_inline();
    if (table.count(key)) cur.fail("duplicate key '" + key + "'");
    table.emplace(key, parse_value(cur));
    cur.skip_ws_inline();
    if (cur.eof()) cur.fail("unterminated inline table");
    if (cur.peek() == ',') {
      cur.advance();
      cur.skip_ws_inline();
    } else if (cur.peek() == '}') {
      cur.advance();
      break;
    } else {
      cur.fail("expected ',' or '}' in inline table");
    }
  }
  return ConfigValue{std::move(table)};
}

inline ConfigValue parse_value(Cursor& cur) {
  cur.skip_ws_inline();
  if (cur.eof()) cur.fail("expected a value");
  const char c = cur.peek();
  if (c == '"') {
    cur.advance();
    return ConfigValue{parse_basic_string(cur)};
  }
  if (c == '[') {
    cur.advance();
    return parse_array(cur);
  }
  if (c == '{') {
    cur.advance();
    return parse_inline_table(cur);
  }
  return parse_number_or_literal(cur);
}

inline ConfigTable* descend(ConfigTable& root, const std::vector<std::string>& path, Cursor& cur) {
  ConfigTable* t = &root;
  for (const auto& part : path) {
    auto it = t->find(part);
    if (it == t->end()) it = t->emplace(part, ConfigValue{ConfigTable{}}).first;
    if (it->second.is_array()) {
      // [table.path] after [[table.path]] targets the latest element.
      auto& arr = std::get<ConfigArray>(it->second.v);
      if (arr.empty() || !arr.back().is_table()) cur.fail("'" + part + "' is not a table");
      t = &std::get<ConfigTable>(arr.back().v);
    } else if (it->second.is_table()) {
      t = &std::get<ConfigTable>(it->second.v);
    } else {
      cur.fail("'" + part + "' is not a table");
    }
  }
  return t;
}

}  // namespace toml_detail

inline ConfigTable parse_toml(const std::string& text) {
  using namespace toml_detail;
  ConfigTable root;
  Cursor cur{text};
  ConfigTable* current = &root;

  while (true) {
    cur.skip_ws_and_comments();
    if (cur.eof()) break;
    const char c = cur.peek();
    if (c == '[') {
      cur.advance();
      const bool array_of_tables = !cur.eof() && cur.peek() == '[';
      if (array_of_tables) cur.advance();
      const auto path = parse_dotted_key(cur);
      cur.skip_ws_inline();
      if (cur.eof() || cur.peek() != ']') cur.fail("expected ']'");
      cur.advance();
      if (array_of_tables) {
        if (cur.eof() || cur.peek() != ']') cur.fail("expected ']]'");
        cur.advance();
        ConfigTable* parent = descend(root, {path.begin(), path.end() - 1}, cur);
        auto it = parent->find(path.back());
        if (it == parent->end()) it = parent->emplace(path.back(), ConfigValue{ConfigArray{}}).first;
        if (!it->second.is_array()) cur.fail("'" + path.back() + "' is not an array of tables");
        auto& arr = std::get<ConfigArray>(it->second.v);
        arr.push_back(ConfigValue{ConfigTable{}});
        current = &std::get<ConfigTable>(arr.back().v);
      } else {
        current = descend(root, path, cur);
      }
    } else {
      const auto path = parse_dotted_key(cur);
      cur.skip_ws_inline();
      if (cur.eof() || cur.peek() != '=') cur.fail("expected '=' after key");
      cur.advance();
      ConfigValue value = parse_value(cur);
      cur.skip_ws_inline();
      if (!cur.eof() && cur.peek() != '\n' && cur.peek() != '\r' && cur.peek() != '#')
        cur.fail("unexpected trailing content after value");
      ConfigTable* target = current;
      if (path.size() > 1) target = descend(*target, {path.begin(), path.end() - 1}, cur);
      if (target->count(path.back())) cur.fail("duplicate key '" + path.back() + "'");
      target->emplace(path.back(), std::move(value));
    }
  }
  return root;
}

}  // namespace qrb
