#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "funscene/error.hpp"

namespace funscene {

// Key/value tree parsed from a model's structured answer. Scalars stay as
// text; callers convert with the typed accessors.
class StructNode {
 public:
  using List = std::vector<StructNode>;
  using Map = std::vector<std::pair<std::string, StructNode>>;  // insertion order kept

  StructNode() = default;
  static StructNode scalar(std::string s) { return StructNode(Storage{std::move(s)}); }
  static StructNode list(List items) { return StructNode(Storage{std::move(items)}); }
  static StructNode map(Map entries) { return StructNode(Storage{std::move(entries)}); }

  bool is_null() const { return std::holds_alternative<std::monostate>(v_); }
  bool is_scalar() const { return std::holds_alternative<std::string>(v_); }
  bool is_list() const { return std::holds_alternative<List>(v_); }
  bool is_map() const { return std::holds_alternative<Map>(v_); }

  const std::string& str() const {
    if (!is_scalar()) throw ParseError("expected a scalar value");
    return std::get<std::string>(v_);
  }
  const List& items() const {
    if (!is_list()) throw ParseError("expected a list");
    return std::get<List>(v_);
  }
  const Map& entries() const {
    if (!is_map()) throw ParseError("expected a mapping");
    return std::get<Map>(v_);
  }

  const StructNode* find(std::string_view key) const {
    if (!is_map()) return nullptr;
    for (const auto& [k, v] : std::get<Map>(v_))
      if (k == key) return &v;
    return nullptr;
  }
  const StructNode& at(std::string_view key) const {
    if (const StructNode* n = find(key)) return *n;
    throw ParseError("missing key '" + std::string(key) + "'");
  }

  // Scalar text, or nullopt for null / the literal None / null / ~.
  std::optional<std::string> text() const {
    if (is_null()) return std::nullopt;
    const auto& s = str();
    if (s == "None" || s == "none" || s == "null" || s == "~") return std::nullopt;
    return s;
  }
  bool boolean() const {
    std::string s = str();
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "yes") return true;
    if (s == "false" || s == "no") return false;
    throw ParseError("expected a boolean, got '" + str() + "'");
  }
  double number() const {
    try {
      std::size_t used = 0;
      const double d = std::stod(str(), &used);
      if (used != str().size()) throw ParseError("trailing text in number '" + str() + "'");
      return d;
    } catch (const std::logic_error&) {
      throw ParseError("expected a number, got '" + str() + "'");
    }
  }

  bool operator==(const StructNode&) const = default;

 private:
  using Storage = std::variant<std::monostate, std::string, List, Map>;
  explicit StructNode(Storage v) : v_(std::move(v)) {}
  Storage v_;
};

namespace detail {

struct BlockLine {
  int indent;
  std::string text;
};

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline bool is_dash(const std::string& t) { return t == "-" || t.rfind("- ", 0) == 0; }

// Position of the key separator ("key: value" or trailing "key:"), outside quotes.
inline std::optional<std::size_t> key_colon(const std::string& t) {
  if (t.empty() || t[0] == '"' || t[0] == '\'' || t[0] == '[') return std::nullopt;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] == ':' && (i + 1 == t.size() || t[i + 1] == ' ')) return i == 0 ? std::nullopt : std::optional(i);
    if (t[i] == '"' || t[i] == '\'') return std::nullopt;
  }
  return std::nullopt;
}

inline std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      if (s[i] == '\\' && i + 2 < s.size()) {
        const char n = s[++i];
        out += n == 'n' ? '\n' : n == 't' ? '\t' : n;
      } else {
        out += s[i];
      }
    }
    return out;
  }
  if (s.size() >= 2 && s.front() == '\'' && s.back() == '\'') return s.substr(1, s.size() - 2);
  return s;
}

inline StructNode parse_scalar(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty()) return StructNode{};
  if (s.front() == '[' && s.back() == ']') {
    StructNode::List items;
    const std::string inner = trim(std::string_view(s).substr(1, s.size() - 2));
    if (inner.empty()) return StructNode::list({});
    std::string cur;
    char quote = 0;
    for (char c : inner) {
      if (quote) {
        cur += c;
        if (c == quote) quote = 0;
      } else if (c == '"' || c == '\'') {
        quote = c;
        cur += c;
      } else if (c == ',') {
        items.push_back(StructNode::scalar(unquote(trim(cur))));
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (quote) throw ParseError("unterminated quote in flow list");
    items.push_back(StructNode::scalar(unquote(trim(cur))));
    return StructNode::list(std::move(items));
  }
  if ((s.front() == '"') != (s.size() >= 2 && s.back() == '"'))
    throw ParseError("unbalanced quotes in value: " + s);
  return StructNode::scalar(unquote(s));
}

class BlockParser {
 public:
  explicit BlockParser(std::vector<BlockLine> lines) : lines_(std::move(lines)) {}

  StructNode parse() {
    if (lines_.empty()) throw ParseError("empty structured block");
    StructNode root = block(lines_[0].indent, true);
    if (pos_ != lines_.size()) throw ParseError("unexpected indentation at: " + lines_[pos_].text);
    return root;
  }

 private:
  StructNode block(int indent, bool root) {
    return is_dash(lines_[pos_].text) ? list(indent, root) : map(indent);
  }

  StructNode map(int indent) {
    StructNode::Map entries;
    while (pos_ < lines_.size() && lines_[pos_].indent == indent && !is_dash(lines_[pos_].text)) {
      const std::string text = lines_[pos_].text;
      const auto colon = key_colon(text);
      if (!colon) throw ParseError("expected 'key: value', got: " + text);
      std::string key = unquote(trim(std::string_view(text).substr(0, *colon)));
      std::string value = trim(std::string_view(text).substr(*colon + 1));
      ++pos_;
      if (value.empty()) {
        if (pos_ < lines_.size() &&
            (lines_[pos_].indent > indent || (lines_[pos_].indent == indent && is_dash(lines_[pos_].text)))) {
          entries.emplace_back(std::move(key), block(lines_[pos_].indent, false));
        } else {
          entries.emplace_back(std::move(key), StructNode{});
        }
      } else {
        // Plain scalars may wrap onto deeper-indented lines.
        while (pos_ < lines_.size() && lines_[pos_].indent > indent) value += " " + lines_[pos_++].text;
        entries.emplace_back(std::move(key), parse_scalar(value));
      }
    }
    return StructNode::map(std::move(entries));
  }

  // A root-level list tolerates item keys written at the dash's own column
  // ("- id: a\nreasoning: ..."), the shape models often emit.
  StructNode list(int indent, bool lax) {
    StructNode::List items;
    while (pos_ < lines_.size() && lines_[pos_].indent == indent && is_dash(lines_[pos_].text)) {
      const std::string content = trim(std::string_view(lines_[pos_].text).substr(1));
      if (content.empty()) {
        ++pos_;
        if (pos_ < lines_.size() && lines_[pos_].indent > indent) {
          items.push_back(block(lines_[pos_].indent, false));
        } else {
          items.emplace_back();
        }
        continue;
      }
      if (!key_colon(content)) {
        ++pos_;
        items.push_back(parse_scalar(content));
        continue;
      }
      int item_indent = indent + 2;
      if (pos_ + 1 < lines_.size()) {
        const auto& next = lines_[pos_ + 1];
        if (!is_dash(next.text) && (next.indent > indent || (lax && next.indent == indent)))
          item_indent = next.indent;
      }
      lines_[pos_] = {item_indent, content};
      items.push_back(map(item_indent));
    }
    return StructNode::list(std::move(items));
  }

  std::vector<BlockLine> lines_;
  std::size_t pos_ = 0;
};

inline std::vector<BlockLine> split_block(std::string_view body) {
  std::vector<BlockLine> lines;
  std::istringstream in{std::string(body)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(' ');
    if (first == std::string::npos) continue;
    if (line.find_first_not_of(" \t") == std::string::npos || line[first] == '#') continue;
    lines.push_back({static_cast<int>(first), trim(line)});
  }
  return lines;
}

}  // namespace detail

// Parse a bare block (no fences) into a tree.
inline StructNode parse_block_text(std::string_view body) {
  return detail::BlockParser(detail::split_block(body)).parse();
}

// Extract and parse the first fenced block (```yaml ... ```), tolerating prose
// around it. A reply with no fence is accepted only when the whole reply
// parses as a mapping, which covers templates that ask for bare key/value lines.
inline StructNode parse_structured_block(std::string_view raw) {
  const auto open = raw.find("```");
  if (open != std::string_view::npos) {
    const auto body_start = raw.find('\n', open);
    if (body_start == std::string_view::npos) throw ParseError("malformed block: fence without body");
    const auto close = raw.find("```", body_start);
    if (close == std::string_view::npos) throw ParseError("malformed block: missing closing fence");
    return parse_block_text(raw.substr(body_start + 1, close - body_start - 1));
  }
  const auto lines = detail::split_block(raw);
  if (lines.empty()) throw ParseError("no structured block found");
  try {
    StructNode node = detail::BlockParser(lines).parse();
    if (node.is_map() && !node.entries().empty()) return node;
  } catch (const ParseError&) {
  }
  throw ParseError("no structured block found");
}

}  // namespace funscene
