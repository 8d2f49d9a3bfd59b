#pragma once

#include <algorithm>
#include <cctype>
#include <regex>
#include <string>
#include <vector>

#include "funscene/core_types.hpp"
#include "funscene/llm_client.hpp"

namespace funscene {

// Scene-position phrases removed by the offline fallback. "in the" is not
// cut when it names a position on the object itself ("in the middle").
inline const std::vector<std::string>& locative_phrases() {
  static const std::vector<std::string> phrases{
      "next to", "near", "in the", "behind", "beside", "to the left of", "to the right of",
      "on the left of", "on the right of", "in front of"};
  return phrases;
}

inline std::string strip_context_fallback(const TaskDescription& d) {
  static const std::regex re(
      R"(\s+(next to|near|beside|behind|in front of|(?:to|on) the (?:left|right) of|in the(?!\s+(?:middle|center|centre|top|bottom|upper|lower)\b))\b)",
      std::regex::icase | std::regex::ECMAScript);
  std::string text = d.text();
  std::smatch m;
  if (std::regex_search(text, m, re)) text = text.substr(0, static_cast<std::size_t>(m.position(0)));
  while (!text.empty() && (text.back() == '.' || text.back() == ',' || std::isspace(static_cast<unsigned char>(text.back()))))
    text.pop_back();
  return text.empty() ? d.text() : text;
}

struct TaskParseResult {
  TaskParse parse;
  std::vector<std::string> warnings;
};

inline TaskParse task_parse_from_node(const StructNode& doc) {
  auto field = [&](const char* key) {
    const auto value = doc.at(key).text();
    if (!value || value->empty()) throw ParseError(std::string("empty value for '") + key + "'");
    return *value;
  };
  TaskParse parse;
  parse.layout_prompt = field("layout_prompt");
  parse.context_free_prompt = field("context_free_prompt");
  parse.object_name = field("object_name");
  const auto type = object_type_from_string(field("object_type"));
  if (!type) throw ParseError("object_type must be door, window or other, got '" + field("object_type") + "'");
  parse.object_type = *type;
  return parse;
}

inline TaskParseResult parse_task(const LlmClient& client, const TaskDescription& d) {
  const LlmResponse response = client.complete(task_parse_template(), {{"prompt", d.text()}});
  TaskParseResult result{task_parse_from_node(*response.parsed), {}};
  TaskParse& p = result.parse;
  if (to_lower_copy(p.layout_prompt).find(to_lower_copy(p.object_name)) == std::string::npos)
    result.warnings.push_back("layout prompt does not mention '" + p.object_name + "'");
  if (p.context_free_prompt.size() > d.text().size()) {
    result.warnings.push_back("context-free prompt longer than the task description; using the offline fallback");
    p.context_free_prompt = strip_context_fallback(d);
  }
  return result;
}

}  // namespace funscene
