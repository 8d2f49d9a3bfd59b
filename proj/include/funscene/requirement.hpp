#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "funscene/asset_index.hpp"
#include "funscene/core_types.hpp"
#include "funscene/llm_client.hpp"
#include "funscene/part_meta.hpp"

namespace funscene {

struct RequirementError : Error {
  explicit RequirementError(const std::string& what) : Error("requirement", what) {}
};

enum class Cmp { lt, le, eq, ge, gt };

inline std::string symbol(Cmp c) {
  switch (c) {
    case Cmp::lt: return "<";
    case Cmp::le: return "<=";
    case Cmp::eq: return "=";
    case Cmp::ge: return ">=";
    default: return ">";
  }
}

inline bool compare(std::size_t count, Cmp c, int n) {
  const auto k = static_cast<long long>(count);
  switch (c) {
    case Cmp::lt: return k < n;
    case Cmp::le: return k <= n;
    case Cmp::eq: return k == n;
    case Cmp::ge: return k >= n;
    default: return k > n;
  }
}

// Count predicate over one functional label, e.g. "handle >= 3".
struct Requirement {
  std::string object_name;
  std::string functional_label;
  Cmp cmp = Cmp::eq;
  int n = 1;

  std::string text() const { return functional_label + " " + symbol(cmp) + " " + std::to_string(n); }
  bool operator==(const Requirement&) const = default;
};

// Parses "label <symbol> N"; the label may contain spaces.
inline Requirement parse_requirement_text(const std::string& text) {
  static const std::regex re(R"(^\s*(.+?)\s*(<=|>=|==|=|<|>|\xE2\x89\xA4|\xE2\x89\xA5)\s*(\d+)\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw RequirementError("unparseable requirement '" + text + "'");
  Requirement r;
  r.functional_label = to_lower_copy(m[1].str());
  const std::string sym = m[2].str();
  if (sym == "<") r.cmp = Cmp::lt;
  else if (sym == "<=" || sym == "\xE2\x89\xA4") r.cmp = Cmp::le;
  else if (sym == "=" || sym == "==") r.cmp = Cmp::eq;
  else if (sym == ">=" || sym == "\xE2\x89\xA5") r.cmp = Cmp::ge;
  else r.cmp = Cmp::gt;
  try {
    r.n = std::stoi(m[3].str());
  } catch (const std::out_of_range&) {
    throw RequirementError("requirement count out of range in '" + text + "'");
  }
  return r;
}

inline std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

inline Requirement infer_requirement_llm(const LlmClient& client, const std::string& context_free_prompt,
                                         const std::vector<std::string>& candidate_labels) {
  if (candidate_labels.empty()) throw InvalidArgument("no candidate functional labels");
  const auto response =
      client.complete(requirement_template(), {{"funclist", join(candidate_labels, ", ")}, {"prompt", context_free_prompt}});
  const StructNode& doc = *response.parsed;
  const auto req_text = doc.at("object_requirement").text();
  if (!req_text) throw RequirementError("empty object_requirement");
  Requirement r = parse_requirement_text(*req_text);
  if (const auto* obj = doc.find("object"); obj && obj->is_scalar()) r.object_name = obj->str();
  const std::set<std::string> allowed = [&] {
    std::set<std::string> s;
    for (const auto& l : candidate_labels) s.insert(to_lower_copy(l));
    return s;
  }();
  if (!allowed.contains(r.functional_label))
    throw RequirementError("label '" + r.functional_label + "' is not among the candidate labels");
  if (const auto* part = doc.find("object_part"); part && part->is_scalar() &&
                                                  to_lower_copy(part->str()) != r.functional_label)
    throw RequirementError("object_part '" + part->str() + "' disagrees with the requirement label");
  return r;
}

namespace detail {

inline const std::map<std::string, int>& ordinal_words() {
  static const std::map<std::string, int> words{
      {"first", 1},       {"second", 2},      {"third", 3},       {"fourth", 4},       {"fifth", 5},
      {"sixth", 6},       {"seventh", 7},     {"eighth", 8},      {"ninth", 9},        {"tenth", 10},
      {"eleventh", 11},   {"twelfth", 12},    {"thirteenth", 13}, {"fourteenth", 14},  {"fifteenth", 15},
      {"sixteenth", 16},  {"seventeenth", 17}, {"eighteenth", 18}, {"nineteenth", 19}, {"twentieth", 20}};
  return words;
}

// Ordinal value named in the prompt (word or numeral), nullopt if none.
// Ordinal words beyond "twentieth" are rejected rather than guessed.
inline std::optional<int> find_ordinal(const std::string& lower) {
  static const std::regex beyond(
      R"(\b(?:(?:twenty|thirty|forty|fifty|sixty|seventy|eighty|ninety)[\s-]+(?:first|second|third|fourth|fifth|sixth|seventh|eighth|ninth)|thirtieth|fortieth|fiftieth|sixtieth|seventieth|eightieth|ninetieth|hundredth|thousandth)\b)");
  if (std::regex_search(lower, beyond)) throw RequirementError("unsupported ordinal in '" + lower + "'");
  static const std::regex numeral(R"(\b(\d+)(?:st|nd|rd|th)\b)");
  static const std::regex word(R"([a-z]+)");
  std::optional<std::pair<std::size_t, int>> best;
  std::smatch m;
  if (std::regex_search(lower, m, numeral)) best = {static_cast<std::size_t>(m.position(0)), std::stoi(m[1].str())};
  for (auto it = std::sregex_iterator(lower.begin(), lower.end(), word); it != std::sregex_iterator(); ++it) {
    const auto hit = ordinal_words().find(it->str());
    if (hit == ordinal_words().end()) continue;
    if (!best || static_cast<std::size_t>(it->position()) < best->first) best = {static_cast<std::size_t>(it->position()), hit->second};
    break;
  }
  if (!best) return std::nullopt;
  if (best->second < 1) throw RequirementError("ordinal must be positive in '" + lower + "'");
  return best->second;
}

inline bool has_compound_position(const std::string& lower) {
  static const std::regex re(R"(\b(?:top|upper|bottom|lower)[\s-]+(?:left|right)\b|\b(?:left|right)[\s-]+(?:top|upper|bottom|lower)\b)");
  return std::regex_search(lower, re);
}

inline bool has_positional_adjective(const std::string& lower) {
  static const std::regex re(
      R"(\b(?:left|right|leftmost|rightmost|top|bottom|upper|lower|topmost|bottommost|uppermost|lowermost)\b)");
  return std::regex_search(lower, re);
}

inline bool has_word(const std::string& lower, const std::string& w) {
  const std::regex re("\\b" + w + "s?\\b");
  return std::regex_search(lower, re);
}

// Action/object cues mapped to a functional label, most specific first.
inline const std::vector<std::pair<std::string, std::vector<std::string>>>& label_cues() {
  static const std::vector<std::pair<std::string, std::vector<std::string>>> cues{
      {"knob", {"temperature", "heat", "burner", "dial", "regulate", "volume", "gas", "stove"}},
      {"switch", {"light", "lamp", "lights"}},
      {"faucet", {"water", "faucet", "tap", "sink"}},
      {"lever", {"flush", "lever"}},
      {"button", {"press", "button", "power", "start"}},
      {"handle",
       {"drawer", "door", "cabinet", "fridge", "refrigerator", "wardrobe", "closet", "cupboard", "lid", "dishwasher",
        "open", "close", "pull"}},
  };
  return cues;
}

inline std::string object_after_of(const std::string& prompt) {
  const std::string lower = to_lower_copy(prompt);
  std::size_t at = std::string::npos;
  std::size_t skip = 0;
  for (const std::string marker : {" of the ", " on the ", " of a ", " on a "}) {
    const auto p = lower.rfind(marker);
    if (p != std::string::npos && (at == std::string::npos || p > at)) {
      at = p;
      skip = marker.size();
    }
  }
  if (at == std::string::npos) return {};
  std::string tail = prompt.substr(at + skip);
  const auto from = to_lower_copy(tail).find(" from the ");
  if (from != std::string::npos) tail = tail.substr(0, from);
  while (!tail.empty() && (tail.back() == '.' || tail.back() == ' ')) tail.pop_back();
  return tail;
}

}  // namespace detail

// Deterministic grammar: ordinal k => >= k; top-left style compound => >= 4;
// single positional adjective => >= 2; no positional cue => = 1.
inline Requirement infer_requirement_fallback(const std::string& context_free_prompt,
                                              const std::vector<std::string>& candidate_labels) {
  if (candidate_labels.empty()) throw InvalidArgument("no candidate functional labels");
  const std::string lower = to_lower_copy(context_free_prompt);
  std::vector<std::string> labels;
  for (const auto& l : candidate_labels) labels.push_back(to_lower_copy(l));

  Requirement r;
  r.object_name = detail::object_after_of(context_free_prompt);

  // A label written out in the prompt wins; longer labels first ("door handle" over "handle").
  std::vector<std::string> by_length = labels;
  std::stable_sort(by_length.begin(), by_length.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
  for (const auto& l : by_length) {
    if (detail::has_word(lower, l)) {
      r.functional_label = l;
      break;
    }
  }
  if (r.functional_label.empty()) {
    for (const auto& [label, words] : detail::label_cues()) {
      if (std::find(labels.begin(), labels.end(), label) == labels.end()) continue;
      if (std::any_of(words.begin(), words.end(), [&](const std::string& w) { return detail::has_word(lower, w); })) {
        r.functional_label = label;
        break;
      }
    }
  }
  if (r.functional_label.empty()) {
    if (labels.size() != 1) throw RequirementError("cannot infer the functional element for '" + context_free_prompt + "'");
    r.functional_label = labels.front();
  }

  const auto ordinal = detail::find_ordinal(lower);
  if (detail::has_compound_position(lower)) {
    r.cmp = Cmp::ge;
    r.n = 4;
  } else if (ordinal) {
    r.cmp = Cmp::ge;
    r.n = *ordinal;
  } else if (detail::has_positional_adjective(lower)) {
    r.cmp = Cmp::ge;
    r.n = 2;
  } else {
    r.cmp = Cmp::eq;
    r.n = 1;
  }
  return r;
}

// Plain label equal to the requirement label, or enriched label containing it.
inline bool label_matches(const FunctionalElement& e, const std::string& wanted) {
  const std::string w = to_lower_copy(wanted);
  return to_lower_copy(e.label) == w || to_lower_copy(e.enriched_label).find(w) != std::string::npos;
}

inline std::vector<FunctionalElement> elements_matching(const std::vector<FunctionalElement>& elements,
                                                        const std::string& wanted) {
  std::vector<FunctionalElement> out;
  std::copy_if(elements.begin(), elements.end(), std::back_inserter(out),
               [&](const FunctionalElement& e) { return label_matches(e, wanted); });
  return out;
}

inline std::size_t count_matching(const AssetRecord& asset, const std::set<std::string>& functional_labels,
                                  const std::string& wanted, const PartMetaOptions& options = {}) {
  if (!asset.root_part) return 0;
  return elements_matching(functional_elements(asset, functional_labels, options), wanted).size();
}

// Keeps candidates whose matching-element count satisfies the predicate; order preserved.
inline std::vector<Candidate> filter_assets(const std::vector<Candidate>& candidates, const AssetCatalog& assets,
                                            const Requirement& req,
                                            const std::set<std::string>& functional_labels = default_functional_labels(),
                                            const PartMetaOptions& options = {}) {
  std::vector<Candidate> kept;
  for (const auto& c : candidates) {
    const auto it = assets.find(c.asset_id);
    if (it == assets.end()) throw InvalidArgument("candidate " + c.asset_id + " is not in the asset catalog");
    if (compare(count_matching(it->second, functional_labels, req.functional_label, options), req.cmp, req.n))
      kept.push_back(c);
  }
  return kept;
}

}  // namespace funscene
