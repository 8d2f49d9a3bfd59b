#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "funscene/layout.hpp"
#include "funscene/llm_client.hpp"
#include "funscene/requirement.hpp"

namespace funscene {

// One object the layout description calls for.
struct ObjectSpec {
  std::string name;
  std::string description;
  bool required = false;  // named by the layout description, or the target itself
  Mount mount = Mount::floor;

  bool operator==(const ObjectSpec&) const = default;
};

struct ObjectListResult {
  std::vector<ObjectSpec> objects;
  std::vector<std::string> warnings;
};

// Parses the object-list reply. The target is always present and required;
// repeated names get "#2", "#3" suffixes.
inline ObjectListResult object_list_from_node(const StructNode& doc, const std::string& target) {
  ObjectListResult out;
  const StructNode& list = doc.at("objects");
  if (!list.is_list()) throw ParseError("'objects' must be a list");
  std::map<std::string, int> seen;
  for (const auto& item : list.items()) {
    if (!item.is_map()) throw ParseError("object entries must be maps");
    const auto name = item.at("name").text();
    if (!name || name->empty()) throw ParseError("object without a name");
    ObjectSpec spec;
    spec.name = *name;
    if (const auto* d = item.find("description"); d && d->text()) spec.description = *d->text();
    if (const auto* m = item.find("mentioned")) spec.required = m->boolean();
    if (const auto* m = item.find("mount"); m && m->text()) {
      const auto mount = mount_from_string(*m->text());
      if (!mount) throw ParseError("unknown mount '" + *m->text() + "' for " + spec.name);
      spec.mount = *mount;
    }
    if (const int n = ++seen[to_lower_copy(spec.name)]; n > 1) {
      out.warnings.push_back("repeated object '" + spec.name + "' renamed");
      spec.name += "#" + std::to_string(n);
    }
    out.objects.push_back(std::move(spec));
  }
  auto is_target = [&](const ObjectSpec& s) { return to_lower_copy(s.name) == to_lower_copy(target); };
  auto hit = std::find_if(out.objects.begin(), out.objects.end(), is_target);
  if (hit == out.objects.end()) {
    out.warnings.push_back("object list omits the target '" + target + "'; added");
    out.objects.insert(out.objects.begin(), ObjectSpec{target, "", true, Mount::floor});
  } else {
    hit->name = target;
    hit->required = true;
  }
  return out;
}

inline ObjectListResult object_list_llm(const LlmClient& client, const std::string& layout_prompt, const std::string& target) {
  const auto response = client.complete(object_list_template(), {{"layout", layout_prompt}, {"object", target}});
  return object_list_from_node(*response.parsed, target);
}

struct ClauseSet {
  std::vector<Clause> hard;
  std::vector<Clause> soft;
  std::vector<std::string> warnings;

  std::vector<Clause> all() const {
    std::vector<Clause> out = hard;
    out.insert(out.end(), soft.begin(), soft.end());
    return out;
  }
};

// Validates names and sorts clauses into hard and soft. A hard clause is kept
// hard only when every object it names is required.
inline ClauseSet classify_clauses(const std::vector<Clause>& clauses, const std::vector<ObjectSpec>& objects) {
  std::map<std::string, const ObjectSpec*> by_lower;
  for (const auto& o : objects) by_lower[to_lower_copy(o.name)] = &o;
  auto resolve = [&](const std::string& name, const Clause& c) -> const ObjectSpec& {
    const auto it = by_lower.find(to_lower_copy(name));
    if (it == by_lower.end()) throw ClauseError("clause '" + to_string(c) + "' names unknown object '" + name + "'");
    return *it->second;
  };
  ClauseSet out;
  std::set<std::string> emitted;
  for (Clause c : clauses) {
    const ObjectSpec& subject = resolve(c.subject, c);
    c.subject = subject.name;
    bool all_required = subject.required;
    if (c.reference) {
      const ObjectSpec& ref = resolve(*c.reference, c);
      c.reference = ref.name;
      all_required = all_required && ref.required;
      if (ref.name == subject.name) throw ClauseError("clause '" + to_string(c) + "' relates an object to itself");
    }
    if (c.hardness == Hardness::hard && !all_required) {
      out.warnings.push_back("clause '" + to_string(c) + "' involves an unmentioned object; kept as soft");
      c.hardness = Hardness::soft;
      c.weight = 1.0;
    }
    if (!emitted.insert(to_string(c)).second) continue;
    (c.hardness == Hardness::hard ? out.hard : out.soft).push_back(c);
  }
  return out;
}

// Offline path: the clause text form, one clause per line.
inline ClauseSet clauses_from_text(const std::string& text, const std::vector<ObjectSpec>& objects) {
  return classify_clauses(parse_clause_text(text), objects);
}

inline ClauseSet clauses_from_layout(const LlmClient& client, const std::string& layout_prompt,
                                     const std::vector<ObjectSpec>& objects) {
  std::vector<std::string> names;
  for (const auto& o : objects) names.push_back(o.name);
  const auto response = client.complete(layout_clauses_template(), {{"layout", layout_prompt}, {"objects", join(names, ", ")}});
  const StructNode& doc = *response.parsed;
  const StructNode& list = doc.at("clauses");
  if (!list.is_list()) throw ParseError("'clauses' must be a list");
  std::vector<Clause> clauses;
  for (const auto& item : list.items()) {
    const auto line = item.text();
    if (!line) throw ParseError("clause entries must be text");
    clauses.push_back(parse_clause(*line));
  }
  return classify_clauses(clauses, objects);
}

}  // namespace funscene
