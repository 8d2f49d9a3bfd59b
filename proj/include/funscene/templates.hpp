#pragma once

#include <map>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "funscene/error.hpp"
#include "funscene/templates_text.hpp"

namespace funscene {

using Bindings = std::map<std::string, std::string>;

struct PromptTemplate {
  std::string template_id;
  std::string body;  // placeholders written {{name}}

  // Placeholder names in order of first appearance.
  std::vector<std::string> placeholders() const {
    static const std::regex re(R"(\{\{([a-z_]+)\}\})");
    std::vector<std::string> names;
    std::set<std::string> seen;
    for (auto it = std::sregex_iterator(body.begin(), body.end(), re); it != std::sregex_iterator(); ++it) {
      const std::string name = (*it)[1];
      if (seen.insert(name).second) names.push_back(name);
    }
    return names;
  }

  std::string render(const Bindings& bindings) const {
    for (const auto& name : placeholders())
      if (!bindings.contains(name))
        throw InvalidArgument("template " + template_id + ": placeholder '" + name + "' is not bound");
    std::string out;
    out.reserve(body.size());
    std::size_t i = 0;
    while (i < body.size()) {
      const auto open = body.find("{{", i);
      if (open == std::string::npos) {
        out.append(body, i);
        break;
      }
      const auto close = body.find("}}", open);
      out.append(body, i, open - i);
      const std::string name = body.substr(open + 2, close - open - 2);
      const auto hit = bindings.find(name);
      if (hit == bindings.end() || close == std::string::npos) {
        out.append(body, open, 2);
        i = open + 2;
        continue;
      }
      out += hit->second;
      i = close + 2;
    }
    return out;
  }

  // Body with placeholders shown as <name>, the notation of the printed figures.
  std::string display() const {
    static const std::regex re(R"(\{\{([a-z_]+)\}\})");
    return std::regex_replace(body, re, "<$1>");
  }
};

namespace templates {

inline const std::string kObjectListBody = R"TPL(You are an interior designer. You are given the description of a room layout and must list the objects that appear in it. For each object, provide a short description of its appearance and size, say whether the layout description explicitly mentions it, and say whether it stands on the floor, hangs on a wall, or rests on top of another object. The object "{{object}}" must always be listed, with the name "{{object}}". Format the output in the following YAML format:

```yaml
objects:
  - name: the object name
    description: a short description of its appearance and size
    mentioned: true/false
    mount: floor/wall/top
```

Here is the layout description: {{layout}})TPL";

inline const std::string kLayoutClausesBody = R"TPL(You are an interior designer placing objects in a room. Translate the layout description into placement clauses. The available constraints are: central, corner, against-wall, left-of, right-of, in-front-of, behind, near, on-top-of. Absolute constraints are written "object | constraint", relative constraints are written "object, reference | constraint". Closely follow the arrangement stated in the layout description and mark those clauses as hard. For every other object, choose clauses by common sense and mark them as soft, followed by a positive weight. Left and right are judged by a person standing in front of the reference object and facing it. Only use these object names: {{objects}}. Format the output in the following YAML format:

```yaml
clauses:
  - nightstand, bed | left-of | hard
  - table | central | soft 1.0
```

Here is the layout description: {{layout}})TPL";

}  // namespace templates

inline const PromptTemplate& task_parse_template() {
  static const PromptTemplate t{"task_parse", templates::kTaskParseBody};
  return t;
}
inline const PromptTemplate& requirement_template() {
  static const PromptTemplate t{"requirement", templates::kRequirementBody};
  return t;
}
// The printed figure leaves the candidate listing implicit; it is appended
// after the figure text.
inline const PromptTemplate& arrangement_template() {
  static const PromptTemplate t{"arrangement", templates::kArrangementBody +
                                                   "\n\nHere is the list of objects:\n```yaml\n{{objects}}\n```"};
  return t;
}
inline const PromptTemplate& object_list_template() {
  static const PromptTemplate t{"object_list", templates::kObjectListBody};
  return t;
}
inline const PromptTemplate& layout_clauses_template() {
  static const PromptTemplate t{"layout_clauses", templates::kLayoutClausesBody};
  return t;
}

}  // namespace funscene
