#pragma once

#include <algorithm>
#include <cstdio>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "funscene/core_types.hpp"
#include "funscene/llm_client.hpp"
#include "funscene/random.hpp"
#include "funscene/requirement.hpp"

namespace funscene {

struct ArrangementError : Error {
  explicit ArrangementError(const std::string& what) : Error("arrangement", what) {}
};

enum class QueryKind {
  leftmost,
  rightmost,
  nth_from_left,
  nth_from_right,
  top,
  bottom,
  nth_vertical,     // n-th counted from the top
  nth_from_bottom,  // n-th counted from the bottom
  grid_cell,
  unique,
};

enum class GridRow { top, bottom };
enum class GridCol { left, right };

struct SpatialQuery {
  QueryKind kind = QueryKind::unique;
  int n = 0;  // set iff kind is one of the nth_* kinds
  GridRow row = GridRow::top;
  GridCol col = GridCol::left;

  bool is_nth() const {
    return kind == QueryKind::nth_from_left || kind == QueryKind::nth_from_right || kind == QueryKind::nth_vertical ||
           kind == QueryKind::nth_from_bottom;
  }
  bool operator==(const SpatialQuery&) const = default;
};

inline std::string to_string(const SpatialQuery& q) {
  switch (q.kind) {
    case QueryKind::leftmost: return "leftmost";
    case QueryKind::rightmost: return "rightmost";
    case QueryKind::nth_from_left: return "nth_from_left(" + std::to_string(q.n) + ")";
    case QueryKind::nth_from_right: return "nth_from_right(" + std::to_string(q.n) + ")";
    case QueryKind::top: return "top";
    case QueryKind::bottom: return "bottom";
    case QueryKind::nth_vertical: return "nth_vertical(" + std::to_string(q.n) + ")";
    case QueryKind::nth_from_bottom: return "nth_from_bottom(" + std::to_string(q.n) + ")";
    case QueryKind::grid_cell:
      return std::string("grid_cell(") + (q.row == GridRow::top ? "top" : "bottom") + "," +
             (q.col == GridCol::left ? "left" : "right") + ")";
    default: return "unique";
  }
}

// Elements a query needs before it can pick anything.
inline std::size_t required_cardinality(const SpatialQuery& q) {
  switch (q.kind) {
    case QueryKind::leftmost:
    case QueryKind::rightmost:
    case QueryKind::top:
    case QueryKind::bottom: return 2;
    case QueryKind::grid_cell: return 4;
    case QueryKind::unique: return 1;
    default: return static_cast<std::size_t>(q.n);
  }
}

inline SpatialQuery parse_spatial_query(const std::string& context_free_prompt) {
  std::string lower = to_lower_copy(context_free_prompt);
  SpatialQuery q;

  static const std::regex grid_re(
      R"(\b(top|upper|bottom|lower)[\s-]+(left|right)\b|\b(left|right)[\s-]+(top|upper|bottom|lower)\b)");
  static const std::regex frame_re(R"(\bfrom the (left|right|top|bottom)\b)");
  static const std::regex horizontal_re(R"(\b(leftmost|left|rightmost|right)\b)");
  static const std::regex vertical_re(R"(\b(topmost|top|uppermost|upper|bottommost|bottom|lowermost|lower)\b)");

  std::smatch m;
  std::optional<SpatialQuery> grid;
  if (std::regex_search(lower, m, grid_re)) {
    const std::string v = m[1].matched ? m[1].str() : m[4].str();
    const std::string h = m[1].matched ? m[2].str() : m[3].str();
    grid = SpatialQuery{QueryKind::grid_cell, 0, (v == "top" || v == "upper") ? GridRow::top : GridRow::bottom,
                        h == "left" ? GridCol::left : GridCol::right};
    lower.replace(static_cast<std::size_t>(m.position(0)), static_cast<std::size_t>(m.length(0)), " ");
  }
  std::optional<std::string> frame;
  if (std::regex_search(lower, m, frame_re)) {
    frame = m[1].str();
    lower.replace(static_cast<std::size_t>(m.position(0)), static_cast<std::size_t>(m.length(0)), " ");
  }
  std::optional<int> ordinal;
  try {
    ordinal = detail::find_ordinal(lower);
  } catch (const RequirementError& e) {
    throw ArrangementError(e.what());
  }
  std::set<QueryKind> adjectives;
  for (auto it = std::sregex_iterator(lower.begin(), lower.end(), horizontal_re); it != std::sregex_iterator(); ++it)
    adjectives.insert(it->str().rfind("left", 0) == 0 ? QueryKind::leftmost : QueryKind::rightmost);
  for (auto it = std::sregex_iterator(lower.begin(), lower.end(), vertical_re); it != std::sregex_iterator(); ++it) {
    const std::string w = it->str();
    adjectives.insert((w.rfind("top", 0) == 0 || w.rfind("up", 0) == 0) ? QueryKind::top : QueryKind::bottom);
  }

  const auto conflict = [&] { return ArrangementError("conflicting spatial cues in '" + context_free_prompt + "'"); };
  if (grid) {
    if (ordinal || frame || !adjectives.empty()) throw conflict();
    return *grid;
  }
  if (ordinal) {
    if (!adjectives.empty()) throw conflict();
    q.n = *ordinal;
    if (!frame || *frame == "top") q.kind = QueryKind::nth_vertical;
    else if (*frame == "left") q.kind = QueryKind::nth_from_left;
    else if (*frame == "right") q.kind = QueryKind::nth_from_right;
    else q.kind = QueryKind::nth_from_bottom;
    return q;
  }
  if (frame) throw conflict();  // "from the left" without an ordinal
  if (adjectives.size() > 1) throw conflict();
  if (adjectives.size() == 1) q.kind = *adjectives.begin();
  return q;
}

struct PartVerdict {
  bool suitable = false;
  std::string part_id;  // empty when unsuitable
  std::string reasoning;
};

namespace detail {

inline std::string fmt_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

// Threshold between the best two clusters of `values` (minimum within-cluster
// squared error, equal costs broken by the wider gap), or nullopt when the gap
// is too small or two different splits remain equally good.
inline std::optional<double> axis_split(std::vector<double> values, double tie_eps) {
  std::sort(values.begin(), values.end());
  constexpr double kSame = 1e-9;
  std::optional<std::size_t> best;
  double best_cost = 0.0;
  bool tied = false;
  for (std::size_t k = 1; k < values.size(); ++k) {
    double cost = 0.0;
    for (auto [lo, hi] : {std::pair{std::size_t{0}, k}, std::pair{k, values.size()}}) {
      double mean = 0.0;
      for (std::size_t i = lo; i < hi; ++i) mean += values[i];
      mean /= static_cast<double>(hi - lo);
      for (std::size_t i = lo; i < hi; ++i) cost += (values[i] - mean) * (values[i] - mean);
    }
    const double gap = values[k] - values[k - 1];
    if (!best || cost < best_cost - kSame) {
      best = k;
      best_cost = cost;
      tied = false;
    } else if (cost <= best_cost + kSame) {
      const double best_gap = values[*best] - values[*best - 1];
      if (gap > best_gap + kSame) {
        best = k;
        best_cost = std::min(best_cost, cost);
        tied = false;
      } else if (gap >= best_gap - kSame) {
        tied = true;
      }
    }
  }
  if (!best || tied) return std::nullopt;
  const std::size_t k = *best;
  if (!(values[k] - values[k - 1] > tie_eps)) return std::nullopt;
  return 0.5 * (values[k] + values[k - 1]);
}

inline PartVerdict unsuitable(std::string why) { return {false, {}, std::move(why)}; }

}  // namespace detail

// Deterministic arrangement engine. X = 1 is the viewer's left, Y = 1 the top.
// Unsuitable when the element count is short, the arrangement does not fit the
// query, or the decisive coordinate gap to a competitor is below `tie_eps`.
inline PartVerdict select_part(const std::vector<FunctionalElement>& elements, const SpatialQuery& q,
                               double tie_eps = 0.05) {
  if (!(tie_eps > 0.0)) throw InvalidArgument("tie_eps must be positive");
  if (q.is_nth() && q.n < 1) throw InvalidArgument("ordinal queries need n >= 1");
  const std::size_t need = required_cardinality(q);
  if (q.kind == QueryKind::unique) {
    if (elements.size() != 1)
      return detail::unsuitable("query names no position, so exactly one element is needed; found " +
                                std::to_string(elements.size()));
    return {true, elements.front().part_id, "single element " + elements.front().enriched_label};
  }
  if (elements.size() < need)
    return detail::unsuitable(to_string(q) + " needs at least " + std::to_string(need) + " elements; found " +
                              std::to_string(elements.size()));

  if (q.kind == QueryKind::grid_cell) {
    std::vector<double> xs, ys;
    for (const auto& e : elements) {
      xs.push_back(e.centroid2.x);
      ys.push_back(e.centroid2.y);
    }
    const auto x_cut = detail::axis_split(xs, tie_eps);
    const auto y_cut = detail::axis_split(ys, tie_eps);
    if (!x_cut || !y_cut) return detail::unsuitable("elements do not form two separated columns and rows");
    std::vector<const FunctionalElement*> cells[2][2];  // [row top?][col left?]
    for (const auto& e : elements) cells[e.centroid2.y > *y_cut][e.centroid2.x > *x_cut].push_back(&e);
    for (const auto& row : cells)
      for (const auto& cell : row)
        if (cell.empty()) return detail::unsuitable("2x2 grid has an empty cell");
    const auto& cell = cells[q.row == GridRow::top][q.col == GridCol::left];
    if (cell.size() != 1) return detail::unsuitable("requested grid cell holds " + std::to_string(cell.size()) + " elements");
    return {true, cell.front()->part_id, to_string(q) + " is " + cell.front()->enriched_label};
  }

  const bool horizontal = q.kind == QueryKind::leftmost || q.kind == QueryKind::rightmost ||
                          q.kind == QueryKind::nth_from_left || q.kind == QueryKind::nth_from_right;
  // Descending order means "counted from the left" (X) or "from the top" (Y).
  const bool descending = q.kind == QueryKind::leftmost || q.kind == QueryKind::nth_from_left ||
                          q.kind == QueryKind::top || q.kind == QueryKind::nth_vertical;
  auto coord = [&](const FunctionalElement& e) { return horizontal ? e.centroid2.x : e.centroid2.y; };
  std::vector<const FunctionalElement*> order;
  for (const auto& e : elements) order.push_back(&e);
  std::stable_sort(order.begin(), order.end(), [&](const FunctionalElement* a, const FunctionalElement* b) {
    if (coord(*a) != coord(*b)) return descending ? coord(*a) > coord(*b) : coord(*a) < coord(*b);
    return a->part_id < b->part_id;
  });
  const std::size_t pick = q.is_nth() ? static_cast<std::size_t>(q.n - 1) : 0;
  const FunctionalElement& chosen = *order[pick];
  for (const std::size_t other : {pick - 1, pick + 1}) {
    if (other >= order.size()) continue;  // wraps for pick == 0
    if (std::abs(coord(*order[other]) - coord(chosen)) < tie_eps)
      return detail::unsuitable(to_string(q) + " is ambiguous: " + chosen.part_id + " and " + order[other]->part_id +
                                " are closer than the tie tolerance");
  }
  return {true, chosen.part_id, to_string(q) + " is " + chosen.enriched_label + " at (" + detail::fmt_coord(chosen.centroid2.x) +
                                    ", " + detail::fmt_coord(chosen.centroid2.y) + ")"};
}

struct AssetElements {
  std::string asset_id;
  std::vector<FunctionalElement> elements;
};

struct AssetVerdict {
  std::string asset_id;
  PartVerdict verdict;
};

// Candidate listing in the id / parts / centroid layout the arrangement prompt describes.
inline std::string render_arrangement_listing(const std::vector<AssetElements>& assets) {
  std::string out;
  for (const auto& a : assets) {
    out += "- id: " + a.asset_id + "\n  parts:\n";
    for (const auto& e : a.elements) {
      out += "    - id: " + e.part_id + "\n      name: " + e.enriched_label + "\n      centroid: [" +
             detail::fmt_coord(e.centroid2.x) + ", " + detail::fmt_coord(e.centroid2.y) + "]\n";
    }
  }
  if (!out.empty()) out.pop_back();
  return out;
}

// One verdict per candidate asset, parsed from the model's list. Assets with no
// elements are unsuitable without asking; assets the model leaves out are
// reported unsuitable.
inline std::vector<AssetVerdict> select_parts_llm(const LlmClient& client, const std::vector<AssetElements>& assets,
                                                  const std::string& object_name, const std::string& functional_label,
                                                  const std::string& context_free_prompt) {
  std::vector<AssetVerdict> out;
  std::vector<AssetElements> asked;
  for (const auto& a : assets) {
    if (a.elements.empty()) continue;
    asked.push_back(a);
  }
  std::map<std::string, PartVerdict> verdicts;
  if (!asked.empty()) {
    const auto response = client.complete(arrangement_template(), {{"object", object_name},
                                                                   {"func", functional_label},
                                                                   {"prompt", context_free_prompt},
                                                                   {"objects", render_arrangement_listing(asked)}});
    const StructNode& doc = *response.parsed;
    if (!doc.is_list()) throw ParseError("arrangement reply must be a list");
    for (const auto& item : doc.items()) {
      const auto id = item.at("id").text();
      if (!id) throw ParseError("arrangement verdict without id");
      const auto asset = std::find_if(asked.begin(), asked.end(), [&](const auto& a) { return a.asset_id == *id; });
      if (asset == asked.end()) throw ArrangementError("verdict names unknown object '" + *id + "'");
      PartVerdict v;
      v.suitable = item.at("suitable").boolean();
      if (const auto* r = item.find("reasoning"); r && r->text()) v.reasoning = *r->text();
      const auto part = item.find("part_id") ? item.at("part_id").text() : std::nullopt;
      if (v.suitable) {
        if (!part) throw ArrangementError("suitable verdict for '" + *id + "' has no part_id");
        const bool known = std::any_of(asset->elements.begin(), asset->elements.end(),
                                       [&](const FunctionalElement& e) { return e.part_id == *part; });
        if (!known) throw ArrangementError("verdict names part '" + *part + "' that is not in object '" + *id + "'");
        v.part_id = *part;
      }
      verdicts[*id] = v;
    }
  }
  for (const auto& a : assets) {
    if (a.elements.empty()) {
      out.push_back({a.asset_id, detail::unsuitable("no functional elements")});
    } else if (auto it = verdicts.find(a.asset_id); it != verdicts.end()) {
      out.push_back({a.asset_id, it->second});
    } else {
      out.push_back({a.asset_id, detail::unsuitable("not listed in the model's reply")});
    }
  }
  return out;
}

inline PartVerdict select_part_llm(const LlmClient& client, const AssetElements& asset, const std::string& object_name,
                                   const std::string& functional_label, const std::string& context_free_prompt) {
  return select_parts_llm(client, {asset}, object_name, functional_label, context_free_prompt).front().verdict;
}

// Uniform pick among suitable selections.
inline MaskSelection choose_final(const std::vector<MaskSelection>& selections, std::uint64_t seed) {
  if (selections.empty()) throw InvalidArgument("no suitable selection to choose from");
  Rng rng(seed);
  return selections[rng.below(selections.size())];
}

}  // namespace funscene
