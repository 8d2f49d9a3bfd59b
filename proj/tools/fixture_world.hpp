#pragma once

// Small self-contained world for tests, the acceptance run and demos:
// part-annotated and plain assets, hashed embedding indices, scripted scenes,
// and a scripted model that answers every prompt template the way a careful
// model would. Its answers are recorded into cassettes and replayed.

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "funscene/arrangement.hpp"
#include "funscene/asset_index.hpp"
#include "funscene/core_types.hpp"
#include "funscene/layout_clauses.hpp"
#include "funscene/llm_client.hpp"
#include "funscene/pipeline.hpp"
#include "funscene/requirement.hpp"
#include "funscene/task_parse.hpp"

namespace fixture {

using namespace funscene;

inline constexpr std::uint32_t kDim = 128;

// ---------------------------------------------------------------------------
// Assets

struct PartBuilder {
  std::string asset_id;
  int next_mask = 0;
  std::map<std::string, int> counters;

  PartNode part(const std::string& label, const Aabb3& box, std::vector<PartNode> children = {}) {
    PartNode p;
    p.part_id = label + "_" + std::to_string(++counters[label]);
    p.label = label;
    p.aabb = box;
    p.centroid3 = box.center();
    p.children = std::move(children);
    p.mask_ref = MaskRef{"masks/" + asset_id + ".npz", next_mask++};
    return p;
  }
};

inline AssetRecord base_record(const std::string& id, Database db, const std::string& category, const std::string& description,
                               Vec3 dims) {
  AssetRecord a;
  a.asset_id = id;
  a.database = db;
  a.category = category;
  a.description = description;
  a.dims = dims;
  return a;
}

// Grid of drawers or doors, each with one handle. Column 0 is the viewer's
// left (+X), row 0 the bottom.
inline AssetRecord compartment_unit(const std::string& id, const std::string& category, const std::string& description,
                                    Vec3 dims, int rows, int cols, const std::string& compartment,
                                    const std::string& func = "handle") {
  AssetRecord a = base_record(id, Database::annotated_S, category, description, dims);
  PartBuilder b{id, 0, {}};
  const double w = dims.x, d = dims.y, h = dims.z;
  const double plinth = 0.05, margin = 0.02;
  const double cw = (w - 2 * margin) / cols, ch = (h - plinth - margin) / rows;
  std::vector<PartNode> cells;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double xhi = w / 2 - margin - c * cw, xlo = xhi - cw;
      const double zlo = plinth + r * ch, zhi = zlo + ch;
      const double cx = (xlo + xhi) / 2, cz = (zlo + zhi) / 2;
      const Aabb3 handle_box{{cx - 0.06, d / 2 - 0.03, cz - 0.015}, {cx + 0.06, d / 2, cz + 0.015}};
      PartNode handle = b.part(func, handle_box);
      cells.push_back(b.part(compartment, {{xlo + 0.005, -d / 2 + 0.02, zlo + 0.005}, {xhi - 0.005, d / 2 - 0.03, zhi - 0.005}},
                             {handle}));
    }
  }
  a.root_part = b.part("body", {{-w / 2, -d / 2, 0.0}, {w / 2, d / 2, h}}, std::move(cells));
  return a;
}

inline AssetRecord oven(const std::string& id, const std::string& description, int knobs) {
  AssetRecord a = base_record(id, Database::annotated_S, "oven", description, {0.6, 0.6, 0.9});
  PartBuilder b{id, 0, {}};
  std::vector<PartNode> knob_parts;
  for (int k = 0; k < knobs; ++k) {
    const double x = knobs == 1 ? 0.0 : 0.22 - 0.44 * k / (knobs - 1);
    knob_parts.push_back(b.part("knob", {{x - 0.025, 0.27, 0.78}, {x + 0.025, 0.3, 0.83}}));
  }
  PartNode panel = b.part("panel", {{-0.29, 0.25, 0.7}, {0.29, 0.3, 0.9}}, std::move(knob_parts));
  PartNode door = b.part("door", {{-0.28, 0.25, 0.05}, {0.28, 0.29, 0.65}},
                         {b.part("handle", {{-0.2, 0.27, 0.58}, {0.2, 0.3, 0.62}})});
  a.root_part = b.part("body", {{-0.3, -0.3, 0.0}, {0.3, 0.3, 0.9}}, {door, panel});
  return a;
}

inline AssetRecord light_switch(const std::string& id, const std::string& description, int gangs) {
  const double w = 0.08 + 0.06 * (gangs - 1);
  AssetRecord a = base_record(id, Database::annotated_S, "light switch", description, {w, 0.02, 0.12});
  PartBuilder b{id, 0, {}};
  std::vector<PartNode> toggles;
  for (int g = 0; g < gangs; ++g) {
    const double x = w / 2 - 0.04 - 0.06 * g;
    toggles.push_back(b.part("switch", {{x - 0.015, 0.0, 0.04}, {x + 0.015, 0.01, 0.08}}));
  }
  a.root_part = b.part("plate", {{-w / 2, -0.01, 0.0}, {w / 2, 0.01, 0.12}}, std::move(toggles));
  return a;
}

inline AssetRecord framed_opening(const std::string& id, const std::string& category, const std::string& description, Vec3 dims,
                                  const std::string& leaf) {
  AssetRecord a = base_record(id, Database::annotated_S, category, description, dims);
  PartBuilder b{id, 0, {}};
  const double w = dims.x, d = dims.y, h = dims.z;
  const double hz = category == "door" ? 1.0 : h / 2;
  PartNode handle = b.part("handle", {{-w / 2 + 0.08, d / 2 - 0.03, hz - 0.05}, {-w / 2 + 0.14, d / 2, hz + 0.05}});
  PartNode panel = b.part(leaf, {{-w / 2 + 0.03, -d / 2 + 0.01, 0.03}, {w / 2 - 0.03, d / 2 - 0.01, h - 0.03}}, {handle});
  a.root_part = b.part("frame", {{-w / 2, -d / 2, 0.0}, {w / 2, d / 2, h}}, {panel});
  return a;
}

inline std::vector<AssetRecord> annotated_assets() {
  return {
      compartment_unit("S_cabinet_3drawer", "cabinet", "wooden cabinet with three stacked drawers", {0.8, 0.5, 1.0}, 3, 1, "drawer"),
      compartment_unit("S_cabinet_4drawer", "cabinet", "tall cabinet with four stacked drawers", {0.6, 0.5, 1.2}, 4, 1, "drawer"),
      compartment_unit("S_cabinet_2door", "cabinet", "low cabinet with two side by side doors", {1.0, 0.45, 0.8}, 1, 2, "door"),
      compartment_unit("S_cabinet_3door", "cabinet", "sideboard cabinet with three doors in a row", {1.5, 0.45, 0.8}, 1, 3, "door"),
      compartment_unit("S_nightstand_2drawer", "nightstand", "nightstand with two stacked drawers", {0.5, 0.4, 0.6}, 2, 1, "drawer"),
      compartment_unit("S_nightstand_2x2", "nightstand", "wide nightstand with four drawers in two rows", {0.7, 0.4, 0.6}, 2, 2,
                       "drawer"),
      compartment_unit("S_nightstand_1drawer", "nightstand", "small nightstand with a single drawer", {0.45, 0.4, 0.55}, 1, 1,
                       "drawer"),
      compartment_unit("S_wardrobe_2door", "wardrobe", "wardrobe with two doors", {1.2, 0.6, 2.0}, 1, 2, "door"),
      compartment_unit("S_wardrobe_3door", "wardrobe", "wide wardrobe with three doors", {1.6, 0.6, 2.0}, 1, 3, "door"),
      compartment_unit("S_fridge_1door", "fridge", "fridge with a single door", {0.7, 0.7, 1.8}, 1, 1, "door"),
      oven("S_oven_1knob", "oven with a single temperature knob", 1),
      oven("S_oven_4knob", "oven with four knobs in a row", 4),
      light_switch("S_switch_1", "single light switch on a wall plate", 1),
      light_switch("S_switch_2", "double light switch with two toggles", 2),
      framed_opening("S_door_1", "door", "interior door with a lever handle", {0.9, 0.08, 2.05}, "panel"),
      framed_opening("S_window_1", "window", "casement window with a handle", {1.0, 0.08, 1.2}, "sash"),
  };
}

inline std::vector<AssetRecord> plain_assets() {
  const auto U = Database::unannotated_U;
  return {
      base_record("U_tv", U, "tv", "flat screen tv on a low stand", {1.4, 0.45, 1.2}),
      base_record("U_sofa", U, "sofa", "three seat fabric sofa", {2.0, 0.9, 0.85}),
      base_record("U_plant", U, "plant", "potted plant", {0.4, 0.4, 1.0}),
      base_record("U_table", U, "table", "dining table", {1.2, 0.8, 0.75}),
      base_record("U_chair", U, "chair", "wooden chair", {0.5, 0.5, 0.9}),
      base_record("U_bed", U, "bed", "double bed with headboard", {1.6, 2.0, 0.9}),
      base_record("U_lamp", U, "lamp", "small table lamp", {0.3, 0.3, 0.45}),
      base_record("U_wardrobe", U, "wardrobe", "plain wardrobe", {1.2, 0.6, 2.0}),
      base_record("U_desk", U, "desk", "writing desk", {1.2, 0.6, 0.75}),
      base_record("U_armchair", U, "armchair", "upholstered armchair", {0.8, 0.8, 0.9}),
      base_record("U_bookshelf", U, "bookshelf", "tall bookshelf", {0.9, 0.35, 1.8}),
      base_record("U_fridge", U, "fridge", "refrigerator", {0.7, 0.7, 1.8}),
      base_record("U_painting", U, "painting", "framed painting", {0.8, 0.03, 0.6}),
  };
}

inline void add_hashed(EmbeddingIndex& index, const AssetRecord& a) {
  const auto text = hashed_text_embedding(a.category + " " + a.description, index.dim(), kTextSalt);
  const auto image = hashed_text_embedding(a.category, index.dim(), kImageSalt);
  index.add(a.asset_id, text, image);
}

// ---------------------------------------------------------------------------
// Scenes

struct Scene {
  std::string prompt;
  std::string layout;
  std::string context_free;
  std::string object;
  ObjectType type = ObjectType::other;
  std::vector<ObjectSpec> objects;
  std::vector<std::string> clauses;
};

inline Scene kitchen_cabinet_scene() {
  return {"Open the third drawer of the cabinet from the bottom next to the TV.",
          "A living room with a TV and a cabinet. The cabinet is next to the TV and has multiple drawers.",
          "Open the third drawer of the cabinet from the bottom",
          "cabinet",
          ObjectType::other,
          {{"cabinet", "cabinet with drawers", true, Mount::floor},
           {"TV", "flat screen tv", true, Mount::floor},
           {"sofa", "fabric sofa", false, Mount::floor},
           {"plant", "potted plant", false, Mount::floor}},
          {"cabinet, TV | near | hard", "TV | against-wall | hard", "sofa, TV | in-front-of | soft 2",
           "plant | corner | soft 1"}};
}

inline Scene oven_scene() {
  return {"Regulate the temperature on the oven in the kitchen.",
          "A kitchen with an oven against the wall and a fridge next to it.",
          "Regulate the temperature on the oven",
          "oven",
          ObjectType::other,
          {{"oven", "kitchen oven", true, Mount::floor},
           {"fridge", "refrigerator", true, Mount::floor},
           {"table", "dining table", false, Mount::floor},
           {"chair", "wooden chair", false, Mount::floor}},
          {"oven | against-wall | hard", "fridge, oven | near | hard", "table | central | soft 1",
           "chair, table | near | soft 1"}};
}

inline Scene nightstand_scene() {
  return {"Open the top left drawer of the nightstand next to the bed.",
          "A bedroom with a bed against the wall and a nightstand on the left of the bed.",
          "Open the top left drawer of the nightstand",
          "nightstand",
          ObjectType::other,
          {{"nightstand", "bedside table with drawers", true, Mount::floor},
           {"bed", "double bed", true, Mount::floor},
           {"lamp", "table lamp", false, Mount::top},
           {"wardrobe", "wardrobe", false, Mount::floor}},
          {"bed | against-wall | hard", "nightstand, bed | left-of | hard", "nightstand, bed | near | hard",
           "lamp, nightstand | on-top-of | soft 1", "wardrobe | corner | soft 1"}};
}

// The three-prompt batch.
inline std::vector<Scene> base_scenes() { return {kitchen_cabinet_scene(), oven_scene(), nightstand_scene()}; }

// A prompt the scripted model understands but no asset can satisfy.
inline Scene impossible_scene() {
  return {"Open the fifth drawer of the nightstand next to the bed.",
          "A bedroom with a bed and a nightstand next to it.",
          "Open the fifth drawer of the nightstand",
          "nightstand",
          ObjectType::other,
          {{"nightstand", "bedside table", true, Mount::floor}, {"bed", "double bed", true, Mount::floor}},
          {"bed | against-wall | hard", "nightstand, bed | near | hard"}};
}

// Procedural scenes for throughput runs: an action on a target next to an anchor.
inline std::vector<Scene> synthetic_scenes(std::size_t count) {
  struct Action {
    std::string context_free;
    std::string object;
    ObjectType type;
    Mount mount;
  };
  const std::vector<Action> actions{
      {"Open the third drawer of the cabinet from the bottom", "cabinet", ObjectType::other, Mount::floor},
      {"Open the second drawer of the cabinet", "cabinet", ObjectType::other, Mount::floor},
      {"Open the fourth drawer of the cabinet", "cabinet", ObjectType::other, Mount::floor},
      {"Open the top drawer of the nightstand", "nightstand", ObjectType::other, Mount::floor},
      {"Open the bottom drawer of the nightstand", "nightstand", ObjectType::other, Mount::floor},
      {"Open the top left drawer of the nightstand", "nightstand", ObjectType::other, Mount::floor},
      {"Open the left door of the wardrobe", "wardrobe", ObjectType::other, Mount::floor},
      {"Open the rightmost door of the cabinet", "cabinet", ObjectType::other, Mount::floor},
      {"Open the second door of the cabinet from the left", "cabinet", ObjectType::other, Mount::floor},
      {"Regulate the temperature on the oven", "oven", ObjectType::other, Mount::floor},
      {"Turn on the light", "light switch", ObjectType::other, Mount::wall},
      {"Turn on the left light", "light switch", ObjectType::other, Mount::wall},
      {"Open the door", "door", ObjectType::door, Mount::wall},
      {"Open the window", "window", ObjectType::window, Mount::wall},
      {"Open the fridge", "fridge", ObjectType::other, Mount::floor},
  };
  const std::vector<std::string> anchors{"bed", "sofa", "TV", "desk", "bookshelf"};
  const std::vector<std::string> extras{"plant", "chair", "armchair", "table"};
  std::vector<Scene> out;
  for (std::size_t i = 0; i < count; ++i) {
    const Action& a = actions[i % actions.size()];
    const std::string& anchor = anchors[(i / actions.size() + i) % anchors.size()];
    const std::string& extra = extras[i % extras.size()];
    Scene s;
    s.prompt = a.context_free + " next to the " + anchor + ".";
    s.layout = "A room with a " + anchor + " and a " + a.object + ". The " + a.object + " is next to the " + anchor + ".";
    s.context_free = a.context_free;
    s.object = a.object;
    s.type = a.type;
    s.objects = {{a.object, a.object, true, a.mount}, {anchor, anchor, true, Mount::floor}, {extra, extra, false, Mount::floor}};
    s.clauses = {anchor + " | against-wall | hard", a.object + ", " + anchor + " | near | hard", extra + " | corner | soft 1"};
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scripted model

inline std::string yaml_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      const auto b = cur.find_first_not_of(' ');
      if (b != std::string::npos) out.push_back(cur.substr(b, cur.find_last_not_of(' ') - b + 1));
      cur.clear();
    } else {
      cur += s[i];
    }
  }
  return out;
}

class ScriptedModel {
 public:
  explicit ScriptedModel(const std::vector<Scene>& scenes) {
    for (const auto& s : scenes) {
      by_prompt_[s.prompt] = s;
      by_layout_[s.layout] = s;
    }
  }

  std::string reply(const LlmRequest& r) const {
    const auto& b = r.bindings;
    if (r.template_id == "task_parse") {
      const auto it = by_prompt_.find(b.at("prompt"));
      if (it == by_prompt_.end()) return "I am not sure what to do with this request.";
      const Scene& s = it->second;
      return "```yaml\nlayout_prompt: " + s.layout + "\ncontext_free_prompt: " + s.context_free + "\nobject_name: " + s.object +
             "\nobject_type: " + to_string(s.type) + "\n```";
    }
    if (r.template_id == "object_list") {
      const Scene& s = by_layout_.at(b.at("layout"));
      std::string out = "```yaml\nobjects:\n";
      for (const auto& o : s.objects)
        out += "  - name: " + o.name + "\n    description: " + o.description + "\n    mentioned: " +
               (o.required ? "true" : "false") + "\n    mount: " + to_string(o.mount) + "\n";
      return out + "```";
    }
    if (r.template_id == "layout_clauses") {
      const Scene& s = by_layout_.at(b.at("layout"));
      std::string out = "```yaml\nclauses:\n";
      for (const auto& c : s.clauses) out += "  - " + yaml_quote(c) + "\n";
      return out + "```";
    }
    if (r.template_id == "requirement") {
      const Requirement req = infer_requirement_fallback(b.at("prompt"), split_list(b.at("funclist")));
      const std::string object = req.object_name.empty() ? "object" : req.object_name;
      return "object: " + object + "\nobject_part: " + req.functional_label +
             "\nobject_requirement_description: The " + object + " needs " + req.text() + " for this request.\nobject_requirement: " +
             req.text();
    }
    if (r.template_id == "arrangement") return arrangement_reply(b.at("objects"), b.at("prompt"));
    throw LlmError("scripted", "no script for template " + r.template_id);
  }

  std::shared_ptr<LlmBackend> backend() const {
    auto self = std::make_shared<ScriptedModel>(*this);
    return std::make_shared<FunctionBackend>([self](const LlmRequest& r) { return self->reply(r); });
  }

 private:
  static std::string arrangement_reply(const std::string& listing, const std::string& prompt) {
    const StructNode doc = parse_block_text(listing);
    std::optional<SpatialQuery> query;
    std::string query_error;
    try {
      query = parse_spatial_query(prompt);
    } catch (const Error& e) {
      query_error = e.what();
    }
    std::string out = "```yaml\n";
    for (const auto& item : doc.items()) {
      std::vector<FunctionalElement> elements;
      for (const auto& p : item.at("parts").items()) {
        const auto& c = p.at("centroid").items();
        elements.push_back({p.at("id").str(), p.at("name").str(), p.at("name").str(), {c.at(0).number(), c.at(1).number()}});
      }
      const PartVerdict v = query ? select_part(elements, *query) : PartVerdict{false, "", query_error};
      out += "- id: " + item.at("id").str() + "\nreasoning: " + yaml_quote(v.reasoning) +
             "\nsuitable: " + (v.suitable ? "true" : "false") + "\npart_id: " + (v.suitable ? v.part_id : "None") + "\n";
    }
    return out + "```";
  }

  std::map<std::string, Scene> by_prompt_;
  std::map<std::string, Scene> by_layout_;
};

// ---------------------------------------------------------------------------
// On-disk world

// Writes assets, indices and a replay config under `dir`, records a cassette
// for `scenes` with the scripted model, and writes their prompts.
inline std::filesystem::path write_world(const std::filesystem::path& dir, const std::vector<Scene>& scenes,
                                         const std::string& prompts_name = "prompts.txt") {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "assets");
  EmbeddingIndex s_index(kDim), u_index(kDim);
  for (const auto& a : annotated_assets()) {
    save_asset_file(a, dir / "assets" / (a.asset_id + ".json"));
    add_hashed(s_index, a);
  }
  for (const auto& a : plain_assets()) {
    save_asset_file(a, dir / "assets" / (a.asset_id + ".json"));
    add_hashed(u_index, a);
  }
  s_index.save(dir / "annotated.sfei");
  u_index.save(dir / "unannotated.sfei");

  json cfg = {{"assets_dir", "assets"},
              {"annotated_index", "annotated.sfei"},
              {"unannotated_index", "unannotated.sfei"},
              {"hashed_queries", true},
              {"threshold", 0.25},
              {"llm", {{"mode", "replay"}, {"cassette", "cassette.jsonl"}}},
              {"room", {{"width", {4.0, 6.0}}, {"depth", {4.0, 6.0}}}},
              {"solver", {{"grid_step", 0.1}, {"time_limit_s", 10.0}}},
              {"orbit", {{"n_frames", 60}, {"radius_min", 1.0}, {"radius_max", 2.5}}},
              {"annotate", {{"mode", "synthetic_style"}, {"stride", 3}, {"k", 5}}},
              {"seed", 7}};
  std::ofstream(dir / "config.json") << cfg.dump(2) << '\n';

  std::ofstream prompts(dir / prompts_name);
  for (const auto& s : scenes) prompts << s.prompt << '\n';
  prompts.close();

  // Record: run every prompt once through the scripted model.
  GenerateConfig gc = load_config(dir / "config.json");
  gc.llm.mode = LlmMode::record;
  std::shared_ptr<Cassette> sink;
  const World world = load_world(gc);
  LlmClient client(make_backend(gc.llm, ScriptedModel(scenes).backend(), &sink));
  std::vector<std::string> texts;
  for (const auto& s : scenes) texts.push_back(s.prompt);
  const auto scratch = dir / "record_run";
  generate_batch(world, client, gc, texts, scratch);
  fs::remove_all(scratch);
  Cassette merged;
  if (fs::exists(dir / "cassette.jsonl")) merged = Cassette::load(dir / "cassette.jsonl");
  for (const auto& [key, r] : sink->records()) merged.add(r);
  merged.save(dir / "cassette.jsonl");
  return dir / "config.json";
}

}  // namespace fixture
