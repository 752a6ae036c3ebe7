#include "stripgen.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "errors.hpp"
#include "json.hpp"

namespace termstrip {
namespace {

using nlohmann::json;

// Sub-stream indices under params.seed; fixed so every stage sees the same
// draws no matter what the other stages do.
enum StreamIndex : std::uint64_t {
  kStructureStream = 1,
  kMaterialStream = 2,
  kMarkingStream = 3,
  kBridgeStream = 4,
  kAdapterStream = 5,
};

const MaterialSpec& pick_weighted(const std::vector<MaterialSpec>& palette,
                                  CounterRng& rng) {
  double u = rng.uniform();
  double cum = 0.0;
  for (const auto& m : palette) {
    cum += m.selection_weight;
    if (u < cum) return m;
  }
  return palette.back();
}

const MaterialSpec& gray_material(const Catalog& catalog) {
  for (const auto& m : catalog.materials())
    if (m.name == "gray") return m;
  return catalog.materials().front();
}

const PartSpec* cover_part(const Catalog& catalog, const PartSpec& block) {
  if (block.compatible_end_cover)
    return &catalog.part(*block.compatible_end_cover);
  const auto& covers = catalog.parts_of_kind(PartKind::end_cover);
  if (covers.empty())
    throw GenerationError("end cover required after '" + block.part_id +
                          "' but the catalog has no end_cover part");
  return covers.front();
}

// Widest marking tag that still fits on the block, else the narrowest one.
const PartSpec* marking_part_for(const Catalog& catalog, const PartSpec& block) {
  const auto& tags = catalog.parts_of_kind(PartKind::marking);
  if (tags.empty()) return nullptr;
  const PartSpec* best = nullptr;
  const PartSpec* narrowest = tags.front();
  for (const PartSpec* tag : tags) {
    if (tag->width_mm < narrowest->width_mm) narrowest = tag;
    if (tag->width_mm <= block.width_mm &&
        (!best || tag->width_mm > best->width_mm))
      best = tag;
  }
  return best ? best : narrowest;
}

json attachment_to_json(const Attachment& a) {
  json j;
  switch (a.kind) {
    case Attachment::Kind::marking:
      j["kind"] = "marking";
      j["part_id"] = a.part_id;
      j["point_index"] = a.point_index;
      break;
    case Attachment::Kind::bridge:
      j["kind"] = "bridge";
      j["level"] = a.level;
      j["first_instance"] = a.first_instance;
      j["last_instance"] = a.last_instance;
      j["color"] = a.color;
      break;
    case Attachment::Kind::adapter:
      j["kind"] = "adapter";
      j["shaft_index"] = a.shaft_index;
      j["color"] = a.color;
      break;
  }
  return j;
}

Attachment attachment_from_json(const json& j) {
  Attachment a;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "marking") {
    a.kind = Attachment::Kind::marking;
    a.part_id = j.at("part_id").get<std::string>();
    a.point_index = j.at("point_index").get<int>();
  } else if (kind == "bridge") {
    a.kind = Attachment::Kind::bridge;
    a.level = j.at("level").get<int>();
    a.first_instance = j.at("first_instance").get<int>();
    a.last_instance = j.at("last_instance").get<int>();
    a.color = j.at("color").get<std::string>();
  } else if (kind == "adapter") {
    a.kind = Attachment::Kind::adapter;
    a.shaft_index = j.at("shaft_index").get<int>();
    a.color = j.at("color").get<std::string>();
  } else {
    throw ParseError("unknown attachment kind '" + kind + "'");
  }
  return a;
}

json material_to_json(const MaterialSpec& m) {
  return json{{"name", m.name},
              {"rgb", {m.rgb[0], m.rgb[1], m.rgb[2]}},
              {"roughness", m.roughness},
              {"specular", m.specular},
              {"metallic", m.metallic},
              {"selection_weight", m.selection_weight}};
}

MaterialSpec material_from_json(const json& j) {
  MaterialSpec m;
  m.name = j.at("name").get<std::string>();
  for (int i = 0; i < 3; ++i) m.rgb[i] = j.at("rgb").at(i).get<double>();
  m.roughness = j.at("roughness").get<double>();
  m.specular = j.at("specular").get<double>();
  m.metallic = j.at("metallic").get<double>();
  m.selection_weight = j.at("selection_weight").get<double>();
  return m;
}

json params_to_json(const GenerationParams& p) {
  return json{{"object_threshold", p.object_threshold},
              {"max_group_repeat", p.max_group_repeat},
              {"p_marking", p.p_marking},
              {"p_red_bridge", p.p_red_bridge},
              {"p_adapter_per_shaft", p.p_adapter_per_shaft},
              {"p_strip_without_adapters", p.p_strip_without_adapters},
              {"p_end_clamps", p.p_end_clamps},
              {"end_cover_ratio", p.end_cover_ratio},
              {"p_bridge_per_run", p.p_bridge_per_run},
              {"adapter_colors", p.adapter_colors},
              {"seed", p.seed}};
}

GenerationParams params_from_json(const json& j) {
  GenerationParams p;
  if (!j.is_object()) throw ParseError("generation params must be a JSON object");
  if (j.contains("object_threshold")) p.object_threshold = j.at("object_threshold").get<int>();
  if (j.contains("max_group_repeat")) p.max_group_repeat = j.at("max_group_repeat").get<int>();
  if (j.contains("p_marking")) p.p_marking = j.at("p_marking").get<double>();
  if (j.contains("p_red_bridge")) p.p_red_bridge = j.at("p_red_bridge").get<double>();
  if (j.contains("p_adapter_per_shaft"))
    p.p_adapter_per_shaft = j.at("p_adapter_per_shaft").get<double>();
  if (j.contains("p_strip_without_adapters"))
    p.p_strip_without_adapters = j.at("p_strip_without_adapters").get<double>();
  if (j.contains("p_end_clamps")) p.p_end_clamps = j.at("p_end_clamps").get<double>();
  if (j.contains("end_cover_ratio")) p.end_cover_ratio = j.at("end_cover_ratio").get<double>();
  if (j.contains("p_bridge_per_run")) p.p_bridge_per_run = j.at("p_bridge_per_run").get<double>();
  if (j.contains("adapter_colors"))
    p.adapter_colors = j.at("adapter_colors").get<std::vector<std::string>>();
  if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
  p.validate();
  return p;
}

}  // namespace

void GenerationParams::validate() const {
  if (object_threshold <= 0) throw ValidationError("object_threshold must be > 0");
  if (max_group_repeat < 1) throw ValidationError("max_group_repeat must be >= 1");
  for (auto [name, v] : {std::pair<const char*, double>{"p_marking", p_marking},
                         {"p_red_bridge", p_red_bridge},
                         {"p_adapter_per_shaft", p_adapter_per_shaft},
                         {"p_strip_without_adapters", p_strip_without_adapters},
                         {"p_end_clamps", p_end_clamps},
                         {"p_bridge_per_run", p_bridge_per_run}}) {
    if (!(v >= 0.0 && v <= 1.0))
      throw ValidationError(std::string(name) + " must be in [0,1]");
  }
  if (!(end_cover_ratio > 0.0 && end_cover_ratio <= 1.0))
    throw ValidationError("end_cover_ratio must be in (0,1]");
  if (adapter_colors.empty())
    throw ValidationError("adapter_colors must not be empty");
}

std::string GenerationParams::to_json_text() const {
  return params_to_json(*this).dump(2);
}

GenerationParams GenerationParams::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("generation params: ") + e.what());
  }
  try {
    return params_from_json(j);
  } catch (const json::exception& e) {
    throw ParseError(std::string("generation params: ") + e.what());
  }
}

std::string StripConfig::to_json_text() const {
  json placements_json = json::array();
  for (const auto& pp : placements) {
    json attachments = json::array();
    for (const auto& a : pp.attachments) attachments.push_back(attachment_to_json(a));
    placements_json.push_back(json{{"part_id", pp.part_id},
                                   {"kind", to_string(pp.kind)},
                                   {"instance_index", pp.instance_index},
                                   {"group_index", pp.group_index},
                                   {"rail_offset_mm", pp.rail_offset_mm},
                                   {"material", material_to_json(pp.material)},
                                   {"attachments", attachments}});
  }
  json j{{"placements", placements_json},
         {"total_length_mm", total_length_mm},
         {"adapters_suppressed", adapters_suppressed},
         {"seed", seed},
         {"params", params_to_json(params)}};
  return j.dump(2);
}

StripConfig StripConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("strip config: ") + e.what());
  }
  try {
    StripConfig s;
    s.total_length_mm = j.at("total_length_mm").get<double>();
    s.adapters_suppressed = j.at("adapters_suppressed").get<bool>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.params = params_from_json(j.at("params"));
    for (const auto& pj : j.at("placements")) {
      PlacedPart pp;
      pp.part_id = pj.at("part_id").get<std::string>();
      const auto kind = part_kind_from_string(pj.at("kind").get<std::string>());
      if (!kind) throw ParseError("strip config: unknown part kind");
      pp.kind = *kind;
      pp.instance_index = pj.at("instance_index").get<int>();
      pp.group_index = pj.at("group_index").get<int>();
      pp.rail_offset_mm = pj.at("rail_offset_mm").get<double>();
      pp.material = material_from_json(pj.at("material"));
      for (const auto& aj : pj.at("attachments"))
        pp.attachments.push_back(attachment_from_json(aj));
      s.placements.push_back(std::move(pp));
    }
    return s;
  } catch (const json::exception& e) {
    throw ParseError(std::string("strip config: ") + e.what());
  }
}

bool end_cover_required(const PartSpec& prev, const PartSpec& next, double ratio) {
  return next.height_mm < ratio * prev.height_mm ||
         next.depth_mm < ratio * prev.depth_mm;
}

void place_markings(const Catalog& catalog, StripConfig& strip, CounterRng& rng) {
  for (auto& pp : strip.placements) {
    if (pp.kind != PartKind::terminal_block) continue;
    const PartSpec& part = catalog.part(pp.part_id);
    const PartSpec* tag = marking_part_for(catalog, part);
    for (int point = 0; point < part.marking_points; ++point) {
      if (!rng.bernoulli(strip.params.p_marking)) continue;
      if (!tag) continue;  // draw consumed either way
      Attachment a;
      a.kind = Attachment::Kind::marking;
      a.part_id = tag->part_id;
      a.point_index = point;
      pp.attachments.push_back(a);
    }
  }
}

void place_bridges(const Catalog& catalog, StripConfig& strip, CounterRng& rng) {
  if (catalog.parts_of_kind(PartKind::plug_in_bridge).empty()) return;
  int max_level = 0;
  for (const PartSpec* b : catalog.parts_of_kind(PartKind::terminal_block))
    for (const auto& s : b->shafts) max_level = std::max(max_level, s.shaft_index + 1);

  const auto bridgeable_at = [&](const PlacedPart& pp, int level) {
    if (pp.kind != PartKind::terminal_block) return false;
    for (const auto& s : catalog.part(pp.part_id).shafts)
      if (s.shaft_index == level) return s.bridgeable;
    return false;
  };

  for (int level = 0; level < max_level; ++level) {
    std::vector<std::vector<int>> runs;
    std::vector<int> current;
    for (const auto& pp : strip.placements) {
      if (bridgeable_at(pp, level)) {
        current.push_back(pp.instance_index);
      } else if (!current.empty()) {
        runs.push_back(std::move(current));
        current.clear();
      }
    }
    if (!current.empty()) runs.push_back(std::move(current));

    for (const auto& run : runs) {
      if (run.size() < 2) continue;
      if (!rng.bernoulli(strip.params.p_bridge_per_run)) continue;
      const int start = static_cast<int>(rng.uniform_int(run.size() - 1));
      const int max_len = static_cast<int>(run.size()) - start;
      const int length = 2 + static_cast<int>(rng.uniform_int(max_len - 1));
      Attachment a;
      a.kind = Attachment::Kind::bridge;
      a.level = level;
      a.first_instance = run[start];
      a.last_instance = run[start + length - 1];
      a.color = rng.bernoulli(strip.params.p_red_bridge) ? "red" : "blue";
      strip.placements[a.first_instance].attachments.push_back(a);
    }
  }
}

void place_test_adapters(const Catalog& catalog, StripConfig& strip, CounterRng& rng) {
  strip.adapters_suppressed = rng.bernoulli(strip.params.p_strip_without_adapters);
  if (strip.adapters_suppressed) return;
  if (catalog.parts_of_kind(PartKind::test_adapter).empty()) return;

  // shafts already taken by a bridge, keyed by (instance, level)
  std::set<std::pair<int, int>> occupied;
  for (const auto& pp : strip.placements)
    for (const auto& a : pp.attachments)
      if (a.kind == Attachment::Kind::bridge)
        for (int i = a.first_instance; i <= a.last_instance; ++i)
          occupied.insert({i, a.level});

  for (auto& pp : strip.placements) {
    if (pp.kind != PartKind::terminal_block) continue;
    for (const auto& shaft : catalog.part(pp.part_id).shafts) {
      if (occupied.count({pp.instance_index, shaft.shaft_index})) continue;
      if (!rng.bernoulli(strip.params.p_adapter_per_shaft)) continue;
      Attachment a;
      a.kind = Attachment::Kind::adapter;
      a.shaft_index = shaft.shaft_index;
      a.color = strip.params.adapter_colors[rng.uniform_int(
          strip.params.adapter_colors.size())];
      pp.attachments.push_back(a);
    }
  }
}

StripConfig generate_strip(const Catalog& catalog, const GenerationParams& params) {
  params.validate();
  const auto& blocks = catalog.parts_of_kind(PartKind::terminal_block);
  if (blocks.empty()) throw GenerationError("catalog has no terminal blocks");

  StripConfig strip;
  strip.seed = params.seed;
  strip.params = params;

  CounterRng structure(derive_stream(params.seed, kStructureStream));
  const bool want_clamps = structure.bernoulli(params.p_end_clamps);

  struct Slot {
    const PartSpec* part;
    int group;
  };
  std::vector<Slot> middle;
  const PartSpec* prev_block = nullptr;
  int group = 0;
  int object_count = 0;
  while (object_count <= params.object_threshold) {
    const PartSpec* type = blocks[structure.uniform_int(blocks.size())];
    if (blocks.size() > 1) {
      while (prev_block && type->part_id == prev_block->part_id)
        type = blocks[structure.uniform_int(blocks.size())];
    }
    const int repeat =
        1 + static_cast<int>(structure.uniform_int(params.max_group_repeat));
    if (prev_block && end_cover_required(*prev_block, *type, params.end_cover_ratio)) {
      middle.push_back({cover_part(catalog, *prev_block), -1});
      ++object_count;
    }
    for (int i = 0; i < repeat; ++i) middle.push_back({type, group});
    object_count += repeat;
    prev_block = type;
    ++group;
  }
  if (prev_block && prev_block->open_sided)
    middle.push_back({cover_part(catalog, *prev_block), -1});

  const auto& clamps = catalog.parts_of_kind(PartKind::end_clamp);
  const PartSpec* clamp = clamps.empty() ? nullptr : clamps.front();
  std::vector<Slot> slots;
  slots.reserve(middle.size() + 2);
  if (want_clamps && clamp) slots.push_back({clamp, -1});
  slots.insert(slots.end(), middle.begin(), middle.end());
  if (want_clamps && clamp) slots.push_back({clamp, -1});

  CounterRng material_rng(derive_stream(params.seed, kMaterialStream));
  const auto palette = material_palette(catalog);
  MaterialSpec last_block_material = gray_material(catalog);
  double offset = 0.0;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    PlacedPart pp;
    pp.part_id = slots[i].part->part_id;
    pp.kind = slots[i].part->kind;
    pp.instance_index = static_cast<int>(i);
    pp.group_index = slots[i].group;
    pp.rail_offset_mm = offset;
    offset += slots[i].part->width_mm;
    if (pp.kind == PartKind::terminal_block) {
      pp.material = pick_weighted(palette, material_rng);
      last_block_material = pp.material;
    } else if (pp.kind == PartKind::end_cover) {
      pp.material = last_block_material;  // covers match the block they cap
    } else {
      pp.material = gray_material(catalog);
    }
    strip.placements.push_back(std::move(pp));
  }
  strip.total_length_mm = offset;

  CounterRng marking_rng(derive_stream(params.seed, kMarkingStream));
  place_markings(catalog, strip, marking_rng);
  CounterRng bridge_rng(derive_stream(params.seed, kBridgeStream));
  place_bridges(catalog, strip, bridge_rng);
  CounterRng adapter_rng(derive_stream(params.seed, kAdapterStream));
  place_test_adapters(catalog, strip, adapter_rng);

  return strip;
}

}  // namespace termstrip
