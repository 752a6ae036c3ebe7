#include "core/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace termstrip {

using nlohmann::json;

namespace {

struct KindName {
  PartKind kind;
  std::string_view name;
  std::string_view array_key;  // key of the per-kind array in the catalog file
};

constexpr std::array<KindName, 7> kKindNames{{
    {PartKind::terminal_block, "terminal_block", "terminal_blocks"},
    {PartKind::end_cover, "end_cover", "end_covers"},
    {PartKind::end_clamp, "end_clamp", "end_clamps"},
    {PartKind::plug_in_bridge, "plug_in_bridge", "plug_in_bridges"},
    {PartKind::test_adapter, "test_adapter", "test_adapters"},
    {PartKind::marking, "marking", "markings"},
    {PartKind::din_rail, "din_rail", "din_rails"},
}};

[[noreturn]] void fail_validation(const std::string& part_id, const std::string& what) {
  throw ValidationError("part '" + part_id + "': " + what);
}

double require_number(const json& j, const char* key, const std::string& part_id) {
  if (!j.contains(key) || !j.at(key).is_number())
    fail_validation(part_id, std::string("missing or non-numeric field '") + key + "'");
  return j.at(key).get<double>();
}

}  // namespace

std::string_view to_string(PartKind kind) {
  return kKindNames[static_cast<std::size_t>(kind)].name;
}

std::optional<PartKind> part_kind_from_string(std::string_view s) {
  for (const auto& k : kKindNames)
    if (k.name == s) return k.kind;
  return std::nullopt;
}

bool kind_is_annotated(PartKind kind) {
  return kind != PartKind::marking && kind != PartKind::din_rail;
}

Catalog Catalog::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open catalog file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

Catalog Catalog::from_json_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("catalog parse error: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("catalog root must be a JSON object");

  Catalog cat;

  for (const auto& m : root.value("materials", json::array())) {
    MaterialSpec mat;
    mat.name = m.value("name", "");
    if (mat.name.empty()) throw ValidationError("material with empty name");
    const auto rgb = m.value("rgb", json::array());
    if (rgb.size() != 3) fail_validation(mat.name, "material rgb must have 3 entries");
    for (int i = 0; i < 3; ++i) mat.rgb[i] = rgb[i].get<double>();
    mat.roughness = m.value("roughness", 0.5);
    mat.specular = m.value("specular", 0.5);
    mat.metallic = m.value("metallic", 0.0);
    mat.selection_weight = m.value("selection_weight", 0.0);
    cat.materials_.push_back(std::move(mat));
  }

  for (const auto& kn : kKindNames) {
    for (const auto& p : root.value(std::string(kn.array_key), json::array())) {
      PartSpec part;
      part.kind = kn.kind;
      part.part_id = p.value("part_id", "");
      if (part.part_id.empty())
        throw ValidationError(std::string("part of kind '") + std::string(kn.name) +
                              "' without part_id");
      part.label = p.value("label", part.part_id);
      part.width_mm = require_number(p, "width_mm", part.part_id);
      part.height_mm = require_number(p, "height_mm", part.part_id);
      part.depth_mm = require_number(p, "depth_mm", part.part_id);
      part.marking_points = p.value("marking_points", 0);
      part.open_sided = p.value("open_sided", false);
      if (p.contains("compatible_end_cover") && !p.at("compatible_end_cover").is_null())
        part.compatible_end_cover = p.at("compatible_end_cover").get<std::string>();
      if (p.contains("class_id") && !p.at("class_id").is_null())
        part.class_id = p.at("class_id").get<int>();
      for (const auto& s : p.value("shafts", json::array())) {
        ShaftSpec shaft;
        shaft.shaft_index = s.value("shaft_index", 0);
        shaft.bridgeable = s.value("bridgeable", false);
        const auto pos = s.value("position_mm", json::array({0.0, 0.0}));
        if (pos.size() != 2) fail_validation(part.part_id, "shaft position_mm must have 2 entries");
        shaft.position_x_mm = pos[0].get<double>();
        shaft.position_y_mm = pos[1].get<double>();
        part.shafts.push_back(shaft);
      }
      cat.parts_.push_back(std::move(part));
    }
  }

  cat.index_and_validate();
  return cat;
}

void Catalog::index_and_validate() {
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    const PartSpec& p = parts_[i];
    if (!by_id_.emplace(p.part_id, i).second)
      fail_validation(p.part_id, "duplicate part_id");
    by_kind_[static_cast<std::size_t>(p.kind)].push_back(&parts_[i]);

    if (p.width_mm <= 0.0 || p.height_mm <= 0.0 || p.depth_mm <= 0.0)
      fail_validation(p.part_id, "dimensions must be positive");
    if (p.marking_points < 0) fail_validation(p.part_id, "marking_points must be >= 0");

    std::vector<int> idx;
    for (const auto& s : p.shafts) idx.push_back(s.shaft_index);
    std::sort(idx.begin(), idx.end());
    if (std::adjacent_find(idx.begin(), idx.end()) != idx.end())
      fail_validation(p.part_id, "duplicate shaft_index");
    if (!idx.empty() && idx.front() < 0)
      fail_validation(p.part_id, "shaft_index must be >= 0");

    const bool annotated = kind_is_annotated(p.kind);
    if (annotated && !p.class_id)
      fail_validation(p.part_id, "annotated kind requires class_id");
    if (!annotated && p.class_id)
      fail_validation(p.part_id, "marking/din_rail parts must not carry class_id");
  }

  // Dangling end-cover references.
  for (const PartSpec& p : parts_) {
    if (!p.compatible_end_cover) continue;
    const PartSpec* ref = find(*p.compatible_end_cover);
    if (!ref)
      fail_validation(p.part_id, "compatible_end_cover '" + *p.compatible_end_cover +
                                     "' does not exist");
    if (ref->kind != PartKind::end_cover)
      fail_validation(p.part_id, "compatible_end_cover '" + *p.compatible_end_cover +
                                     "' is not an end_cover");
  }

  // Class ids: unique and contiguous from 0.
  std::vector<std::pair<int, std::size_t>> classes;
  for (std::size_t i = 0; i < parts_.size(); ++i)
    if (parts_[i].class_id) classes.emplace_back(*parts_[i].class_id, i);
  std::sort(classes.begin(), classes.end());
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i].first != static_cast<int>(i)) {
      const PartSpec& p = parts_[classes[i].second];
      fail_validation(p.part_id, "class_id values must be unique and contiguous from 0 (got " +
                                     std::to_string(classes[i].first) + " at rank " +
                                     std::to_string(i) + ")");
    }
    class_names_.push_back(parts_[classes[i].second].part_id);
    class_parts_.push_back(classes[i].second);
  }

  // Material palette: weights must be a distribution and the gray entry must
  // exist so the selection rule has an anchor.
  if (!materials_.empty()) {
    double sum = 0.0;
    bool has_gray = false;
    for (const auto& m : materials_) {
      if (m.selection_weight < 0.0)
        throw ValidationError("material '" + m.name + "': negative selection_weight");
      for (double c : m.rgb)
        if (c < 0.0 || c > 1.0)
          throw ValidationError("material '" + m.name + "': rgb outside [0,1]");
      for (double v : {m.roughness, m.specular, m.metallic})
        if (v < 0.0 || v > 1.0)
          throw ValidationError("material '" + m.name + "': shading value outside [0,1]");
      sum += m.selection_weight;
      has_gray |= (m.name == "gray");
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ValidationError("material selection_weights must sum to 1 (got " +
                            std::to_string(sum) + ")");
    if (!has_gray) throw ValidationError("material palette must contain a 'gray' entry");
  }
  if (!by_kind_[static_cast<std::size_t>(PartKind::terminal_block)].empty() &&
      materials_.empty())
    throw ValidationError("catalog with terminal blocks requires a material palette");
}

const PartSpec* Catalog::find(const std::string& part_id) const {
  auto it = by_id_.find(part_id);
  return it == by_id_.end() ? nullptr : &parts_[it->second];
}

const PartSpec& Catalog::part(const std::string& part_id) const {
  const PartSpec* p = find(part_id);
  if (!p) throw ValidationError("unknown part_id: " + part_id);
  return *p;
}

const std::vector<const PartSpec*>& Catalog::parts_of_kind(PartKind kind) const {
  return by_kind_[static_cast<std::size_t>(kind)];
}

std::size_t Catalog::count_of_kind(PartKind kind) const {
  return by_kind_[static_cast<std::size_t>(kind)].size();
}

const std::string& Catalog::class_name(int class_id) const {
  return class_names_.at(static_cast<std::size_t>(class_id));
}

const PartSpec& Catalog::part_for_class(int class_id) const {
  return parts_.at(class_parts_.at(static_cast<std::size_t>(class_id)));
}

std::vector<MaterialSpec> material_palette(const Catalog& catalog) {
  std::vector<MaterialSpec> palette = catalog.materials();
  double gray_weight = 0.0;
  std::size_t others = 0;
  for (const auto& m : palette) {
    if (m.name == "gray") gray_weight = m.selection_weight;
    else ++others;
  }
  if (others == 0) {
    for (auto& m : palette) m.selection_weight = 1.0;
    return palette;
  }
  const double share = (1.0 - gray_weight) / static_cast<double>(others);
  for (auto& m : palette)
    if (m.name != "gray") m.selection_weight = share;
  return palette;
}

}  // namespace termstrip
