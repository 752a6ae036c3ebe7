#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "core/errors.hpp"

namespace termstrip {

enum class PartKind {
  terminal_block,
  end_cover,
  end_clamp,
  plug_in_bridge,
  test_adapter,
  marking,
  din_rail,
};

std::string_view to_string(PartKind kind);
std::optional<PartKind> part_kind_from_string(std::string_view s);

// Detection classes cover every kind except markings (distractors) and the
// rail itself.
bool kind_is_annotated(PartKind kind);

struct ShaftSpec {
  int shaft_index = 0;
  bool bridgeable = false;
  // Offset of the shaft opening on the part's front face, from the part's
  // bottom-left corner.
  double position_x_mm = 0.0;
  double position_y_mm = 0.0;
};

struct MaterialSpec {
  std::string name;
  std::array<double, 3> rgb{};
  double roughness = 0.0;
  double specular = 0.0;
  double metallic = 0.0;
  double selection_weight = 0.0;
};

struct PartSpec {
  std::string part_id;
  std::string label;
  PartKind kind = PartKind::terminal_block;
  double width_mm = 0.0;
  double height_mm = 0.0;
  double depth_mm = 0.0;
  std::vector<ShaftSpec> shafts;
  int marking_points = 0;
  bool open_sided = false;
  std::optional<std::string> compatible_end_cover;
  std::optional<int> class_id;
};

// Immutable after load; safe for concurrent reads.
class Catalog {
 public:
  static Catalog load(const std::string& path);
  static Catalog from_json_text(const std::string& text);

  const std::vector<PartSpec>& parts() const { return parts_; }
  const PartSpec* find(const std::string& part_id) const;
  const PartSpec& part(const std::string& part_id) const;
  const std::vector<const PartSpec*>& parts_of_kind(PartKind kind) const;
  std::size_t count_of_kind(PartKind kind) const;

  const std::vector<MaterialSpec>& materials() const { return materials_; }

  // Number of annotated classes; class ids are 0..class_count()-1.
  int class_count() const { return static_cast<int>(class_names_.size()); }
  const std::string& class_name(int class_id) const;
  const PartSpec& part_for_class(int class_id) const;

 private:
  void index_and_validate();

  std::vector<PartSpec> parts_;
  std::vector<MaterialSpec> materials_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::array<std::vector<const PartSpec*>, 7> by_kind_;
  std::vector<std::string> class_names_;  // class_id -> part_id
  std::vector<std::size_t> class_parts_;  // class_id -> index into parts_
};

// Selection weights for terminal-block materials: the gray entry keeps its
// configured weight (0.8 in the reference catalog) and the remaining k colors
// share the rest uniformly at (1 - w_gray) / k. A gray-only palette collapses
// to weight 1.
std::vector<MaterialSpec> material_palette(const Catalog& catalog);

}  // namespace termstrip
