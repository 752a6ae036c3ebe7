#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "catalog.hpp"
#include "rng.hpp"

namespace termstrip {

struct GenerationParams {
  int object_threshold = 20;
  int max_group_repeat = 5;
  double p_marking = 0.7;
  double p_red_bridge = 0.7;
  double p_adapter_per_shaft = 0.1;
  double p_strip_without_adapters = 0.2;
  double p_end_clamps = 0.5;
  double end_cover_ratio = 0.9;
  // Chance that a maximal bridgeable run receives a bridge at all. Tunable;
  // together with the catalog's shaft counts this sets the accessory density
  // (default calibrated against the reference catalog's objects-per-scene
  // target).
  double p_bridge_per_run = 0.25;
  std::vector<std::string> adapter_colors = {"black", "red", "yellow", "blue"};
  std::uint64_t seed = 0;

  void validate() const;
  std::string to_json_text() const;
  // Missing fields keep their defaults; present fields are validated.
  static GenerationParams from_json_text(const std::string& text);
};

struct Attachment {
  enum class Kind { marking, bridge, adapter };
  Kind kind = Kind::marking;
  std::string part_id;     // marking: catalog part used to size the tag
  int point_index = 0;     // marking: which marking point on the host
  int level = 0;           // bridge: shaft level it occupies
  int first_instance = 0;  // bridge: first spanned placement
  int last_instance = 0;   // bridge: last spanned placement
  int shaft_index = 0;     // adapter: host shaft
  std::string color;       // bridge: red/blue; adapter: from adapter_colors
};

struct PlacedPart {
  std::string part_id;
  PartKind kind = PartKind::terminal_block;
  int instance_index = 0;
  int group_index = -1;  // which block-group draw produced it; -1 for non-blocks
  double rail_offset_mm = 0.0;
  MaterialSpec material;
  std::vector<Attachment> attachments;
};

struct StripConfig {
  std::vector<PlacedPart> placements;
  double total_length_mm = 0.0;
  bool adapters_suppressed = false;
  std::uint64_t seed = 0;
  GenerationParams params;

  std::string to_json_text() const;
  static StripConfig from_json_text(const std::string& text);
};

// True when `next` mounted after `prev` leaves part of prev's side exposed,
// which obliges an end cover between them.
bool end_cover_required(const PartSpec& prev, const PartSpec& next, double ratio);

StripConfig generate_strip(const Catalog& catalog, const GenerationParams& params);

// Stages below are already run by generate_strip in this order, each on its
// own derived stream; exposed separately for targeted tests. They consume rng
// draws in placement order so results are reproducible.
void place_markings(const Catalog& catalog, StripConfig& strip, CounterRng& rng);
void place_bridges(const Catalog& catalog, StripConfig& strip, CounterRng& rng);
void place_test_adapters(const Catalog& catalog, StripConfig& strip, CounterRng& rng);

}  // namespace termstrip
