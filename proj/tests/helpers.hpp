#pragma once

#include <cstdlib>
#include <string>

#include "core/catalog.hpp"

namespace testhelp {

// Tests run with the repository root as working directory (set by ctest);
// TERMSTRIP_TEST_ROOT overrides for manual runs from elsewhere.
inline std::string repo_path(const std::string& rel) {
  if (const char* root = std::getenv("TERMSTRIP_TEST_ROOT"))
    return std::string(root) + "/" + rel;
  return rel;
}

inline const termstrip::Catalog& reference_catalog() {
  static const termstrip::Catalog catalog =
      termstrip::Catalog::load(repo_path("data/reference_catalog.json"));
  return catalog;
}

// Two block types sized so that a->b obliges an end cover (b is shorter and
// shallower than 90% of a) while b->a does not.
inline std::string mini_catalog_text(bool bridgeable = true, int block_types = 2) {
  const char* bridge_flag = bridgeable ? "true" : "false";
  std::string blocks = std::string(R"({
      "part_id": "blk-a", "class_id": 0,
      "width_mm": 5.0, "height_mm": 50.0, "depth_mm": 48.0,
      "marking_points": 1, "open_sided": true, "compatible_end_cover": "cov",
      "shafts": [{"shaft_index": 0, "bridgeable": )") +
                       bridge_flag + R"(, "position_mm": [2.5, 15.0]}]
    })";
  if (block_types > 1)
    blocks += std::string(R"(, {
      "part_id": "blk-b", "class_id": 1,
      "width_mm": 8.0, "height_mm": 40.0, "depth_mm": 40.0,
      "marking_points": 1, "open_sided": true, "compatible_end_cover": "cov",
      "shafts": [{"shaft_index": 0, "bridgeable": )") +
              bridge_flag + R"(, "position_mm": [4.0, 12.0]}]
    })";
  return std::string(R"({
    "materials": [
      {"name": "gray", "rgb": [0.5, 0.5, 0.5], "selection_weight": 0.8},
      {"name": "red", "rgb": [0.7, 0.1, 0.1], "selection_weight": 0.2}
    ],
    "terminal_blocks": [)") +
         blocks + R"(],
    "end_covers": [
      {"part_id": "cov", "class_id": )" +
         (block_types > 1 ? "2" : "1") + R"(,
       "width_mm": 2.0, "height_mm": 52.0, "depth_mm": 48.0}
    ],
    "end_clamps": [
      {"part_id": "clamp", "class_id": )" +
         (block_types > 1 ? "3" : "2") + R"(,
       "width_mm": 9.0, "height_mm": 40.0, "depth_mm": 42.0}
    ],
    "plug_in_bridges": [
      {"part_id": "bridge", "class_id": )" +
         (block_types > 1 ? "4" : "3") + R"(,
       "width_mm": 5.0, "height_mm": 13.0, "depth_mm": 8.0}
    ],
    "test_adapters": [
      {"part_id": "adapter", "class_id": )" +
         (block_types > 1 ? "5" : "4") + R"(,
       "width_mm": 4.4, "height_mm": 7.0, "depth_mm": 26.0}
    ],
    "markings": [
      {"part_id": "tag", "width_mm": 5.0, "height_mm": 8.0, "depth_mm": 1.0}
    ],
    "din_rails": [
      {"part_id": "rail", "width_mm": 1000.0, "height_mm": 35.0, "depth_mm": 7.5}
    ]
  })";
}

}  // namespace testhelp
