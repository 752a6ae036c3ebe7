#pragma once

#include <string>
#include <vector>

#include "catalog.hpp"
#include "geometry.hpp"
#include "scenegen.hpp"

namespace termstrip {

struct GroundTruthObject {
  int class_id = 0;
  Box2D box;               // final annotation: clipped against neighbours
  Box2D full_box;          // as projected, before overlap clipping
  double center_u = 0.0;   // projected center column of the source part
  int placement_instance = -1;
  int attachment_index = -1;  // -1: the placement itself
  bool clipped = false;
};

struct AnnotationSet {
  int scene_id = 0;
  int width = 0;
  int height = 0;
  std::vector<GroundTruthObject> objects;

  std::string to_json_text() const;
  static AnnotationSet from_json_text(const std::string& text);
};

struct ClipItem {
  Box2D box;
  double center_u = 0.0;  // clip never trims a box past this column
  bool is_block = false;
  bool clipped = false;
};

// Restricts the horizontal overlap of each adjacent terminal-block pair to
// 20% of the thinner box's width; the excess is trimmed half from each side.
// Widths and the 20% allowance are taken from the boxes as passed in, and
// every edge is trimmed by at most one pair, so the result does not depend
// on processing order. Non-block items pass through untouched.
void clip_overlaps(std::vector<ClipItem>& items, double max_overlap_ratio = 0.2);

// Projects every annotated placement and attachment (markings excluded),
// applies clip_overlaps across adjacent blocks, and drops boxes smaller than
// min_area_px. Parts outside the frustum are omitted, never an error.
AnnotationSet annotate_scene(const Catalog& catalog, const SceneSpec& scene,
                             double min_area_px = 100.0);

// Re-derives the clipped boxes of an annotation set from its stored full
// boxes, including the min-area drops. annotate_scene output is a fixed
// point of this.
AnnotationSet reclip(const Catalog& catalog, const AnnotationSet& set,
                     double max_overlap_ratio = 0.2, double min_area_px = 100.0);

}  // namespace termstrip
