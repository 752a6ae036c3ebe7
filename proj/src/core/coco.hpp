#pragma once

#include <string>
#include <vector>

#include "annotate.hpp"
#include "catalog.hpp"
#include "evalkit.hpp"

namespace termstrip {

// COCO-style dataset document. Image ids are scene_id + 1 and category ids
// are class_id + 1 (both 1-based in the file, as the format expects).
std::string coco_export_text(const std::vector<AnnotationSet>& sets,
                             const Catalog& catalog);

struct CocoGroundTruth {
  std::vector<GtBox> boxes;       // class_id mapped back to 0-based
  std::vector<int> image_ids;     // every image in the file, even empty ones
  int category_count = 0;
};

CocoGroundTruth parse_coco_ground_truth(const std::string& text);

// COCO results array: [{image_id, category_id, bbox, score}, ...]
std::vector<Detection> parse_coco_detections(const std::string& text);

}  // namespace termstrip
