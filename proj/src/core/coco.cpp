#include "coco.hpp"

#include <cstdio>
#include <set>

#include "errors.hpp"
#include "json.hpp"

namespace termstrip {
namespace {

using nlohmann::json;

std::string scene_file_name(int scene_id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "scene_%06d.png", scene_id);
  return buf;
}

}  // namespace

std::string coco_export_text(const std::vector<AnnotationSet>& sets,
                             const Catalog& catalog) {
  json images = json::array();
  json annotations = json::array();
  json categories = json::array();

  for (int cls = 0; cls < catalog.class_count(); ++cls) {
    categories.push_back(json{{"id", cls + 1},
                              {"name", catalog.class_name(cls)},
                              {"supercategory",
                               to_string(catalog.part_for_class(cls).kind)}});
  }

  std::set<int> seen;
  long long next_annotation_id = 1;
  for (const auto& set : sets) {
    if (!seen.insert(set.scene_id).second)
      throw ValidationError("duplicate scene_id " + std::to_string(set.scene_id) +
                            " in export");
    images.push_back(json{{"id", set.scene_id + 1},
                          {"file_name", scene_file_name(set.scene_id)},
                          {"width", set.width},
                          {"height", set.height}});
    for (const auto& obj : set.objects) {
      annotations.push_back(
          json{{"id", next_annotation_id++},
               {"image_id", set.scene_id + 1},
               {"category_id", obj.class_id + 1},
               {"bbox", {obj.box.x, obj.box.y, obj.box.w, obj.box.h}},
               {"area", obj.box.area()},
               {"iscrowd", 0}});
    }
  }

  json doc{{"images", images},
           {"annotations", annotations},
           {"categories", categories}};
  return doc.dump(2);
}

CocoGroundTruth parse_coco_ground_truth(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("coco ground truth: ") + e.what());
  }
  try {
    CocoGroundTruth gt;
    gt.category_count = static_cast<int>(j.at("categories").size());
    for (const auto& img : j.at("images"))
      gt.image_ids.push_back(img.at("id").get<int>());
    for (const auto& ann : j.at("annotations")) {
      GtBox box;
      box.image_id = ann.at("image_id").get<int>();
      box.class_id = ann.at("category_id").get<int>() - 1;
      const auto& b = ann.at("bbox");
      box.box = {b.at(0).get<double>(), b.at(1).get<double>(),
                 b.at(2).get<double>(), b.at(3).get<double>()};
      gt.boxes.push_back(box);
    }
    return gt;
  } catch (const json::exception& e) {
    throw ParseError(std::string("coco ground truth: ") + e.what());
  }
}

std::vector<Detection> parse_coco_detections(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("coco detections: ") + e.what());
  }
  if (!j.is_array()) throw ParseError("coco detections: expected a JSON array");
  try {
    std::vector<Detection> dets;
    dets.reserve(j.size());
    for (const auto& dj : j) {
      Detection d;
      d.image_id = dj.at("image_id").get<int>();
      d.class_id = dj.at("category_id").get<int>() - 1;
      const auto& b = dj.at("bbox");
      d.box = {b.at(0).get<double>(), b.at(1).get<double>(),
               b.at(2).get<double>(), b.at(3).get<double>()};
      d.score = dj.at("score").get<double>();
      dets.push_back(d);
    }
    return dets;
  } catch (const json::exception& e) {
    throw ParseError(std::string("coco detections: ") + e.what());
  }
}

}  // namespace termstrip
