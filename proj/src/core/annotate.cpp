#include "annotate.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "errors.hpp"
#include "json.hpp"
#include "layout.hpp"

namespace termstrip {
namespace {

using nlohmann::json;

json box_to_json(const Box2D& b) { return json{b.x, b.y, b.w, b.h}; }

Box2D box_from_json(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(),
          j.at(3).get<double>()};
}

// Projected column of a 3D point, when it lies in front of the camera.
std::optional<double> project_center_u(const Vec3& p, const CameraFrame& cam,
                                       const Intrinsics& intr) {
  const Vec3 c = cam.world_to_camera(p);
  if (c.z <= 1e-9) return std::nullopt;
  return intr.focal_px * c.x / c.z + intr.cx;
}

std::optional<GroundTruthObject> project_object(
    const Box3D& world_box, int class_id, int placement_instance,
    int attachment_index, const CameraFrame& cam, const Intrinsics& intr) {
  const auto projected = project_box(world_box, cam, intr);
  if (!projected || projected->empty()) return std::nullopt;
  GroundTruthObject obj;
  obj.class_id = class_id;
  obj.full_box = *projected;
  obj.box = *projected;
  obj.placement_instance = placement_instance;
  obj.attachment_index = attachment_index;
  const Vec3 center{(world_box.lo.x + world_box.hi.x) / 2.0,
                    (world_box.lo.y + world_box.hi.y) / 2.0,
                    (world_box.lo.z + world_box.hi.z) / 2.0};
  const auto u = project_center_u(center, cam, intr);
  obj.center_u = u ? *u : projected->x + projected->w / 2.0;
  return obj;
}

// One clip-then-drop round; true when every surviving box kept its area.
bool clip_and_drop(const Catalog& catalog, std::vector<GroundTruthObject>& objects,
                   double ratio, double min_area_px) {
  std::vector<ClipItem> items;
  items.reserve(objects.size());
  for (const auto& obj : objects) {
    ClipItem item;
    item.box = obj.full_box;
    item.center_u = obj.center_u;
    item.is_block = obj.attachment_index < 0 &&
                    catalog.part_for_class(obj.class_id).kind ==
                        PartKind::terminal_block;
    items.push_back(item);
  }
  clip_overlaps(items, ratio);

  std::vector<GroundTruthObject> kept;
  kept.reserve(objects.size());
  bool stable = true;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    GroundTruthObject obj = objects[i];
    obj.box = items[i].box;
    obj.clipped = items[i].clipped;
    if (obj.box.area() < min_area_px) {
      stable = false;
      continue;
    }
    kept.push_back(obj);
  }
  objects = std::move(kept);
  return stable;
}

void run_clip_rounds(const Catalog& catalog, std::vector<GroundTruthObject>& objects,
                     double ratio, double min_area_px) {
  // Dropping a block can create a new adjacency, so iterate; each round
  // removes at least one object, hence this terminates.
  while (!clip_and_drop(catalog, objects, ratio, min_area_px)) {
  }
}

}  // namespace

void clip_overlaps(std::vector<ClipItem>& items, double max_overlap_ratio) {
  std::vector<std::size_t> blocks;
  for (std::size_t i = 0; i < items.size(); ++i)
    if (items[i].is_block && !items[i].box.empty()) blocks.push_back(i);

  // Trimming shrinks the widths the allowance is computed from, so a single
  // pass is not a fixed point. Sweep until no edge moves; every move is a
  // strict decrease bounded by the center clamp, so this terminates, and the
  // residual excess shrinks by ratio/2 per sweep.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = 0; k + 1 < blocks.size(); ++k) {
      ClipItem& left = items[blocks[k]];
      ClipItem& right = items[blocks[k + 1]];
      const double left_hi = left.box.x + left.box.w;
      const double right_hi = right.box.x + right.box.w;
      const double overlap = left_hi - right.box.x;
      const double allowed =
          max_overlap_ratio * std::min(left.box.w, right.box.w);
      if (!(overlap > allowed)) continue;
      const double trim = 0.5 * (overlap - allowed);
      double new_left_hi = left_hi - trim;
      if (new_left_hi < left.center_u) new_left_hi = left.center_u;
      double new_right_lo = right.box.x + trim;
      if (new_right_lo > right.center_u) new_right_lo = right.center_u;
      // accept only strictly monotone moves of the stored fields; comparing
      // against the reconstructed edge would let rounding jitter at the
      // center clamp loop forever
      const double new_left_w = new_left_hi - left.box.x;
      if (new_left_w < left.box.w) {
        left.box.w = new_left_w;
        left.clipped = true;
        changed = true;
      }
      if (new_right_lo > right.box.x) {
        right.box.x = new_right_lo;
        right.box.w = right_hi - new_right_lo;
        right.clipped = true;
        changed = true;
      }
    }
  }
}

AnnotationSet annotate_scene(const Catalog& catalog, const SceneSpec& scene,
                             double min_area_px) {
  AnnotationSet set;
  set.scene_id = scene.scene_id;
  set.width = scene.width;
  set.height = scene.height;

  const CameraFrame cam = camera_frame(scene.camera);
  const Intrinsics& intr = scene.camera.intrinsics;

  for (const auto& pp : scene.strip.placements) {
    if (kind_is_annotated(pp.kind)) {
      const PartSpec& part = catalog.part(pp.part_id);
      if (auto obj = project_object(part_world_box(part, pp), *part.class_id,
                                    pp.instance_index, -1, cam, intr))
        set.objects.push_back(*obj);
    }
    for (std::size_t ai = 0; ai < pp.attachments.size(); ++ai) {
      const Attachment& a = pp.attachments[ai];
      if (a.kind == Attachment::Kind::marking) continue;  // distractors only
      const bool is_bridge = a.kind == Attachment::Kind::bridge;
      const auto& parts = catalog.parts_of_kind(
          is_bridge ? PartKind::plug_in_bridge : PartKind::test_adapter);
      if (parts.empty() || !parts.front()->class_id) continue;
      const Box3D world_box = is_bridge
                                  ? bridge_world_box(catalog, scene.strip, a)
                                  : adapter_world_box(catalog, pp, a);
      if (auto obj = project_object(world_box, *parts.front()->class_id,
                                    pp.instance_index, static_cast<int>(ai),
                                    cam, intr))
        set.objects.push_back(*obj);
    }
  }

  run_clip_rounds(catalog, set.objects, 0.2, min_area_px);
  return set;
}

AnnotationSet reclip(const Catalog& catalog, const AnnotationSet& set,
                     double max_overlap_ratio, double min_area_px) {
  AnnotationSet out = set;
  run_clip_rounds(catalog, out.objects, max_overlap_ratio, min_area_px);
  return out;
}

std::string AnnotationSet::to_json_text() const {
  json objs = json::array();
  for (const auto& o : objects) {
    objs.push_back(json{{"class_id", o.class_id},
                        {"bbox", box_to_json(o.box)},
                        {"full_bbox", box_to_json(o.full_box)},
                        {"center_u", o.center_u},
                        {"placement_instance", o.placement_instance},
                        {"attachment_index", o.attachment_index},
                        {"clipped", o.clipped}});
  }
  json j{{"scene_id", scene_id},
         {"image_size", {width, height}},
         {"objects", objs}};
  return j.dump(2);
}

AnnotationSet AnnotationSet::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("annotation set: ") + e.what());
  }
  try {
    AnnotationSet s;
    s.scene_id = j.at("scene_id").get<int>();
    s.width = j.at("image_size").at(0).get<int>();
    s.height = j.at("image_size").at(1).get<int>();
    for (const auto& oj : j.at("objects")) {
      GroundTruthObject o;
      o.class_id = oj.at("class_id").get<int>();
      o.box = box_from_json(oj.at("bbox"));
      o.full_box = box_from_json(oj.at("full_bbox"));
      o.center_u = oj.at("center_u").get<double>();
      o.placement_instance = oj.at("placement_instance").get<int>();
      o.attachment_index = oj.at("attachment_index").get<int>();
      o.clipped = oj.at("clipped").get<bool>();
      s.objects.push_back(o);
    }
    return s;
  } catch (const json::exception& e) {
    throw ParseError(std::string("annotation set: ") + e.what());
  }
}

}  // namespace termstrip
