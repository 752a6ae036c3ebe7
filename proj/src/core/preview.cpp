#include "preview.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>

#include "errors.hpp"
#include "geometry.hpp"
#include "layout.hpp"

namespace termstrip {
namespace {

struct DrawItem {
  Box2D box;
  double depth = 0.0;  // camera-space z of the world box center
  std::array<double, 3> rgb{0.5, 0.5, 0.5};
  int order = 0;
};

std::array<double, 3> named_color(const std::string& name) {
  if (name == "red") return {0.72, 0.08, 0.08};
  if (name == "blue") return {0.10, 0.22, 0.65};
  if (name == "yellow") return {0.92, 0.80, 0.10};
  if (name == "green") return {0.05, 0.45, 0.18};
  if (name == "black") return {0.08, 0.08, 0.09};
  if (name == "white") return {0.92, 0.92, 0.92};
  return {0.55, 0.56, 0.58};
}

void push_item(std::vector<DrawItem>& items, const Box3D& world,
               const std::array<double, 3>& rgb, const CameraFrame& frame,
               const Intrinsics& intr) {
  auto projected = project_box(world, frame, intr);
  if (!projected) return;
  const Vec3 center{(world.lo.x + world.hi.x) * 0.5,
                    (world.lo.y + world.hi.y) * 0.5,
                    (world.lo.z + world.hi.z) * 0.5};
  DrawItem item;
  item.box = *projected;
  item.depth = frame.world_to_camera(center).z;
  item.rgb = rgb;
  item.order = static_cast<int>(items.size());
  items.push_back(item);
}

void fill_rect(Image& img, const Box2D& box, const std::array<double, 3>& rgb) {
  const int x0 = std::max(0, static_cast<int>(std::ceil(box.x - 0.5)));
  const int x1 = std::min(img.width - 1,
                          static_cast<int>(std::floor(box.x2() - 0.5)));
  const int y0 = std::max(0, static_cast<int>(std::ceil(box.y - 0.5)));
  const int y1 = std::min(img.height - 1,
                          static_cast<int>(std::floor(box.y2() - 0.5)));
  std::array<std::uint8_t, 3> px;
  for (int c = 0; c < 3; ++c) {
    const double v = std::clamp(rgb[static_cast<std::size_t>(c)], 0.0, 1.0);
    px[static_cast<std::size_t>(c)] =
        static_cast<std::uint8_t>(std::lround(v * 255.0));
  }
  for (int y = y0; y <= y1; ++y) {
    std::uint8_t* row = img.at(x0, y);
    for (int x = x0; x <= x1; ++x) {
      row[0] = px[0];
      row[1] = px[1];
      row[2] = px[2];
      row += 3;
    }
  }
}

}  // namespace

Image render_preview(const Catalog& catalog, const SceneSpec& scene) {
  if (scene.width <= 0 || scene.height <= 0)
    throw ValidationError("render_preview: non-positive image size");

  Image img;
  img.width = scene.width;
  img.height = scene.height;
  img.rgb.assign(static_cast<std::size_t>(scene.width) * scene.height * 3, 0);

  // Background: a vertical gradient whose tone tracks the environment pick,
  // so different lighting draws stay visually distinguishable.
  const double tone =
      0.30 + 0.40 * (((scene.lighting.hdri_id * 37 + scene.lighting.rotation_deg) % 97) / 96.0);
  for (int y = 0; y < img.height; ++y) {
    const double fy = img.height > 1 ? static_cast<double>(y) / (img.height - 1) : 0.0;
    const double v = tone * (1.0 - 0.35 * fy);
    const auto byte = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    std::uint8_t* row = img.at(0, y);
    for (int x = 0; x < img.width; ++x) {
      row[0] = byte;
      row[1] = byte;
      row[2] = static_cast<std::uint8_t>(std::min(255, byte + 6));
      row += 3;
    }
  }

  const CameraFrame frame = camera_frame(scene.camera);
  const Intrinsics& intr = scene.camera.intrinsics;
  std::vector<DrawItem> items;

  const auto& rails = catalog.parts_of_kind(PartKind::din_rail);
  if (!rails.empty() && !scene.strip.placements.empty()) {
    const PartSpec& rail = *rails.front();
    Box3D box;
    box.lo = {0.0, kRailBottomYMm, -rail.depth_mm};
    box.hi = {scene.strip.total_length_mm, kRailBottomYMm + rail.height_mm, 0.0};
    push_item(items, box, {0.62, 0.63, 0.65}, frame, intr);
  }

  for (const PlacedPart& placement : scene.strip.placements) {
    const PartSpec& part = catalog.part(placement.part_id);
    const std::array<double, 3> body{placement.material.rgb[0],
                                     placement.material.rgb[1],
                                     placement.material.rgb[2]};
    push_item(items, part_world_box(part, placement), body, frame, intr);
    for (const Attachment& att : placement.attachments) {
      switch (att.kind) {
        case Attachment::Kind::marking:
          push_item(items, marking_world_box(catalog, placement, att),
                    {0.93, 0.93, 0.90}, frame, intr);
          break;
        case Attachment::Kind::bridge:
          push_item(items, bridge_world_box(catalog, scene.strip, att),
                    named_color(att.color), frame, intr);
          break;
        case Attachment::Kind::adapter:
          push_item(items, adapter_world_box(catalog, placement, att),
                    named_color(att.color), frame, intr);
          break;
      }
    }
  }

  // Painter's algorithm: far to near, insertion order breaking depth ties.
  std::sort(items.begin(), items.end(), [](const DrawItem& a, const DrawItem& b) {
    if (a.depth != b.depth) return a.depth > b.depth;
    return a.order < b.order;
  });
  for (const DrawItem& item : items) fill_rect(img, item.box, item.rgb);
  return img;
}

}  // namespace termstrip
