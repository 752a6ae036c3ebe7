#include "layout.hpp"

#include <algorithm>

#include "errors.hpp"

namespace termstrip {
namespace {

const ShaftSpec* shaft_at(const PartSpec& part, int index) {
  for (const auto& s : part.shafts)
    if (s.shaft_index == index) return &s;
  return nullptr;
}

void extend(Box3D& box, const Box3D& other) {
  box.lo.x = std::min(box.lo.x, other.lo.x);
  box.lo.y = std::min(box.lo.y, other.lo.y);
  box.lo.z = std::min(box.lo.z, other.lo.z);
  box.hi.x = std::max(box.hi.x, other.hi.x);
  box.hi.y = std::max(box.hi.y, other.hi.y);
  box.hi.z = std::max(box.hi.z, other.hi.z);
}

}  // namespace

Box3D part_world_box(const PartSpec& part, const PlacedPart& placement) {
  return {{placement.rail_offset_mm, 0.0, 0.0},
          {placement.rail_offset_mm + part.width_mm, part.height_mm, part.depth_mm}};
}

Box3D bridge_world_box(const Catalog& catalog, const StripConfig& strip,
                       const Attachment& bridge) {
  const auto& units = catalog.parts_of_kind(PartKind::plug_in_bridge);
  if (units.empty())
    throw ValidationError("strip has a bridge but the catalog has no bridge part");
  const PartSpec& unit = *units.front();
  const auto& first = strip.placements.at(bridge.first_instance);
  const auto& last = strip.placements.at(bridge.last_instance);
  const PartSpec& first_part = catalog.part(first.part_id);
  const PartSpec& last_part = catalog.part(last.part_id);
  const ShaftSpec* sa = shaft_at(first_part, bridge.level);
  const ShaftSpec* sb = shaft_at(last_part, bridge.level);
  if (!sa || !sb)
    throw ValidationError("bridge references a shaft level its host lacks");

  double y_lo = sa->position_y_mm, y_hi = sa->position_y_mm;
  double front = 0.0;
  for (int i = bridge.first_instance; i <= bridge.last_instance; ++i) {
    const auto& host = strip.placements.at(i);
    const PartSpec& part = catalog.part(host.part_id);
    front = std::max(front, part.depth_mm);
    if (const ShaftSpec* s = shaft_at(part, bridge.level)) {
      y_lo = std::min(y_lo, s->position_y_mm);
      y_hi = std::max(y_hi, s->position_y_mm);
    }
  }
  const double x0 = first.rail_offset_mm + sa->position_x_mm - unit.width_mm / 2.0;
  const double x1 = last.rail_offset_mm + sb->position_x_mm + unit.width_mm / 2.0;
  const double z0 = front - kPlugSeatInsetMm;
  return {{x0, y_lo - unit.height_mm / 2.0, z0},
          {x1, y_hi + unit.height_mm / 2.0, z0 + unit.depth_mm}};
}

Box3D adapter_world_box(const Catalog& catalog, const PlacedPart& host,
                        const Attachment& adapter) {
  const auto& kinds = catalog.parts_of_kind(PartKind::test_adapter);
  if (kinds.empty())
    throw ValidationError("strip has an adapter but the catalog has no adapter part");
  const PartSpec& spec = *kinds.front();
  const PartSpec& part = catalog.part(host.part_id);
  const ShaftSpec* shaft = shaft_at(part, adapter.shaft_index);
  if (!shaft) throw ValidationError("adapter references a missing shaft");
  const double cx = host.rail_offset_mm + shaft->position_x_mm;
  const double z0 = part.depth_mm - kPlugSeatInsetMm;
  return {{cx - spec.width_mm / 2.0, shaft->position_y_mm - spec.height_mm / 2.0, z0},
          {cx + spec.width_mm / 2.0, shaft->position_y_mm + spec.height_mm / 2.0,
           z0 + spec.depth_mm}};
}

Box3D marking_world_box(const Catalog& catalog, const PlacedPart& host,
                        const Attachment& marking) {
  const PartSpec& tag = catalog.part(marking.part_id);
  const PartSpec& part = catalog.part(host.part_id);
  const double cx = host.rail_offset_mm + part.width_mm / 2.0;
  const double step = (tag.height_mm + kMarkingStackGapMm) * marking.point_index;
  const double y_top = part.height_mm - kMarkingTopMarginMm - step;
  return {{cx - tag.width_mm / 2.0, y_top - tag.height_mm, part.depth_mm},
          {cx + tag.width_mm / 2.0, y_top, part.depth_mm + tag.depth_mm}};
}

double mounting_plane_z(const Catalog& catalog) {
  const auto& rails = catalog.parts_of_kind(PartKind::din_rail);
  return rails.empty() ? 0.0 : -rails.front()->depth_mm;
}

Box3D strip_world_bounds(const Catalog& catalog, const StripConfig& strip) {
  if (strip.placements.empty())
    throw ValidationError("strip has no placements");

  Box3D bounds = part_world_box(catalog.part(strip.placements[0].part_id),
                                strip.placements[0]);
  for (const auto& pp : strip.placements) {
    extend(bounds, part_world_box(catalog.part(pp.part_id), pp));
    for (const auto& a : pp.attachments) {
      switch (a.kind) {
        case Attachment::Kind::bridge:
          extend(bounds, bridge_world_box(catalog, strip, a));
          break;
        case Attachment::Kind::adapter:
          extend(bounds, adapter_world_box(catalog, pp, a));
          break;
        case Attachment::Kind::marking:
          extend(bounds, marking_world_box(catalog, pp, a));
          break;
      }
    }
  }
  const auto& rails = catalog.parts_of_kind(PartKind::din_rail);
  if (!rails.empty()) {
    const PartSpec& rail = *rails.front();
    extend(bounds, {{0.0, kRailBottomYMm, -rail.depth_mm},
                    {strip.total_length_mm, kRailBottomYMm + rail.height_mm, 0.0}});
  }
  return bounds;
}

}  // namespace termstrip
