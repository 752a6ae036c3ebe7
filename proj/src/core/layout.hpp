#pragma once

#include "catalog.hpp"
#include "geometry.hpp"
#include "stripgen.hpp"

// World-space conventions for a generated strip:
//   x: rail axis (rail_offset_mm direction), y: up, z: toward the viewer.
// Parts sit on the rail base plane z = 0 and share a common bottom y = 0;
// the rail itself lies behind at z in [-rail_depth, 0]. The mounting plane
// (wall) is the x/y plane at the rail's back.

namespace termstrip {

// Seat depth by which plugged accessories sink into their host.
inline constexpr double kPlugSeatInsetMm = 2.0;
// Marking tags sit this far below the host's top edge, stacked downwards.
inline constexpr double kMarkingTopMarginMm = 6.0;
inline constexpr double kMarkingStackGapMm = 3.0;
inline constexpr double kRailBottomYMm = 6.0;

Box3D part_world_box(const PartSpec& part, const PlacedPart& placement);

Box3D bridge_world_box(const Catalog& catalog, const StripConfig& strip,
                       const Attachment& bridge);
Box3D adapter_world_box(const Catalog& catalog, const PlacedPart& host,
                        const Attachment& adapter);
Box3D marking_world_box(const Catalog& catalog, const PlacedPart& host,
                        const Attachment& marking);

// z of the mounting plane behind the rail (0 when the catalog has no rail).
double mounting_plane_z(const Catalog& catalog);

// Union of all part, attachment, and rail boxes; throws ValidationError for
// an empty strip.
Box3D strip_world_bounds(const Catalog& catalog, const StripConfig& strip);

}  // namespace termstrip
