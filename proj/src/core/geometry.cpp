#include "core/geometry.hpp"

#include <algorithm>
#include <limits>

namespace termstrip {

Mat3 Mat3::rotation_x(double rad) {
  const double c = std::cos(rad), s = std::sin(rad);
  return {{Vec3{1, 0, 0}, Vec3{0, c, s}, Vec3{0, -s, c}}};
}

Mat3 Mat3::rotation_y(double rad) {
  const double c = std::cos(rad), s = std::sin(rad);
  return {{Vec3{c, 0, -s}, Vec3{0, 1, 0}, Vec3{s, 0, c}}};
}

Mat3 Mat3::rotation_z(double rad) {
  const double c = std::cos(rad), s = std::sin(rad);
  return {{Vec3{c, s, 0}, Vec3{-s, c, 0}, Vec3{0, 0, 1}}};
}

double box_iou(const Box2D& a, const Box2D& b) {
  const double ix = std::max(0.0, std::min(a.x2(), b.x2()) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y2(), b.y2()) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

std::array<Vec3, 8> Box3D::corners() const {
  return {Vec3{lo.x, lo.y, lo.z}, Vec3{hi.x, lo.y, lo.z},
          Vec3{lo.x, hi.y, lo.z}, Vec3{hi.x, hi.y, lo.z},
          Vec3{lo.x, lo.y, hi.z}, Vec3{hi.x, lo.y, hi.z},
          Vec3{lo.x, hi.y, hi.z}, Vec3{hi.x, hi.y, hi.z}};
}

Intrinsics intrinsics_from_fov(double hfov_deg, int width, int height) {
  Intrinsics intr;
  intr.width = width;
  intr.height = height;
  intr.focal_px = (width / 2.0) / std::tan(deg_to_rad(hfov_deg) / 2.0);
  intr.cx = width / 2.0;
  intr.cy = height / 2.0;
  return intr;
}

Mat3 look_at_rotation(const Vec3& position, const Vec3& target, const Vec3& up) {
  const Vec3 forward = (target - position).normalized();
  Vec3 right = forward.cross(up).normalized();
  if (right.norm() < 1e-12) {
    // Degenerate up vector; fall back to an arbitrary perpendicular.
    right = forward.cross(Vec3{1, 0, 0}).normalized();
    if (right.norm() < 1e-12) right = forward.cross(Vec3{0, 1, 0}).normalized();
  }
  const Vec3 down = forward.cross(right);  // y axis points down in image space
  return {{right, down, forward}};
}

namespace {

// 12 edges of a box as corner index pairs (corners() ordering).
constexpr int kEdges[12][2] = {{0, 1}, {2, 3}, {4, 5}, {6, 7}, {0, 2}, {1, 3},
                               {4, 6}, {5, 7}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};

}  // namespace

std::optional<Box2D> project_box(const Box3D& box, const CameraFrame& cam,
                                 const Intrinsics& intr, double near_mm) {
  std::array<Vec3, 8> cc;
  bool any_front = false;
  bool all_front = true;
  {
    const auto ws = box.corners();
    for (int i = 0; i < 8; ++i) {
      cc[i] = cam.world_to_camera(ws[i]);
      if (cc[i].z >= near_mm) any_front = true;
      else all_front = false;
    }
  }
  if (!any_front) return std::nullopt;

  std::vector<Vec3> pts;
  pts.reserve(all_front ? 8 : 20);
  for (const auto& p : cc)
    if (p.z >= near_mm) pts.push_back(p);
  if (!all_front) {
    for (const auto& e : kEdges) {
      const Vec3& a = cc[e[0]];
      const Vec3& b = cc[e[1]];
      if ((a.z >= near_mm) == (b.z >= near_mm)) continue;
      const double t = (near_mm - a.z) / (b.z - a.z);
      pts.push_back(a + (b - a) * t);
    }
  }

  double u0 = std::numeric_limits<double>::max(), v0 = u0;
  double u1 = std::numeric_limits<double>::lowest(), v1 = u1;
  for (const auto& p : pts) {
    const double u = intr.focal_px * p.x / p.z + intr.cx;
    const double v = intr.focal_px * p.y / p.z + intr.cy;
    u0 = std::min(u0, u);
    v0 = std::min(v0, v);
    u1 = std::max(u1, u);
    v1 = std::max(v1, v);
  }

  u0 = std::clamp(u0, 0.0, static_cast<double>(intr.width));
  u1 = std::clamp(u1, 0.0, static_cast<double>(intr.width));
  v0 = std::clamp(v0, 0.0, static_cast<double>(intr.height));
  v1 = std::clamp(v1, 0.0, static_cast<double>(intr.height));
  Box2D out{u0, v0, u1 - u0, v1 - v0};
  if (out.empty()) return std::nullopt;
  return out;
}

}  // namespace termstrip
