#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

namespace termstrip {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const {
    const double n = norm();
    return n > 0.0 ? Vec3{x / n, y / n, z / n} : Vec3{};
  }
};

// Column-major 3x3 rotation matrix; columns are the rotated basis vectors.
struct Mat3 {
  std::array<Vec3, 3> col{};  // col[0]=X, col[1]=Y, col[2]=Z

  static Mat3 identity() {
    return {{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}}};
  }
  Vec3 apply(const Vec3& v) const {
    return col[0] * v.x + col[1] * v.y + col[2] * v.z;
  }
  // R^T v (inverse rotation).
  Vec3 apply_transposed(const Vec3& v) const {
    return {col[0].dot(v), col[1].dot(v), col[2].dot(v)};
  }
  Mat3 operator*(const Mat3& o) const {
    return {{apply(o.col[0]), apply(o.col[1]), apply(o.col[2])}};
  }
  static Mat3 rotation_x(double rad);
  static Mat3 rotation_y(double rad);
  static Mat3 rotation_z(double rad);
};

// Axis-aligned 2D box, pixels, top-left origin. w or h of zero means empty.
struct Box2D {
  double x = 0.0, y = 0.0, w = 0.0, h = 0.0;

  double x2() const { return x + w; }
  double y2() const { return y + h; }
  double area() const { return w * h; }
  bool empty() const { return w <= 0.0 || h <= 0.0; }
};

double box_iou(const Box2D& a, const Box2D& b);

// Axis-aligned 3D box, millimeters.
struct Box3D {
  Vec3 lo, hi;
  std::array<Vec3, 8> corners() const;
};

struct Intrinsics {
  double focal_px = 0.0;
  double cx = 0.0, cy = 0.0;
  int width = 0, height = 0;
};

// Pinhole intrinsics for a horizontal field of view at a given image size.
Intrinsics intrinsics_from_fov(double hfov_deg, int width, int height);

// Camera frame in OpenCV convention: x right, y down, z forward (viewing
// direction); pixel = (f*xc/zc + cx, f*yc/zc + cy).
struct CameraFrame {
  Vec3 position;
  Mat3 rotation;  // camera-to-world; columns are the camera axes in world coords

  Vec3 world_to_camera(const Vec3& p) const {
    return rotation.apply_transposed(p - position);
  }
};

// Camera-to-world rotation looking from `position` at `target` with the given
// world up vector.
Mat3 look_at_rotation(const Vec3& position, const Vec3& target, const Vec3& up);

// Projects the 3D box through the pinhole model and returns the 2D AABB of
// the projection clipped to image bounds, or nullopt when nothing lies in
// front of the near plane. Box edges crossing the near plane are clipped at
// z = near before projecting.
std::optional<Box2D> project_box(const Box3D& box, const CameraFrame& cam,
                                 const Intrinsics& intr, double near_mm = 1.0);

constexpr double kPi = 3.14159265358979323846;
constexpr double deg_to_rad(double d) { return d * kPi / 180.0; }

}  // namespace termstrip
