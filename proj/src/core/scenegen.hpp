#pragma once

#include <cstdint>
#include <string>

#include "catalog.hpp"
#include "geometry.hpp"
#include "layout.hpp"
#include "rng.hpp"
#include "stripgen.hpp"

namespace termstrip {

struct SceneConfig {
  int image_width = 1024;
  int image_height = 512;
  double hfov_deg = 40.0;
  double fill_fraction = 0.8;      // strip span as a fraction of image width
  double sigma_pos_frac = 0.03;    // position noise per axis, x reference distance
  double sigma_rot_deg = 2.0;      // orientation noise per camera axis
  double background_margin = 4.0;  // ellipsoid radii, x strip bounding radius
  int hdri_count = 46;

  void validate() const;
  std::string to_json_text() const;
  static SceneConfig from_json_text(const std::string& text);
};

struct CameraPose {
  Vec3 position;
  Vec3 look_at;
  Vec3 up{0.0, 1.0, 0.0};
  // Applied noise angles per camera axis (x pitch, y yaw, z roll), degrees.
  Vec3 rotation_noise_deg{0.0, 0.0, 0.0};
  Intrinsics intrinsics;
};

// Effective camera frame: look-at orientation, then the recorded noise
// rotations about the camera's own axes in the order yaw, pitch, roll.
CameraFrame camera_frame(const CameraPose& pose);

struct LightingEnv {
  int hdri_id = 0;
  int rotation_deg = 0;
};

struct BackgroundSpec {
  Vec3 radii_mm;
  Vec3 plane_point;  // a point on the mounting plane (ellipsoid flat side)
  Vec3 plane_normal{0.0, 0.0, 1.0};
  bool shadow_catcher = true;
  int hdri_id = 0;      // same environment as the lighting
  int rotation_deg = 0;
};

struct SceneSpec {
  StripConfig strip;
  CameraPose camera;
  LightingEnv lighting;
  BackgroundSpec background;
  int width = 1024;
  int height = 512;
  int scene_id = 0;
  std::uint64_t seed = 0;
  SceneConfig config;

  std::string to_json_text() const;
  static SceneSpec from_json_text(const std::string& text);
};

// Centered front view at the distance where the strip spans fill_fraction of
// the image width.
CameraPose reference_camera(const Catalog& catalog, const StripConfig& strip,
                            const SceneConfig& cfg);

// Adds per-axis Gaussian noise to position and orientation. Consumes exactly
// six normal draws: position x,y,z then rotation x,y,z.
CameraPose sample_camera(const CameraPose& ref, double sigma_pos_mm,
                         double sigma_rot_deg, CounterRng& rng);

LightingEnv sample_lighting(int hdri_count, CounterRng& rng);

SceneSpec build_scene(const Catalog& catalog, const StripConfig& strip,
                      const CameraPose& camera, const LightingEnv& lighting,
                      const SceneConfig& cfg);

// Full per-scene pipeline: strip, camera, and lighting from streams derived
// from (master_seed, scene_index). gen_params.seed is overwritten.
SceneSpec make_scene(const Catalog& catalog, const GenerationParams& gen_params,
                     const SceneConfig& cfg, std::uint64_t master_seed,
                     int scene_index);

}  // namespace termstrip
