#include "scenegen.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "json.hpp"

namespace termstrip {
namespace {

using nlohmann::json;

enum SceneStream : std::uint64_t {
  kStripStream = 1,
  kCameraStream = 2,
  kLightingStream = 3,
};

// The sampled camera must stay strictly in front of the mounting plane.
constexpr double kFrontClearanceMm = 1.0;

json vec3_to_json(const Vec3& v) { return json{v.x, v.y, v.z}; }

Vec3 vec3_from_json(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

json camera_to_json(const CameraPose& c) {
  return json{{"position", vec3_to_json(c.position)},
              {"look_at", vec3_to_json(c.look_at)},
              {"up", vec3_to_json(c.up)},
              {"rotation_noise_deg", vec3_to_json(c.rotation_noise_deg)},
              {"intrinsics",
               json{{"focal_length_px", c.intrinsics.focal_px},
                    {"principal_point", {c.intrinsics.cx, c.intrinsics.cy}},
                    {"image_size", {c.intrinsics.width, c.intrinsics.height}}}}};
}

CameraPose camera_from_json(const json& j) {
  CameraPose c;
  c.position = vec3_from_json(j.at("position"));
  c.look_at = vec3_from_json(j.at("look_at"));
  c.up = vec3_from_json(j.at("up"));
  c.rotation_noise_deg = vec3_from_json(j.at("rotation_noise_deg"));
  const json& in = j.at("intrinsics");
  c.intrinsics.focal_px = in.at("focal_length_px").get<double>();
  c.intrinsics.cx = in.at("principal_point").at(0).get<double>();
  c.intrinsics.cy = in.at("principal_point").at(1).get<double>();
  c.intrinsics.width = in.at("image_size").at(0).get<int>();
  c.intrinsics.height = in.at("image_size").at(1).get<int>();
  return c;
}

json config_to_json(const SceneConfig& c) {
  return json{{"image_width", c.image_width},
              {"image_height", c.image_height},
              {"hfov_deg", c.hfov_deg},
              {"fill_fraction", c.fill_fraction},
              {"sigma_pos_frac", c.sigma_pos_frac},
              {"sigma_rot_deg", c.sigma_rot_deg},
              {"background_margin", c.background_margin},
              {"hdri_count", c.hdri_count}};
}

SceneConfig config_from_json(const json& j) {
  SceneConfig c;
  if (!j.is_object()) throw ParseError("scene config must be a JSON object");
  if (j.contains("image_width")) c.image_width = j.at("image_width").get<int>();
  if (j.contains("image_height")) c.image_height = j.at("image_height").get<int>();
  if (j.contains("hfov_deg")) c.hfov_deg = j.at("hfov_deg").get<double>();
  if (j.contains("fill_fraction")) c.fill_fraction = j.at("fill_fraction").get<double>();
  if (j.contains("sigma_pos_frac")) c.sigma_pos_frac = j.at("sigma_pos_frac").get<double>();
  if (j.contains("sigma_rot_deg")) c.sigma_rot_deg = j.at("sigma_rot_deg").get<double>();
  if (j.contains("background_margin"))
    c.background_margin = j.at("background_margin").get<double>();
  if (j.contains("hdri_count")) c.hdri_count = j.at("hdri_count").get<int>();
  c.validate();
  return c;
}

}  // namespace

void SceneConfig::validate() const {
  if (image_width <= 0 || image_height <= 0)
    throw ValidationError("image size must be positive");
  if (!(hfov_deg > 0.0 && hfov_deg < 180.0))
    throw ValidationError("hfov_deg must be in (0,180)");
  if (!(fill_fraction > 0.0 && fill_fraction <= 1.0))
    throw ValidationError("fill_fraction must be in (0,1]");
  if (sigma_pos_frac < 0.0 || sigma_rot_deg < 0.0)
    throw ValidationError("noise sigmas must be >= 0");
  if (!(background_margin > 1.0))
    throw ValidationError("background_margin must be > 1");
  if (hdri_count < 1) throw ValidationError("hdri_count must be >= 1");
}

std::string SceneConfig::to_json_text() const { return config_to_json(*this).dump(2); }

SceneConfig SceneConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("scene config: ") + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const json::exception& e) {
    throw ParseError(std::string("scene config: ") + e.what());
  }
}

CameraFrame camera_frame(const CameraPose& pose) {
  const Mat3 base = look_at_rotation(pose.position, pose.look_at, pose.up);
  const Mat3 noise = Mat3::rotation_y(deg_to_rad(pose.rotation_noise_deg.y)) *
                     Mat3::rotation_x(deg_to_rad(pose.rotation_noise_deg.x)) *
                     Mat3::rotation_z(deg_to_rad(pose.rotation_noise_deg.z));
  return {pose.position, base * noise};
}

CameraPose reference_camera(const Catalog& catalog, const StripConfig& strip,
                            const SceneConfig& cfg) {
  cfg.validate();
  if (strip.placements.empty() || strip.total_length_mm <= 0.0)
    throw ValidationError("cannot frame an empty strip");

  const Box3D bounds = strip_world_bounds(catalog, strip);
  const Vec3 center{(bounds.lo.x + bounds.hi.x) / 2.0,
                    (bounds.lo.y + bounds.hi.y) / 2.0,
                    (bounds.lo.z + bounds.hi.z) / 2.0};

  CameraPose pose;
  pose.intrinsics = intrinsics_from_fov(cfg.hfov_deg, cfg.image_width, cfg.image_height);
  const double distance = pose.intrinsics.focal_px * strip.total_length_mm /
                          (cfg.fill_fraction * cfg.image_width);
  pose.position = {center.x, center.y, center.z + distance};
  pose.look_at = center;
  return pose;
}

CameraPose sample_camera(const CameraPose& ref, double sigma_pos_mm,
                         double sigma_rot_deg, CounterRng& rng) {
  CameraPose out = ref;
  out.position.x = rng.normal(ref.position.x, sigma_pos_mm);
  out.position.y = rng.normal(ref.position.y, sigma_pos_mm);
  out.position.z = rng.normal(ref.position.z, sigma_pos_mm);
  out.rotation_noise_deg.x = rng.normal(0.0, sigma_rot_deg);
  out.rotation_noise_deg.y = rng.normal(0.0, sigma_rot_deg);
  out.rotation_noise_deg.z = rng.normal(0.0, sigma_rot_deg);
  return out;
}

LightingEnv sample_lighting(int hdri_count, CounterRng& rng) {
  if (hdri_count < 1) throw ValidationError("hdri_count must be >= 1");
  LightingEnv env;
  env.hdri_id = static_cast<int>(rng.uniform_int(hdri_count));
  env.rotation_deg = static_cast<int>(rng.uniform_int(360));
  return env;
}

SceneSpec build_scene(const Catalog& catalog, const StripConfig& strip,
                      const CameraPose& camera, const LightingEnv& lighting,
                      const SceneConfig& cfg) {
  cfg.validate();
  const Box3D bounds = strip_world_bounds(catalog, strip);
  const Vec3 half{(bounds.hi.x - bounds.lo.x) / 2.0,
                  (bounds.hi.y - bounds.lo.y) / 2.0,
                  (bounds.hi.z - bounds.lo.z) / 2.0};
  const double radius = half.norm();

  SceneSpec scene;
  scene.strip = strip;
  scene.camera = camera;
  scene.lighting = lighting;
  scene.width = cfg.image_width;
  scene.height = cfg.image_height;
  scene.config = cfg;
  scene.background.radii_mm = {cfg.background_margin * radius,
                               cfg.background_margin * radius,
                               cfg.background_margin * radius};
  scene.background.plane_point = {(bounds.lo.x + bounds.hi.x) / 2.0,
                                  (bounds.lo.y + bounds.hi.y) / 2.0,
                                  mounting_plane_z(catalog)};
  scene.background.plane_normal = {0.0, 0.0, 1.0};
  scene.background.shadow_catcher = true;
  scene.background.hdri_id = lighting.hdri_id;
  scene.background.rotation_deg = lighting.rotation_deg;
  return scene;
}

SceneSpec make_scene(const Catalog& catalog, const GenerationParams& gen_params,
                     const SceneConfig& cfg, std::uint64_t master_seed,
                     int scene_index) {
  cfg.validate();
  const std::uint64_t scene_seed =
      derive_stream(master_seed, static_cast<std::uint64_t>(scene_index));

  GenerationParams params = gen_params;
  params.seed = derive_stream(scene_seed, kStripStream);
  const StripConfig strip = generate_strip(catalog, params);

  const CameraPose ref = reference_camera(catalog, strip, cfg);
  const double distance = (ref.position - ref.look_at).norm();
  CounterRng camera_rng(derive_stream(scene_seed, kCameraStream));
  CameraPose camera = sample_camera(ref, cfg.sigma_pos_frac * distance,
                                    cfg.sigma_rot_deg, camera_rng);
  const double z_floor = mounting_plane_z(catalog) + kFrontClearanceMm;
  camera.position.z = std::max(camera.position.z, z_floor);

  CounterRng lighting_rng(derive_stream(scene_seed, kLightingStream));
  const LightingEnv lighting = sample_lighting(cfg.hdri_count, lighting_rng);

  SceneSpec scene = build_scene(catalog, strip, camera, lighting, cfg);
  scene.scene_id = scene_index;
  scene.seed = scene_seed;
  return scene;
}

std::string SceneSpec::to_json_text() const {
  json j{{"strip", json::parse(strip.to_json_text())},
         {"camera", camera_to_json(camera)},
         {"lighting", json{{"hdri_id", lighting.hdri_id},
                           {"rotation_deg", lighting.rotation_deg}}},
         {"background",
          json{{"radii_mm", vec3_to_json(background.radii_mm)},
               {"plane_point", vec3_to_json(background.plane_point)},
               {"plane_normal", vec3_to_json(background.plane_normal)},
               {"shadow_catcher", background.shadow_catcher},
               {"hdri_id", background.hdri_id},
               {"rotation_deg", background.rotation_deg}}},
         {"resolution", {width, height}},
         {"scene_id", scene_id},
         {"seed", seed},
         {"config", config_to_json(config)},
         {"schema_version", 1}};
  return j.dump(2);
}

SceneSpec SceneSpec::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("scene spec: ") + e.what());
  }
  try {
    SceneSpec s;
    s.strip = StripConfig::from_json_text(j.at("strip").dump());
    s.camera = camera_from_json(j.at("camera"));
    s.lighting.hdri_id = j.at("lighting").at("hdri_id").get<int>();
    s.lighting.rotation_deg = j.at("lighting").at("rotation_deg").get<int>();
    const json& bg = j.at("background");
    s.background.radii_mm = vec3_from_json(bg.at("radii_mm"));
    s.background.plane_point = vec3_from_json(bg.at("plane_point"));
    s.background.plane_normal = vec3_from_json(bg.at("plane_normal"));
    s.background.shadow_catcher = bg.at("shadow_catcher").get<bool>();
    s.background.hdri_id = bg.at("hdri_id").get<int>();
    s.background.rotation_deg = bg.at("rotation_deg").get<int>();
    s.width = j.at("resolution").at(0).get<int>();
    s.height = j.at("resolution").at(1).get<int>();
    s.scene_id = j.at("scene_id").get<int>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.config = config_from_json(j.at("config"));
    return s;
  } catch (const json::exception& e) {
    throw ParseError(std::string("scene spec: ") + e.what());
  }
}

}  // namespace termstrip
