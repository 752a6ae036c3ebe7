#include <doctest.h>

#include <cmath>

#include "core/catalog.hpp"
#include "core/errors.hpp"
#include "core/layout.hpp"
#include "core/rng.hpp"
#include "core/scenegen.hpp"
#include "core/stripgen.hpp"
#include "helpers.hpp"

using termstrip::Box3D;
using termstrip::CameraFrame;
using termstrip::CameraPose;
using termstrip::Catalog;
using termstrip::CounterRng;
using termstrip::GenerationParams;
using termstrip::Mat3;
using termstrip::PartKind;
using termstrip::PlacedPart;
using termstrip::SceneConfig;
using termstrip::SceneSpec;
using termstrip::StripConfig;
using termstrip::Vec3;

namespace {

StripConfig tiny_strip(const Catalog& cat, int blocks = 1) {
  const auto* part = cat.parts_of_kind(PartKind::terminal_block).front();
  StripConfig strip;
  double offset = 0.0;
  for (int i = 0; i < blocks; ++i) {
    PlacedPart pp;
    pp.part_id = part->part_id;
    pp.kind = PartKind::terminal_block;
    pp.instance_index = i;
    pp.group_index = 0;
    pp.rail_offset_mm = offset;
    pp.material = cat.materials().front();
    offset += part->width_mm;
    strip.placements.push_back(pp);
  }
  strip.total_length_mm = offset;
  return strip;
}

bool vec_close(const Vec3& a, const Vec3& b, double tol = 1e-12) {
  return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol &&
         std::abs(a.z - b.z) <= tol;
}

}  // namespace

TEST_SUITE("scenegen") {
  TEST_CASE("part, marking, bridge, and adapter world boxes") {
    const Catalog& cat = testhelp::reference_catalog();
    const auto* part = cat.parts_of_kind(PartKind::terminal_block).front();

    PlacedPart pp;
    pp.part_id = part->part_id;
    pp.rail_offset_mm = 10.0;
    const Box3D box = part_world_box(*part, pp);
    CHECK(box.lo.x == doctest::Approx(10.0));
    CHECK(box.lo.y == 0.0);
    CHECK(box.lo.z == 0.0);
    CHECK(box.hi.x == doctest::Approx(10.0 + part->width_mm));
    CHECK(box.hi.y == doctest::Approx(part->height_mm));
    CHECK(box.hi.z == doctest::Approx(part->depth_mm));

    termstrip::Attachment marking;
    marking.kind = termstrip::Attachment::Kind::marking;
    marking.part_id = cat.parts_of_kind(PartKind::marking).front()->part_id;
    const auto& tag = cat.part(marking.part_id);
    for (int point : {0, 1}) {
      marking.point_index = point;
      const Box3D mb = marking_world_box(cat, pp, marking);
      const double y_top = part->height_mm - termstrip::kMarkingTopMarginMm -
                           point * (tag.height_mm + termstrip::kMarkingStackGapMm);
      CHECK(mb.hi.y == doctest::Approx(y_top));
      CHECK(mb.lo.y == doctest::Approx(y_top - tag.height_mm));
      CHECK(mb.lo.z == doctest::Approx(part->depth_mm));  // on the front face
      CHECK(mb.hi.x - mb.lo.x == doctest::Approx(tag.width_mm));
    }

    termstrip::Attachment adapter;
    adapter.kind = termstrip::Attachment::Kind::adapter;
    adapter.shaft_index = part->shafts.front().shaft_index;
    const auto& adapter_part = *cat.parts_of_kind(PartKind::test_adapter).front();
    const Box3D ab = adapter_world_box(cat, pp, adapter);
    CHECK(ab.lo.z ==
          doctest::Approx(part->depth_mm - termstrip::kPlugSeatInsetMm));
    CHECK(ab.hi.z == doctest::Approx(part->depth_mm - termstrip::kPlugSeatInsetMm +
                                     adapter_part.depth_mm));
    const double cx = pp.rail_offset_mm + part->shafts.front().position_x_mm;
    CHECK((ab.lo.x + ab.hi.x) / 2.0 == doctest::Approx(cx));

    StripConfig strip = tiny_strip(cat, 3);
    termstrip::Attachment bridge;
    bridge.kind = termstrip::Attachment::Kind::bridge;
    bridge.level = part->shafts.front().shaft_index;
    bridge.first_instance = 0;
    bridge.last_instance = 2;
    const auto& bridge_part = *cat.parts_of_kind(PartKind::plug_in_bridge).front();
    const Box3D bb = bridge_world_box(cat, strip, bridge);
    const double sx = part->shafts.front().position_x_mm;
    CHECK(bb.lo.x == doctest::Approx(sx - bridge_part.width_mm / 2.0));
    CHECK(bb.hi.x == doctest::Approx(strip.placements[2].rail_offset_mm + sx +
                                     bridge_part.width_mm / 2.0));
    CHECK(bb.lo.z == doctest::Approx(part->depth_mm - termstrip::kPlugSeatInsetMm));
  }

  TEST_CASE("mounting plane and strip bounds") {
    const Catalog& cat = testhelp::reference_catalog();
    CHECK(mounting_plane_z(cat) == doctest::Approx(-7.5));

    const StripConfig strip = tiny_strip(cat, 2);
    const Box3D bounds = strip_world_bounds(cat, strip);
    CHECK(bounds.lo.z == doctest::Approx(-7.5));  // rail back face
    CHECK(bounds.lo.x == doctest::Approx(0.0));
    CHECK(bounds.hi.x == doctest::Approx(strip.total_length_mm));
    CHECK(bounds.lo.y == doctest::Approx(0.0));

    CHECK_THROWS_AS(strip_world_bounds(cat, StripConfig{}),
                    termstrip::ValidationError);
  }

  TEST_CASE("reference camera frames the strip at the fill fraction") {
    const Catalog& cat = testhelp::reference_catalog();
    const StripConfig strip = generate_strip(cat, GenerationParams{});
    const SceneConfig cfg;
    const CameraPose pose = reference_camera(cat, strip, cfg);

    CHECK(pose.intrinsics.width == 1024);
    CHECK(pose.intrinsics.height == 512);
    CHECK(pose.intrinsics.cx == doctest::Approx(512.0));
    CHECK(pose.intrinsics.cy == doctest::Approx(256.0));
    CHECK(pose.intrinsics.focal_px ==
          doctest::Approx(512.0 / std::tan(termstrip::deg_to_rad(20.0))));

    // At the look-at plane, the strip's length maps to exactly the fill
    // fraction of the image width.
    const double distance = (pose.position - pose.look_at).norm();
    const double span_px = pose.intrinsics.focal_px * strip.total_length_mm / distance;
    CHECK(span_px == doctest::Approx(0.8 * 1024.0).epsilon(1e-12));

    const Box3D bounds = strip_world_bounds(cat, strip);
    CHECK(pose.look_at.x == doctest::Approx((bounds.lo.x + bounds.hi.x) / 2.0));
    CHECK(pose.position.x == doctest::Approx(pose.look_at.x));
    CHECK(pose.position.y == doctest::Approx(pose.look_at.y));
    CHECK(pose.position.z > bounds.hi.z);

    CHECK_THROWS_AS(reference_camera(cat, StripConfig{}, cfg),
                    termstrip::ValidationError);
  }

  TEST_CASE("camera frame axes for a straight-on view") {
    CameraPose pose;
    pose.position = {0.0, 0.0, 100.0};
    pose.look_at = {0.0, 0.0, 0.0};
    const CameraFrame frame = camera_frame(pose);
    CHECK(vec_close(frame.rotation.col[0], {1.0, 0.0, 0.0}));   // right
    CHECK(vec_close(frame.rotation.col[1], {0.0, -1.0, 0.0}));  // image y is down
    CHECK(vec_close(frame.rotation.col[2], {0.0, 0.0, -1.0}));  // forward

    const Vec3 up_point = frame.world_to_camera({0.0, 10.0, 0.0});
    CHECK(up_point.y == doctest::Approx(-10.0));  // above center -> smaller v
    CHECK(up_point.z == doctest::Approx(100.0));
  }

  TEST_CASE("noise rotations compose as yaw, pitch, roll about camera axes") {
    CameraPose pose;
    pose.position = {5.0, -3.0, 80.0};
    pose.look_at = {1.0, 2.0, 0.0};
    pose.rotation_noise_deg = {1.5, -2.0, 3.0};
    const Mat3 base =
        termstrip::look_at_rotation(pose.position, pose.look_at, pose.up);
    const Mat3 expected = base *
                          (Mat3::rotation_y(termstrip::deg_to_rad(-2.0)) *
                           Mat3::rotation_x(termstrip::deg_to_rad(1.5)) *
                           Mat3::rotation_z(termstrip::deg_to_rad(3.0)));
    const CameraFrame frame = camera_frame(pose);
    for (int c = 0; c < 3; ++c)
      CHECK(vec_close(frame.rotation.col[c], expected.col[c], 1e-12));
  }

  TEST_CASE("sample_camera consumes exactly six normal draws") {
    CameraPose ref;
    ref.position = {10.0, 20.0, 300.0};
    ref.look_at = {10.0, 20.0, 0.0};
    CounterRng rng(77);
    const CameraPose noisy = sample_camera(ref, 9.0, 2.0, rng);
    CHECK(rng.counter() == 12);  // six Box-Muller draws

    // Matches a hand replay of the same stream.
    CounterRng replay(77);
    CHECK(noisy.position.x == replay.normal(ref.position.x, 9.0));
    CHECK(noisy.position.y == replay.normal(ref.position.y, 9.0));
    CHECK(noisy.position.z == replay.normal(ref.position.z, 9.0));
    CHECK(noisy.rotation_noise_deg.x == replay.normal(0.0, 2.0));
    CHECK(noisy.rotation_noise_deg.y == replay.normal(0.0, 2.0));
    CHECK(noisy.rotation_noise_deg.z == replay.normal(0.0, 2.0));
    CHECK(noisy.look_at.x == ref.look_at.x);  // aim point unchanged

    CounterRng zero_rng(78);
    const CameraPose still = sample_camera(ref, 0.0, 0.0, zero_rng);
    CHECK(zero_rng.counter() == 12);  // draws consumed even at zero sigma
    CHECK(still.position.x == ref.position.x);
    CHECK(still.rotation_noise_deg.z == 0.0);
  }

  TEST_CASE("lighting sampler bounds") {
    CounterRng rng(3);
    for (int i = 0; i < 10000; ++i) {
      const auto env = sample_lighting(46, rng);
      CHECK(env.hdri_id >= 0);
      CHECK(env.hdri_id < 46);
      CHECK(env.rotation_deg >= 0);
      CHECK(env.rotation_deg < 360);
    }
    CHECK_THROWS_AS(sample_lighting(0, rng), termstrip::ValidationError);
  }

  TEST_CASE("build_scene fills background from strip bounds and lighting") {
    const Catalog& cat = testhelp::reference_catalog();
    const StripConfig strip = tiny_strip(cat, 4);
    const SceneConfig cfg;
    const CameraPose camera = reference_camera(cat, strip, cfg);
    const termstrip::LightingEnv lighting{17, 211};
    const SceneSpec scene = build_scene(cat, strip, camera, lighting, cfg);

    const Box3D bounds = strip_world_bounds(cat, strip);
    const Vec3 half{(bounds.hi.x - bounds.lo.x) / 2.0,
                    (bounds.hi.y - bounds.lo.y) / 2.0,
                    (bounds.hi.z - bounds.lo.z) / 2.0};
    CHECK(scene.background.radii_mm.x ==
          doctest::Approx(cfg.background_margin * half.norm()));
    CHECK(scene.background.radii_mm.y == scene.background.radii_mm.x);
    CHECK(scene.background.plane_point.z == doctest::Approx(-7.5));
    CHECK(scene.background.plane_normal.z == doctest::Approx(1.0));
    CHECK(scene.background.shadow_catcher);
    CHECK(scene.background.hdri_id == 17);
    CHECK(scene.background.rotation_deg == 211);
    CHECK(scene.width == cfg.image_width);
    CHECK(scene.height == cfg.image_height);
  }

  TEST_CASE("make_scene determinism and camera clearance") {
    const Catalog& cat = testhelp::reference_catalog();
    const GenerationParams params;
    const SceneConfig cfg;
    const SceneSpec a = make_scene(cat, params, cfg, 3141, 7);
    const SceneSpec b = make_scene(cat, params, cfg, 3141, 7);
    CHECK(a.to_json_text() == b.to_json_text());
    CHECK(a.scene_id == 7);
    const SceneSpec c = make_scene(cat, params, cfg, 3141, 8);
    CHECK(c.seed != a.seed);
    CHECK(c.strip.to_json_text() != a.strip.to_json_text());

    // Huge position noise still keeps the camera in front of the wall.
    SceneConfig wild = cfg;
    wild.sigma_pos_frac = 5.0;
    for (int i = 0; i < 50; ++i) {
      const SceneSpec s = make_scene(cat, params, wild, 99, i);
      CHECK(s.camera.position.z >= mounting_plane_z(cat) + 1.0);
    }
  }

  TEST_CASE("scene json round-trip is byte-stable") {
    const Catalog& cat = testhelp::reference_catalog();
    const SceneSpec scene = make_scene(cat, GenerationParams{}, SceneConfig{}, 5, 0);
    const std::string text = scene.to_json_text();
    CHECK(SceneSpec::from_json_text(text).to_json_text() == text);
    CHECK_THROWS_AS(SceneSpec::from_json_text("[]"), termstrip::ParseError);
  }

  TEST_CASE("scene config validation and round-trip") {
    SceneConfig cfg;
    cfg.fill_fraction = 0.0;
    CHECK_THROWS_AS(cfg.validate(), termstrip::ValidationError);
    cfg = SceneConfig{};
    cfg.hfov_deg = 180.0;
    CHECK_THROWS_AS(cfg.validate(), termstrip::ValidationError);
    cfg = SceneConfig{};
    cfg.background_margin = 1.0;
    CHECK_THROWS_AS(cfg.validate(), termstrip::ValidationError);
    cfg = SceneConfig{};
    const SceneConfig round = SceneConfig::from_json_text(cfg.to_json_text());
    CHECK(round.to_json_text() == cfg.to_json_text());
    const SceneConfig partial = SceneConfig::from_json_text(R"({"hdri_count": 12})");
    CHECK(partial.hdri_count == 12);
    CHECK(partial.image_width == 1024);
  }

  TEST_CASE("projection basics") {
    using termstrip::Box2D;
    const termstrip::Intrinsics intr = termstrip::intrinsics_from_fov(40.0, 1024, 512);
    CameraPose pose;
    pose.position = {0.0, 0.0, 500.0};
    pose.look_at = {0.0, 0.0, 0.0};
    const CameraFrame frame = camera_frame(pose);

    const Box3D plate{{-50.0, -20.0, 0.0}, {50.0, 20.0, 0.0}};
    const auto box = termstrip::project_box(plate, frame, intr);
    REQUIRE(box.has_value());
    CHECK(box->w == doctest::Approx(intr.focal_px * 100.0 / 500.0).epsilon(1e-12));
    CHECK(box->h == doctest::Approx(intr.focal_px * 40.0 / 500.0).epsilon(1e-12));
    CHECK(box->x + box->w / 2.0 == doctest::Approx(512.0));

    // Fully behind the camera: nothing to annotate.
    const Box3D behind{{-10.0, -10.0, 600.0}, {10.0, 10.0, 620.0}};
    CHECK_FALSE(termstrip::project_box(behind, frame, intr).has_value());

    // Straddling the near plane still yields a box.
    const Box3D straddle{{-10.0, -10.0, 400.0}, {10.0, 10.0, 520.0}};
    const auto clipped = termstrip::project_box(straddle, frame, intr);
    REQUIRE(clipped.has_value());
    CHECK(clipped->w > 0.0);
  }
}
