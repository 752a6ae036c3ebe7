#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "core/errors.hpp"
#include "core/evalkit.hpp"
#include "core/rng.hpp"
#include "core/scaleopt.hpp"
#include "core/scenegen.hpp"
#include "helpers.hpp"
#include "json.hpp"
#include "oracles.hpp"

using termstrip::CounterRng;
using termstrip::expected_improvement;
using termstrip::GenerationParams;
using termstrip::Gp1D;
using termstrip::GtBox;
using termstrip::optimize_scale;
using termstrip::ScaleSearchConfig;
using termstrip::SceneConfig;
using termstrip::snap_reciprocal;

namespace {

std::vector<GtBox> grid_gt(int n) {
  std::vector<GtBox> gt;
  for (int i = 0; i < n; ++i) gt.push_back({0, 0, {20.0 * i, 0.0, 10.0, 10.0}});
  return gt;
}

}  // namespace

TEST_SUITE("scaleopt") {
  TEST_CASE("snap_reciprocal makes scale * (1/scale) exactly one") {
    CounterRng rng(0x5caf);
    for (int i = 0; i < 10000; ++i) {
      const double raw = rng.uniform_range(0.5, 3.0);
      const double s = snap_reciprocal(raw);
      CHECK((1.0 / s) * s == 1.0);
      CHECK(std::abs(s - raw) <= 1e-12 * raw);
    }
    CHECK(snap_reciprocal(1.0) == 1.0);
    CHECK(snap_reciprocal(2.0) == 2.0);  // powers of two are already exact
    CHECK_THROWS_AS(snap_reciprocal(0.0), termstrip::ValidationError);
    CHECK_THROWS_AS(snap_reciprocal(-1.5), termstrip::ValidationError);
  }

  TEST_CASE("gp kernel shape") {
    const Gp1D gp(0.3, 0.25, 1e-4);
    CHECK(gp.kernel(1.7, 1.7) == 0.25);
    CHECK(gp.kernel(0.0, 0.5) == gp.kernel(0.5, 0.0));
    CHECK(gp.kernel(0.0, 0.1) > gp.kernel(0.0, 0.2));
    CHECK(gp.kernel(0.0, 5.0) < 1e-6);
    // Matern-5/2 at r = 1 length scale
    const double s = std::sqrt(5.0);
    CHECK(gp.kernel(0.0, 0.3) ==
          doctest::Approx(0.25 * (1.0 + s + 5.0 / 3.0) * std::exp(-s))
              .epsilon(1e-14));
    CHECK_THROWS_AS(Gp1D(0.0, 1.0, 0.1), termstrip::ValidationError);
    CHECK_THROWS_AS(Gp1D(1.0, -1.0, 0.1), termstrip::ValidationError);
    CHECK_THROWS_AS(Gp1D(1.0, 1.0, -0.1), termstrip::ValidationError);
  }

  TEST_CASE("gp regression interpolates and reverts to the prior") {
    Gp1D gp(0.5, 1.0, 1e-8);
    const std::vector<double> xs{-1.0, -0.2, 0.4, 1.1};
    std::vector<double> ys;
    for (double x : xs) ys.push_back(std::sin(2.0 * x));
    gp.fit(xs, ys);

    double mean = 0.0, variance = 1.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      gp.predict(xs[i], mean, variance);
      CHECK(mean == doctest::Approx(ys[i]).epsilon(1e-3));
      CHECK(variance < 1e-4);
    }
    gp.predict(50.0, mean, variance);  // far from all data
    CHECK(mean == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(variance == doctest::Approx(1.0).epsilon(1e-9));

    Gp1D empty(0.5, 2.0, 1e-4);
    empty.fit({}, {});
    empty.predict(0.3, mean, variance);
    CHECK(mean == 0.0);
    CHECK(variance == 2.0);

    CHECK_THROWS_AS(gp.fit({1.0}, {1.0, 2.0}), termstrip::ValidationError);
  }

  TEST_CASE("gp reports an unfixable covariance") {
    // duplicate inputs with zero noise and a variance so large that jitter
    // escalation cannot register against the diagonal
    Gp1D gp(1.0, 1e20, 0.0);
    CHECK_THROWS_AS(gp.fit({1.0, 1.0}, {0.0, 0.0}), termstrip::NumericError);
  }

  TEST_CASE("expected improvement analytic values") {
    // no uncertainty: plain thresholded gap
    CHECK(expected_improvement(1.0, 0.0, 0.5, 0.0) == 0.5);
    CHECK(expected_improvement(0.1, 0.0, 0.5, 0.0) == 0.0);
    CHECK(expected_improvement(1.0, 0.0, 0.5, 0.2) == doctest::Approx(0.3));

    // zero gap: EI = sigma * pdf(0)
    const double pdf0 = 1.0 / std::sqrt(2.0 * termstrip::kPi);
    CHECK(expected_improvement(0.51, 4.0, 0.5, 0.01) ==
          doctest::Approx(2.0 * pdf0).epsilon(1e-14));

    // textbook case: gap 1, sigma 2 -> gap*cdf(0.5) + sigma*pdf(0.5)
    CHECK(expected_improvement(1.0, 4.0, 0.0, 0.0) ==
          doctest::Approx(0.69146246127401310 + 2.0 * 0.35206532676429952)
              .epsilon(1e-12));

    // below the incumbent there is still exploration value
    const double below = expected_improvement(0.0, 1.0, 1.0, 0.0);
    CHECK(below > 0.0);
    CHECK(below < pdf0);
    // more certainty about a bad mean means less EI
    CHECK(expected_improvement(0.0, 0.25, 1.0, 0.0) < below);
  }

  TEST_CASE("optimize_scale finds a log-quadratic optimum") {
    const auto objective = [](double s) {
      const double d = std::log(s) - std::log(1.4);
      return 1.0 - d * d;
    };
    ScaleSearchConfig cfg;
    cfg.seed = 21;
    const auto result = optimize_scale(objective, cfg);

    CHECK(result.evaluations_used == 25);
    CHECK(result.trace.size() == 25);
    CHECK(result.best_f1 > 0.995);
    CHECK(std::abs(std::log(result.best_scale / 1.4)) < 0.1);

    double best_seen = -1e9;
    bool best_in_trace = false;
    for (const auto& obs : result.trace) {
      CHECK(obs.scale >= cfg.s_min);
      CHECK(obs.scale <= cfg.s_max);
      CHECK(obs.f1 == objective(obs.scale));
      best_seen = std::max(best_seen, obs.f1);
      if (obs.scale == result.best_scale && obs.f1 == result.best_f1)
        best_in_trace = true;
    }
    CHECK(result.best_f1 == best_seen);
    CHECK(best_in_trace);

    // at least as good as a dense grid search, up to 1%
    const auto grid = testoracle::grid_search_best(objective, cfg.s_min,
                                                   cfg.s_max, 251);
    CHECK(result.best_f1 >= 0.99 * grid.value);

    // determinism and seed sensitivity
    const auto again = optimize_scale(objective, cfg);
    CHECK(again.to_json_text() == result.to_json_text());
    ScaleSearchConfig other = cfg;
    other.seed = 22;
    CHECK(optimize_scale(objective, other).trace[0].scale !=
          result.trace[0].scale);
  }

  TEST_CASE("optimize_scale respects iteration counts and propagates throws") {
    const auto objective = [](double s) { return -s; };
    ScaleSearchConfig cfg;
    cfg.init_points = 3;
    cfg.iterations = 0;
    const auto result = optimize_scale(objective, cfg);
    CHECK(result.trace.size() == 3);
    CHECK(result.evaluations_used == 3);
    // maximizing -s picks the smallest scale seen
    CHECK(result.best_f1 == -result.best_scale);

    const auto broken = [](double) -> double {
      throw std::runtime_error("detector exploded");
    };
    CHECK_THROWS_AS(optimize_scale(broken, cfg), std::runtime_error);
  }

  TEST_CASE("scale search config validation and json") {
    ScaleSearchConfig cfg;
    cfg.s_min = 0.0;
    CHECK_THROWS_AS(cfg.validate(), termstrip::ValidationError);
    cfg = ScaleSearchConfig{};
    cfg.s_max = cfg.s_min;
    CHECK_THROWS_AS(cfg.validate(), termstrip::ValidationError);
    cfg = ScaleSearchConfig{};
    cfg.init_points = 0;
    CHECK_THROWS_AS(cfg.validate(), termstrip::ValidationError);
    cfg = ScaleSearchConfig{};
    cfg.grid_points = 1;
    CHECK_THROWS_AS(cfg.validate(), termstrip::ValidationError);

    cfg = ScaleSearchConfig{};
    const auto round = ScaleSearchConfig::from_json_text(cfg.to_json_text());
    CHECK(round.to_json_text() == cfg.to_json_text());
    const auto partial =
        ScaleSearchConfig::from_json_text(R"({"iterations": 7, "seed": 9})");
    CHECK(partial.iterations == 7);
    CHECK(partial.seed == 9);
    CHECK(partial.init_points == 5);
    CHECK_THROWS_AS(ScaleSearchConfig::from_json_text("[]"), termstrip::ParseError);
    CHECK_THROWS_AS(ScaleSearchConfig::from_json_text(R"({"s_min": -1})"),
                    termstrip::ValidationError);
  }

  TEST_CASE("oracle detector tracks its quality factor") {
    const auto gt = grid_gt(100);

    // perfect at the sweet spot
    const auto perfect = termstrip::oracle_detector(gt, 1.5, 1.5, 0.35);
    REQUIRE(perfect.size() == 100);
    const auto counts = compute_f1(perfect, gt);
    CHECK(counts.f1 == 1.0);
    CHECK(counts.tp == 100);

    // one width off: q = exp(-1/2)
    const double q = std::exp(-0.5);
    const auto off = termstrip::oracle_detector(gt, 1.5 * std::exp(0.35), 1.5, 0.35);
    const long long tp = std::llround(q * 100.0);
    const long long fp = std::llround(tp * (1.0 / q - 1.0));
    REQUIRE(static_cast<long long>(off.size()) == tp + fp);
    const auto off_counts = compute_f1(off, gt);
    CHECK(off_counts.tp == tp);
    CHECK(off_counts.fp == fp);
    CHECK(off_counts.f1 == doctest::Approx(q).epsilon(0.05));
    for (const auto& d : off) CHECK(d.score == 0.9);

    // far off: close to nothing detected
    const auto far = termstrip::oracle_detector(gt, 30.0, 1.5, 0.35);
    CHECK(compute_f1(far, gt).f1 < 0.1);

    CHECK(termstrip::oracle_detector({}, 1.0, 1.5, 0.35).empty());
    CHECK_THROWS_AS(termstrip::oracle_detector(gt, 0.0, 1.5, 0.35),
                    termstrip::ValidationError);
    CHECK_THROWS_AS(termstrip::oracle_detector(gt, 1.0, 1.5, 0.0),
                    termstrip::ValidationError);
  }

  TEST_CASE("scale labels invert their applied scale exactly") {
    const auto& cat = testhelp::reference_catalog();
    const SceneConfig cfg;
    const auto labeled = generate_scale_labels(cat, GenerationParams{}, cfg,
                                               100, 0.5, 3.0, 4040);
    REQUIRE(labeled.size() == 100);
    for (int i = 0; i < 100; ++i) {
      const auto& l = labeled[i];
      CHECK(l.label.scene_id == i);
      CHECK(l.scene.scene_id == i);
      CHECK(l.label.applied_scale * l.label.label == 1.0);  // exact
      CHECK(l.label.applied_scale >= 0.5 - 1e-12);
      CHECK(l.label.applied_scale <= 3.0 + 1e-12);

      // camera sits at the reference distance divided by the applied scale
      const auto ref = reference_camera(cat, l.scene.strip, cfg);
      const double d_ref = (ref.position - ref.look_at).norm();
      const double d = (l.scene.camera.position - l.scene.camera.look_at).norm();
      CHECK(d == doctest::Approx(d_ref / l.label.applied_scale).epsilon(1e-9));
      CHECK(l.scene.camera.rotation_noise_deg.x == 0.0);
      CHECK(l.scene.camera.rotation_noise_deg.z == 0.0);
      CHECK(l.scene.camera.position.x == ref.position.x);
      CHECK(l.scene.camera.position.y == ref.position.y);
    }

    // deterministic, and master seed matters
    const auto again = generate_scale_labels(cat, GenerationParams{}, cfg,
                                             100, 0.5, 3.0, 4040);
    CHECK(again[7].label.applied_scale == labeled[7].label.applied_scale);
    CHECK(again[7].scene.to_json_text() == labeled[7].scene.to_json_text());
    const auto moved = generate_scale_labels(cat, GenerationParams{}, cfg,
                                             1, 0.5, 3.0, 4041);
    CHECK(moved[0].label.applied_scale != labeled[0].label.applied_scale);

    CHECK_THROWS_AS(generate_scale_labels(cat, GenerationParams{}, cfg, 0,
                                          0.5, 3.0, 1),
                    termstrip::ValidationError);
    CHECK_THROWS_AS(generate_scale_labels(cat, GenerationParams{}, cfg, 1,
                                          2.0, 0.5, 1),
                    termstrip::ValidationError);
  }

  TEST_CASE("scale label json round-trip") {
    std::vector<termstrip::ScaleLabel> labels;
    labels.push_back({0, 2.0, 0.5});
    labels.push_back({1, 0.8, 1.25});
    const std::string text = scale_labels_to_json_text(labels);
    const auto parsed = termstrip::scale_labels_from_json_text(text);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].scene_id == 0);
    CHECK(parsed[0].applied_scale == 2.0);
    CHECK(parsed[1].label == 1.25);
    CHECK_THROWS_AS(termstrip::scale_labels_from_json_text("{}"),
                    termstrip::ParseError);
    CHECK_THROWS_AS(termstrip::scale_labels_from_json_text("[{\"scene_id\": 1}]"),
                    termstrip::ParseError);
  }

  TEST_CASE("constant rescale manifest and box scaling") {
    const std::string text = termstrip::constant_rescale_manifest_text(
        {"a.png", "b.png"}, 1.25);
    const auto j = nlohmann::json::parse(text);
    CHECK(j["factor"] == 1.25);
    REQUIRE(j["images"].size() == 2);
    CHECK(j["images"][0]["file"] == "a.png");
    CHECK(j["images"][0]["scale"] == 1.25);
    CHECK(j.contains("box_transform"));
    CHECK_THROWS_AS(termstrip::constant_rescale_manifest_text({"a.png"}, 0.0),
                    termstrip::ValidationError);

    const auto scaled = termstrip::scale_box({4.0, 6.0, 10.0, 20.0}, 1.5);
    CHECK(scaled.x == 6.0);
    CHECK(scaled.y == 9.0);
    CHECK(scaled.w == 15.0);
    CHECK(scaled.h == 30.0);
  }
}
