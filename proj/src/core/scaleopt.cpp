#include "scaleopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.hpp"
#include "json.hpp"
#include "layout.hpp"
#include "rng.hpp"

namespace termstrip {
namespace {

using nlohmann::json;

constexpr double kGoldenFraction = 0.6180339887498949;

enum ScaleStream : std::uint64_t {
  kAppliedScaleStream = 4,  // strip/camera/lighting take 1..3, see scenegen
};

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi);
}

}  // namespace

Gp1D::Gp1D(double length_scale, double signal_variance, double noise_variance)
    : length_scale_(length_scale),
      signal_variance_(signal_variance),
      noise_variance_(noise_variance) {
  if (length_scale <= 0.0 || signal_variance <= 0.0 || noise_variance < 0.0)
    throw ValidationError("GP hyperparameters must be positive");
}

double Gp1D::kernel(double a, double b) const {
  const double r = std::abs(a - b) / length_scale_;
  const double s = std::sqrt(5.0) * r;
  return signal_variance_ * (1.0 + s + 5.0 * r * r / 3.0) * std::exp(-s);
}

void Gp1D::fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size())
    throw ValidationError("GP fit: xs and ys differ in length");
  xs_ = xs;
  const std::size_t n = xs.size();
  alpha_.assign(n, 0.0);
  chol_.assign(n * n, 0.0);
  if (n == 0) return;

  std::vector<double> cov(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cov[i * n + j] = kernel(xs[i], xs[j]);

  double jitter = 0.0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    bool ok = true;
    std::fill(chol_.begin(), chol_.end(), 0.0);
    for (std::size_t i = 0; i < n && ok; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double sum = cov[i * n + j];
        if (i == j) sum += noise_variance_ + jitter;
        for (std::size_t k = 0; k < j; ++k)
          sum -= chol_[i * n + k] * chol_[j * n + k];
        if (i == j) {
          if (sum <= 0.0) {
            ok = false;
            break;
          }
          chol_[i * n + i] = std::sqrt(sum);
        } else {
          chol_[i * n + j] = sum / chol_[j * n + j];
        }
      }
    }
    if (ok) {
      // forward then back substitution for alpha = K^-1 y
      std::vector<double> tmp(n);
      for (std::size_t i = 0; i < n; ++i) {
        double sum = ys[i];
        for (std::size_t k = 0; k < i; ++k) sum -= chol_[i * n + k] * tmp[k];
        tmp[i] = sum / chol_[i * n + i];
      }
      for (std::size_t i = n; i-- > 0;) {
        double sum = tmp[i];
        for (std::size_t k = i + 1; k < n; ++k) sum -= chol_[k * n + i] * alpha_[k];
        alpha_[i] = sum / chol_[i * n + i];
      }
      return;
    }
    jitter = jitter == 0.0 ? 1e-10 : jitter * 10.0;
    if (jitter > 1e-3) break;
  }
  throw NumericError("GP covariance is not positive definite");
}

void Gp1D::predict(double x, double& mean, double& variance) const {
  const std::size_t n = xs_.size();
  if (n == 0) {
    mean = 0.0;
    variance = signal_variance_;
    return;
  }
  std::vector<double> k_star(n);
  for (std::size_t i = 0; i < n; ++i) k_star[i] = kernel(x, xs_[i]);

  mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += k_star[i] * alpha_[i];

  // v = L^-1 k_star; variance = k(x,x) - v.v
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = k_star[i];
    for (std::size_t k = 0; k < i; ++k) sum -= chol_[i * n + k] * v[k];
    v[i] = sum / chol_[i * n + i];
  }
  double reduction = 0.0;
  for (std::size_t i = 0; i < n; ++i) reduction += v[i] * v[i];
  variance = std::max(0.0, kernel(x, x) - reduction);
}

void ScaleSearchConfig::validate() const {
  if (!(s_min > 0.0)) throw ValidationError("s_min must be > 0");
  if (!(s_min < s_max)) throw ValidationError("s_min must be < s_max");
  if (init_points < 1) throw ValidationError("init_points must be >= 1");
  if (iterations < 0) throw ValidationError("iterations must be >= 0");
  if (length_scale <= 0.0 || signal_variance <= 0.0 || noise_variance < 0.0)
    throw ValidationError("kernel hyperparameters must be positive");
  if (xi < 0.0) throw ValidationError("xi must be >= 0");
  if (grid_points < 2) throw ValidationError("grid_points must be >= 2");
}

std::string ScaleSearchConfig::to_json_text() const {
  return json{{"s_min", s_min},
              {"s_max", s_max},
              {"init_points", init_points},
              {"iterations", iterations},
              {"length_scale", length_scale},
              {"signal_variance", signal_variance},
              {"noise_variance", noise_variance},
              {"xi", xi},
              {"grid_points", grid_points},
              {"seed", seed}}
      .dump(2);
}

ScaleSearchConfig ScaleSearchConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("scale search config: ") + e.what());
  }
  if (!j.is_object())
    throw ParseError("scale search config must be a JSON object");
  ScaleSearchConfig c;
  try {
    if (j.contains("s_min")) c.s_min = j.at("s_min").get<double>();
    if (j.contains("s_max")) c.s_max = j.at("s_max").get<double>();
    if (j.contains("init_points")) c.init_points = j.at("init_points").get<int>();
    if (j.contains("iterations")) c.iterations = j.at("iterations").get<int>();
    if (j.contains("length_scale")) c.length_scale = j.at("length_scale").get<double>();
    if (j.contains("signal_variance"))
      c.signal_variance = j.at("signal_variance").get<double>();
    if (j.contains("noise_variance"))
      c.noise_variance = j.at("noise_variance").get<double>();
    if (j.contains("xi")) c.xi = j.at("xi").get<double>();
    if (j.contains("grid_points")) c.grid_points = j.at("grid_points").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("scale search config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string ScaleOptResult::to_json_text() const {
  json trace_json = json::array();
  for (const auto& obs : trace)
    trace_json.push_back(json{{"scale", obs.scale}, {"f1", obs.f1}});
  return json{{"best_scale", best_scale},
              {"best_f1", best_f1},
              {"trace", trace_json},
              {"evaluations_used", evaluations_used}}
      .dump(2);
}

double expected_improvement(double mean, double variance, double best, double xi) {
  const double sigma = std::sqrt(std::max(0.0, variance));
  const double gap = mean - best - xi;
  if (sigma < 1e-12) return std::max(0.0, gap);
  const double z = gap / sigma;
  return gap * normal_cdf(z) + sigma * normal_pdf(z);
}

ScaleOptResult optimize_scale(const std::function<double(double)>& objective,
                              const ScaleSearchConfig& cfg) {
  cfg.validate();
  const double lo = std::log(cfg.s_min);
  const double hi = std::log(cfg.s_max);

  ScaleOptResult result;
  std::vector<double> xs;  // log scales
  std::vector<double> ys;

  const auto evaluate = [&](double log_scale) {
    // exp(log(s_max)) can land one ulp outside the bounds
    const double scale = std::clamp(std::exp(log_scale), cfg.s_min, cfg.s_max);
    const double f1 = objective(scale);
    xs.push_back(log_scale);
    ys.push_back(f1);
    result.trace.push_back({scale, f1});
    if (result.trace.size() == 1 || f1 > result.best_f1) {
      result.best_f1 = f1;
      result.best_scale = scale;
    }
  };

  // Low-discrepancy initial design: golden-ratio sequence with a seeded
  // phase, mapped over the log-scale interval.
  CounterRng rng(derive_stream(cfg.seed, 1));
  const double phase = rng.uniform();
  for (int i = 0; i < cfg.init_points; ++i) {
    double t = phase + kGoldenFraction * i;
    t -= std::floor(t);
    evaluate(lo + t * (hi - lo));
  }

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    Gp1D gp(cfg.length_scale, cfg.signal_variance, cfg.noise_variance);
    gp.fit(xs, ys);
    const double incumbent = *std::max_element(ys.begin(), ys.end());
    double best_ei = -1.0;
    double best_x = lo;
    for (int g = 0; g < cfg.grid_points; ++g) {
      const double x = lo + (hi - lo) * g / (cfg.grid_points - 1);
      double mean = 0.0, variance = 0.0;
      gp.predict(x, mean, variance);
      const double ei = expected_improvement(mean, variance, incumbent, cfg.xi);
      if (ei > best_ei) {
        best_ei = ei;
        best_x = x;
      }
    }
    evaluate(best_x);
  }

  result.evaluations_used = static_cast<int>(result.trace.size());
  return result;
}

double snap_reciprocal(double scale) {
  if (!(scale > 0.0)) throw ValidationError("scale must be > 0");
  double candidate = 1.0 / (1.0 / scale);
  double up = candidate, down = candidate;
  // runs of non-invertible doubles can span >1000 ulps; 4096 keeps the
  // snapped value within 1e-12 relative over the whole search range
  for (int step = 0; step < 4096; ++step) {
    if ((1.0 / up) * up == 1.0) return up;
    if ((1.0 / down) * down == 1.0) return down;
    up = std::nextafter(up, std::numeric_limits<double>::infinity());
    down = std::nextafter(down, 0.0);
  }
  throw NumericError("no reciprocal-exact neighbour for scale");
}

std::string scale_labels_to_json_text(const std::vector<ScaleLabel>& labels) {
  json arr = json::array();
  for (const auto& l : labels)
    arr.push_back(json{{"scene_id", l.scene_id},
                       {"applied_scale", l.applied_scale},
                       {"label", l.label}});
  return arr.dump(2);
}

std::vector<ScaleLabel> scale_labels_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("scale labels: ") + e.what());
  }
  if (!j.is_array()) throw ParseError("scale labels: expected a JSON array");
  try {
    std::vector<ScaleLabel> labels;
    for (const auto& lj : j) {
      ScaleLabel l;
      l.scene_id = lj.at("scene_id").get<int>();
      l.applied_scale = lj.at("applied_scale").get<double>();
      l.label = lj.at("label").get<double>();
      labels.push_back(l);
    }
    return labels;
  } catch (const json::exception& e) {
    throw ParseError(std::string("scale labels: ") + e.what());
  }
}

std::vector<LabeledScene> generate_scale_labels(
    const Catalog& catalog, const GenerationParams& gen_params,
    const SceneConfig& scene_cfg, int count, double s_min, double s_max,
    std::uint64_t master_seed) {
  if (count < 1) throw ValidationError("count must be >= 1");
  if (!(s_min > 0.0 && s_min < s_max))
    throw ValidationError("scale range must satisfy 0 < s_min < s_max");
  scene_cfg.validate();

  std::vector<LabeledScene> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const std::uint64_t scene_seed =
        derive_stream(master_seed, static_cast<std::uint64_t>(i));

    GenerationParams params = gen_params;
    params.seed = derive_stream(scene_seed, 1);
    const StripConfig strip = generate_strip(catalog, params);

    CounterRng scale_rng(derive_stream(scene_seed, kAppliedScaleStream));
    const double applied = snap_reciprocal(scale_rng.uniform_range(s_min, s_max));

    // Noise-free reference view, pulled to d_ref / applied so the rendered
    // size is applied x nominal.
    CameraPose camera = reference_camera(catalog, strip, scene_cfg);
    const double d_ref = (camera.position - camera.look_at).norm();
    camera.position.z = camera.look_at.z + d_ref / applied;

    CounterRng lighting_rng(derive_stream(scene_seed, 3));
    const LightingEnv lighting = sample_lighting(scene_cfg.hdri_count, lighting_rng);

    SceneSpec scene = build_scene(catalog, strip, camera, lighting, scene_cfg);
    scene.scene_id = i;
    scene.seed = scene_seed;

    LabeledScene labeled;
    labeled.scene = std::move(scene);
    labeled.label.scene_id = i;
    labeled.label.applied_scale = applied;
    labeled.label.label = 1.0 / applied;
    out.push_back(std::move(labeled));
  }
  return out;
}

std::string constant_rescale_manifest_text(
    const std::vector<std::string>& image_files, double factor) {
  if (!(factor > 0.0)) throw ValidationError("rescale factor must be > 0");
  json images = json::array();
  for (const auto& f : image_files)
    images.push_back(json{{"file", f}, {"scale", factor}});
  return json{{"factor", factor},
              {"box_transform", "multiply bbox x, y, w, h by scale"},
              {"images", images}}
      .dump(2);
}

Box2D scale_box(const Box2D& box, double factor) {
  return {box.x * factor, box.y * factor, box.w * factor, box.h * factor};
}

std::vector<Detection> oracle_detector(const std::vector<GtBox>& gt, double scale,
                                       double s_star, double quality_width) {
  if (!(scale > 0.0) || !(s_star > 0.0) || !(quality_width > 0.0))
    throw ValidationError("oracle detector parameters must be > 0");
  const double d = std::log(scale / s_star);
  const double q = std::exp(-d * d / (2.0 * quality_width * quality_width));

  const long long total = static_cast<long long>(gt.size());
  const long long tp = std::llround(q * static_cast<double>(total));
  const long long fp =
      q > 0.0 ? std::llround(static_cast<double>(tp) * (1.0 / q - 1.0)) : 0;

  std::vector<Detection> dets;
  dets.reserve(static_cast<std::size_t>(tp + fp));
  for (long long i = 0; i < tp; ++i) {
    Detection det;
    det.image_id = gt[static_cast<std::size_t>(i)].image_id;
    det.class_id = gt[static_cast<std::size_t>(i)].class_id;
    det.box = gt[static_cast<std::size_t>(i)].box;
    det.score = 0.9;
    dets.push_back(det);
  }
  const int fp_image = gt.empty() ? 0 : gt.front().image_id;
  for (long long i = 0; i < fp; ++i) {
    Detection det;
    det.image_id = fp_image;
    det.class_id = 0;
    det.box = {1.0e5 + 20.0 * static_cast<double>(i), 1.0e5, 10.0, 10.0};
    det.score = 0.9;
    dets.push_back(det);
  }
  return dets;
}

}  // namespace termstrip
