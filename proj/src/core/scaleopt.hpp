#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "catalog.hpp"
#include "evalkit.hpp"
#include "scenegen.hpp"
#include "stripgen.hpp"

namespace termstrip {

// Exact 1-D GP regression, Matern-5/2 kernel, zero prior mean.
class Gp1D {
 public:
  Gp1D(double length_scale, double signal_variance, double noise_variance);

  // Throws NumericError when the covariance stays non-positive-definite
  // through jitter escalation.
  void fit(const std::vector<double>& xs, const std::vector<double>& ys);
  void predict(double x, double& mean, double& variance) const;
  double kernel(double a, double b) const;

 private:
  double length_scale_;
  double signal_variance_;
  double noise_variance_;
  std::vector<double> xs_;
  std::vector<double> alpha_;  // K^-1 y
  std::vector<double> chol_;   // lower triangular, row-major packed
};

struct ScaleSearchConfig {
  double s_min = 0.5;
  double s_max = 3.0;
  int init_points = 5;
  int iterations = 20;
  double length_scale = 0.3;      // in log(scale) coordinates
  double signal_variance = 0.25;  // kernel sigma_f^2
  double noise_variance = 1e-4;   // observation noise sigma_n^2
  double xi = 0.01;               // expected-improvement exploration margin
  int grid_points = 1001;         // acquisition maximized on this grid
  std::uint64_t seed = 0;

  void validate() const;
  std::string to_json_text() const;
  static ScaleSearchConfig from_json_text(const std::string& text);
};

struct ScaleObservation {
  double scale = 0.0;
  double f1 = 0.0;
};

struct ScaleOptResult {
  double best_scale = 1.0;
  double best_f1 = 0.0;
  std::vector<ScaleObservation> trace;
  int evaluations_used = 0;

  std::string to_json_text() const;
};

// Expected improvement of a posterior N(mean, variance) over incumbent best.
double expected_improvement(double mean, double variance, double best, double xi);

// Bayesian optimization of a scale-dependent objective (detector F1). The
// search runs in log(scale): init_points low-discrepancy seeds, then
// iterations rounds of GP fit + EI argmax on a grid.
ScaleOptResult optimize_scale(const std::function<double(double)>& objective,
                              const ScaleSearchConfig& cfg);

struct ScaleLabel {
  int scene_id = 0;
  double applied_scale = 1.0;  // rendered size / nominal size
  double label = 1.0;          // required rescale factor, 1/applied_scale
};

std::string scale_labels_to_json_text(const std::vector<ScaleLabel>& labels);
std::vector<ScaleLabel> scale_labels_from_json_text(const std::string& text);

// Nudges a scale by a few ulps until multiplying by its rounded reciprocal
// yields exactly 1.0.
double snap_reciprocal(double scale);

struct LabeledScene {
  SceneSpec scene;
  ScaleLabel label;
};

// Scale-regression training data: scenes framed by the noise-free reference
// camera moved to distance d_ref / applied_scale, applied_scale uniform in
// [s_min, s_max]. Labels satisfy label * applied_scale == 1 exactly.
std::vector<LabeledScene> generate_scale_labels(
    const Catalog& catalog, const GenerationParams& gen_params,
    const SceneConfig& scene_cfg, int count, double s_min, double s_max,
    std::uint64_t master_seed);

// Manifest pairing every image with one rescale factor; box coordinates
// transform by multiplying all four fields by the factor.
std::string constant_rescale_manifest_text(
    const std::vector<std::string>& image_files, double factor);

Box2D scale_box(const Box2D& box, double factor);

// Synthetic detector for tests and demos: emits copies of the ground truth
// whose count (and false-positive padding) tracks a quality factor
// q = exp(-log^2(scale/s_star) / (2 width^2)), so its F1 is approximately q.
std::vector<Detection> oracle_detector(const std::vector<GtBox>& gt, double scale,
                                       double s_star, double quality_width);

}  // namespace termstrip
