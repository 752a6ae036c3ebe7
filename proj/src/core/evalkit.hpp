#pragma once

#include <map>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace termstrip {

struct Detection {
  int image_id = 0;
  int class_id = 0;
  Box2D box;
  double score = 0.0;
};

struct GtBox {
  int image_id = 0;
  int class_id = 0;
  Box2D box;
};

struct MatchCounts {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool empty_empty = false;  // no GT and no detections: f1 defined as 1
};

struct EvalResult {
  std::vector<double> iou_thresholds;
  // class -> AP at each threshold (same order as iou_thresholds); classes
  // absent from the ground truth are not listed.
  std::map<int, std::vector<double>> ap_per_class;
  double map_50 = 0.0;
  double map_5095 = 0.0;
  MatchCounts counts;  // at (iou 0.5, score 0.5)
  // (C+1)x(C+1), row = ground-truth class, column = predicted class, last
  // index = background (unmatched).
  std::vector<std::vector<long long>> confusion;
  int class_count = 0;
  bool empty_inputs = false;

  std::string to_json_text() const;
};

const std::vector<double>& coco_iou_thresholds();  // 0.50, 0.55, ..., 0.95

// Greedy class-wise suppression within each image: repeatedly keep the
// highest-scoring remaining detection and drop same-class detections whose
// IoU with it exceeds iou_threshold. Ties broken by lower box x, then lower
// class_id. Output sorted by descending score.
std::vector<Detection> nms(const std::vector<Detection>& dets, double iou_threshold);

// COCO-style AP with 101-point interpolation, greedy per-class matching, and
// at most max_dets detections per (image, class). Sets map_50/map_5095 and
// ap_per_class; other EvalResult fields are left at defaults.
EvalResult compute_map(const std::vector<Detection>& dets,
                       const std::vector<GtBox>& gts,
                       const std::vector<double>& iou_thresholds,
                       int max_dets = 100);

MatchCounts compute_f1(const std::vector<Detection>& dets,
                       const std::vector<GtBox>& gts, double iou_t = 0.5,
                       double score_t = 0.5);

// Class-agnostic spatial matching so cross-class confusions are visible.
std::vector<std::vector<long long>> confusion_matrix(
    const std::vector<Detection>& dets, const std::vector<GtBox>& gts,
    int class_count, double iou_t = 0.5, double score_t = 0.5);

// Full bundle: mAP at the COCO thresholds, F1 counts, and confusion matrix.
EvalResult evaluate_all(const std::vector<Detection>& dets,
                        const std::vector<GtBox>& gts, int class_count,
                        double iou_t = 0.5, double score_t = 0.5);

}  // namespace termstrip
