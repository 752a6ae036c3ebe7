#include "evalkit.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace termstrip {
namespace {

using nlohmann::json;

// Deterministic detection order: score desc, then image, box x, class.
bool det_before(const Detection& a, const Detection& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.image_id != b.image_id) return a.image_id < b.image_id;
  if (a.box.x != b.box.x) return a.box.x < b.box.x;
  return a.class_id < b.class_id;
}

// Greedy match of sorted detections against per-image ground truth. matched
// gt indices are flagged in gt_used; returns per-detection matched gt index
// or -1. Same-class matching unless class_agnostic.
std::vector<int> greedy_match(const std::vector<Detection>& sorted_dets,
                              const std::vector<GtBox>& gts, double iou_t,
                              bool class_agnostic, std::vector<char>& gt_used) {
  gt_used.assign(gts.size(), 0);
  std::vector<int> match(sorted_dets.size(), -1);
  for (std::size_t d = 0; d < sorted_dets.size(); ++d) {
    const Detection& det = sorted_dets[d];
    double best_iou = 0.0;
    int best_gt = -1;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gt_used[g]) continue;
      if (gts[g].image_id != det.image_id) continue;
      if (!class_agnostic && gts[g].class_id != det.class_id) continue;
      const double v = box_iou(det.box, gts[g].box);
      if (v > best_iou) {  // ties keep the lower gt index
        best_iou = v;
        best_gt = static_cast<int>(g);
      }
    }
    if (best_gt >= 0 && best_iou >= iou_t) {
      match[d] = best_gt;
      gt_used[best_gt] = 1;
    }
  }
  return match;
}

}  // namespace

const std::vector<double>& coco_iou_thresholds() {
  static const std::vector<double> thresholds = [] {
    std::vector<double> t;
    for (int i = 0; i < 10; ++i) t.push_back((50 + 5 * i) / 100.0);
    return t;
  }();
  return thresholds;
}

std::vector<Detection> nms(const std::vector<Detection>& dets, double iou_threshold) {
  std::vector<Detection> sorted = dets;
  std::sort(sorted.begin(), sorted.end(), det_before);
  std::vector<char> removed(sorted.size(), 0);
  std::vector<Detection> kept;
  kept.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (removed[i]) continue;
    kept.push_back(sorted[i]);
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      if (removed[j]) continue;
      if (sorted[j].image_id != sorted[i].image_id) continue;
      if (sorted[j].class_id != sorted[i].class_id) continue;
      if (box_iou(sorted[i].box, sorted[j].box) > iou_threshold) removed[j] = 1;
    }
  }
  return kept;
}

EvalResult compute_map(const std::vector<Detection>& dets,
                       const std::vector<GtBox>& gts,
                       const std::vector<double>& iou_thresholds, int max_dets) {
  EvalResult result;
  result.iou_thresholds = iou_thresholds;
  result.empty_inputs = dets.empty() && gts.empty();

  // Cap detections per (image, class) at max_dets, strongest first.
  std::vector<Detection> capped = dets;
  std::sort(capped.begin(), capped.end(), det_before);
  std::map<std::pair<int, int>, int> per_image_class;
  std::vector<Detection> used;
  used.reserve(capped.size());
  for (const auto& d : capped) {
    if (++per_image_class[{d.image_id, d.class_id}] <= max_dets) used.push_back(d);
  }

  std::vector<int> classes;
  for (const auto& g : gts)
    if (std::find(classes.begin(), classes.end(), g.class_id) == classes.end())
      classes.push_back(g.class_id);
  std::sort(classes.begin(), classes.end());

  double sum_5095 = 0.0;
  for (std::size_t ti = 0; ti < iou_thresholds.size(); ++ti) {
    const double threshold = iou_thresholds[ti];
    double sum_ap = 0.0;
    for (int cls : classes) {
      std::vector<Detection> cls_dets;
      for (const auto& d : used)
        if (d.class_id == cls) cls_dets.push_back(d);
      std::vector<GtBox> cls_gts;
      for (const auto& g : gts)
        if (g.class_id == cls) cls_gts.push_back(g);

      std::vector<char> gt_used;
      const auto match = greedy_match(cls_dets, cls_gts, threshold, false, gt_used);

      const std::size_t n = cls_dets.size();
      std::vector<double> precision(n), recall(n);
      long long tp = 0;
      for (std::size_t d = 0; d < n; ++d) {
        if (match[d] >= 0) ++tp;
        precision[d] = static_cast<double>(tp) / static_cast<double>(d + 1);
        recall[d] = static_cast<double>(tp) / static_cast<double>(cls_gts.size());
      }
      // precision envelope, then 101-point interpolation
      for (std::size_t d = n; d-- > 1;)
        precision[d - 1] = std::max(precision[d - 1], precision[d]);
      double ap = 0.0;
      for (int r = 0; r <= 100; ++r) {
        const double target = r / 100.0;
        double p = 0.0;
        for (std::size_t d = 0; d < n; ++d) {
          if (recall[d] >= target) {
            p = precision[d];
            break;
          }
        }
        ap += p;
      }
      ap /= 101.0;
      result.ap_per_class[cls].push_back(ap);
      sum_ap += ap;
    }
    const double map_t = classes.empty() ? 0.0 : sum_ap / classes.size();
    if (threshold == 0.5) result.map_50 = map_t;
    sum_5095 += map_t;
  }
  result.map_5095 =
      iou_thresholds.empty() ? 0.0 : sum_5095 / iou_thresholds.size();
  return result;
}

MatchCounts compute_f1(const std::vector<Detection>& dets,
                       const std::vector<GtBox>& gts, double iou_t, double score_t) {
  std::vector<Detection> strong;
  for (const auto& d : dets)
    if (d.score >= score_t) strong.push_back(d);
  std::sort(strong.begin(), strong.end(), det_before);

  MatchCounts counts;
  if (strong.empty() && gts.empty()) {
    counts.empty_empty = true;
    counts.precision = counts.recall = counts.f1 = 1.0;
    return counts;
  }

  std::vector<char> gt_used;
  const auto match = greedy_match(strong, gts, iou_t, false, gt_used);
  for (std::size_t d = 0; d < strong.size(); ++d)
    match[d] >= 0 ? ++counts.tp : ++counts.fp;
  counts.fn = static_cast<long long>(gts.size()) - counts.tp;

  counts.precision = counts.tp + counts.fp
                         ? static_cast<double>(counts.tp) / (counts.tp + counts.fp)
                         : 0.0;
  counts.recall = counts.tp + counts.fn
                      ? static_cast<double>(counts.tp) / (counts.tp + counts.fn)
                      : 0.0;
  const double pr = counts.precision + counts.recall;
  counts.f1 = pr > 0.0 ? 2.0 * counts.precision * counts.recall / pr : 0.0;
  return counts;
}

std::vector<std::vector<long long>> confusion_matrix(
    const std::vector<Detection>& dets, const std::vector<GtBox>& gts,
    int class_count, double iou_t, double score_t) {
  std::vector<std::vector<long long>> matrix(
      class_count + 1, std::vector<long long>(class_count + 1, 0));
  const int background = class_count;

  std::vector<Detection> strong;
  for (const auto& d : dets)
    if (d.score >= score_t) strong.push_back(d);
  std::sort(strong.begin(), strong.end(), det_before);

  std::vector<char> gt_used;
  const auto match = greedy_match(strong, gts, iou_t, true, gt_used);
  for (std::size_t d = 0; d < strong.size(); ++d) {
    if (match[d] >= 0)
      ++matrix[gts[match[d]].class_id][strong[d].class_id];
    else
      ++matrix[background][strong[d].class_id];
  }
  for (std::size_t g = 0; g < gts.size(); ++g)
    if (!gt_used[g]) ++matrix[gts[g].class_id][background];
  return matrix;
}

EvalResult evaluate_all(const std::vector<Detection>& dets,
                        const std::vector<GtBox>& gts, int class_count,
                        double iou_t, double score_t) {
  EvalResult result = compute_map(dets, gts, coco_iou_thresholds());
  result.counts = compute_f1(dets, gts, iou_t, score_t);
  result.confusion = confusion_matrix(dets, gts, class_count, iou_t, score_t);
  result.class_count = class_count;
  return result;
}

std::string EvalResult::to_json_text() const {
  json per_class = json::object();
  for (const auto& [cls, aps] : ap_per_class)
    per_class[std::to_string(cls)] = aps;
  json j{{"iou_thresholds", iou_thresholds},
         {"ap_per_class", per_class},
         {"map_50", map_50},
         {"map_5095", map_5095},
         {"precision", counts.precision},
         {"recall", counts.recall},
         {"f1", counts.f1},
         {"tp", counts.tp},
         {"fp", counts.fp},
         {"fn", counts.fn},
         {"f1_empty_empty", counts.empty_empty},
         {"empty_inputs", empty_inputs},
         {"class_count", class_count},
         {"confusion", confusion}};
  return j.dump(2);
}

}  // namespace termstrip
