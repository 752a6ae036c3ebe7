#include "termstrip/termstrip.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "core/annotate.hpp"
#include "core/catalog.hpp"
#include "core/coco.hpp"
#include "core/errors.hpp"
#include "core/evalkit.hpp"
#include "core/io_util.hpp"
#include "core/pipeline.hpp"
#include "core/preview.hpp"
#include "core/scaleopt.hpp"
#include "core/scenegen.hpp"
#include "core/stripgen.hpp"

using namespace termstrip;

namespace {

thread_local std::string g_last_error;

char* alloc_string(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

ts_status fail(ts_status code, const char* what) {
  g_last_error = what ? what : "";
  return code;
}

// Runs fn, converting exceptions to status codes and recording the message.
template <typename Fn>
ts_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return TS_OK;
  } catch (const ParseError& e) {
    return fail(TS_ERROR_PARSE, e.what());
  } catch (const ValidationError& e) {
    return fail(TS_ERROR_VALIDATION, e.what());
  } catch (const IoError& e) {
    return fail(TS_ERROR_IO, e.what());
  } catch (const GenerationError& e) {
    return fail(TS_ERROR_GENERATION, e.what());
  } catch (const NumericError& e) {
    return fail(TS_ERROR_NUMERIC, e.what());
  } catch (const DetectorError& e) {
    return fail(TS_ERROR_DETECTOR, e.what());
  } catch (const std::exception& e) {
    return fail(TS_ERROR_GENERATION, e.what());
  } catch (...) {
    return fail(TS_ERROR_GENERATION, "unknown error");
  }
}

const Catalog& as_catalog(const ts_catalog* handle) {
  return *reinterpret_cast<const Catalog*>(handle);
}

GenerationParams params_from_arg(const char* params_json) {
  if (!params_json || params_json[0] == '\0') return GenerationParams{};
  return GenerationParams::from_json_text(params_json);
}

SceneConfig scene_config_from_arg(const char* scene_config_json) {
  if (!scene_config_json || scene_config_json[0] == '\0') return SceneConfig{};
  return SceneConfig::from_json_text(scene_config_json);
}

std::string scene_file_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "scene_%06d.json", index);
  return buf;
}

}  // namespace

extern "C" {

const char* ts_version(void) { return "0.1.0"; }

const char* ts_last_error(void) { return g_last_error.c_str(); }

void ts_string_free(char* text) { std::free(text); }

ts_status ts_catalog_load(const char* path, ts_catalog** out_catalog) {
  if (!path || !out_catalog)
    return fail(TS_ERROR_INVALID_ARGUMENT, "ts_catalog_load: NULL argument");
  return guarded([&] {
    auto* catalog = new Catalog(Catalog::load(path));
    *out_catalog = reinterpret_cast<ts_catalog*>(catalog);
  });
}

ts_status ts_catalog_parse(const char* json_text, ts_catalog** out_catalog) {
  if (!json_text || !out_catalog)
    return fail(TS_ERROR_INVALID_ARGUMENT, "ts_catalog_parse: NULL argument");
  return guarded([&] {
    auto* catalog = new Catalog(Catalog::from_json_text(json_text));
    *out_catalog = reinterpret_cast<ts_catalog*>(catalog);
  });
}

void ts_catalog_free(ts_catalog* catalog) {
  delete reinterpret_cast<Catalog*>(catalog);
}

int ts_catalog_part_count(const ts_catalog* catalog) {
  if (!catalog) return -1;
  return static_cast<int>(as_catalog(catalog).parts().size());
}

int ts_catalog_class_count(const ts_catalog* catalog) {
  if (!catalog) return -1;
  return as_catalog(catalog).class_count();
}

ts_status ts_strip_generate(const ts_catalog* catalog, const char* params_json,
                            uint64_t seed, char** out_strip_json) {
  if (!catalog || !out_strip_json)
    return fail(TS_ERROR_INVALID_ARGUMENT, "ts_strip_generate: NULL argument");
  return guarded([&] {
    GenerationParams params = params_from_arg(params_json);
    params.seed = seed;
    const StripConfig strip = generate_strip(as_catalog(catalog), params);
    *out_strip_json = alloc_string(strip.to_json_text());
  });
}

ts_status ts_scene_generate(const ts_catalog* catalog, const char* params_json,
                            const char* scene_config_json, uint64_t master_seed,
                            int scene_index, char** out_scene_json) {
  if (!catalog || !out_scene_json)
    return fail(TS_ERROR_INVALID_ARGUMENT, "ts_scene_generate: NULL argument");
  return guarded([&] {
    const SceneSpec scene =
        make_scene(as_catalog(catalog), params_from_arg(params_json),
                   scene_config_from_arg(scene_config_json), master_seed,
                   scene_index);
    *out_scene_json = alloc_string(scene.to_json_text());
  });
}

ts_status ts_scene_annotate(const ts_catalog* catalog, const char* scene_json,
                            double min_area_px, char** out_annotation_json) {
  if (!catalog || !scene_json || !out_annotation_json)
    return fail(TS_ERROR_INVALID_ARGUMENT, "ts_scene_annotate: NULL argument");
  return guarded([&] {
    const SceneSpec scene = SceneSpec::from_json_text(scene_json);
    const double area = min_area_px < 0.0 ? 100.0 : min_area_px;
    const AnnotationSet set = annotate_scene(as_catalog(catalog), scene, area);
    *out_annotation_json = alloc_string(set.to_json_text());
  });
}

ts_status ts_scene_preview_png(const ts_catalog* catalog, const char* scene_json,
                               const char* png_path) {
  if (!catalog || !scene_json || !png_path)
    return fail(TS_ERROR_INVALID_ARGUMENT, "ts_scene_preview_png: NULL argument");
  return guarded([&] {
    const SceneSpec scene = SceneSpec::from_json_text(scene_json);
    write_png_rgb8(png_path, render_preview(as_catalog(catalog), scene));
  });
}

ts_status ts_dataset_build(const char* pipeline_config_json,
                           char** out_manifest_json) {
  if (!pipeline_config_json || !out_manifest_json)
    return fail(TS_ERROR_INVALID_ARGUMENT, "ts_dataset_build: NULL argument");
  return guarded([&] {
    const PipelineConfig config =
        PipelineConfig::from_json_text(pipeline_config_json);
    const DatasetManifest manifest = build_dataset(config);
    *out_manifest_json = alloc_string(manifest.to_json_text());
  });
}

ts_status ts_dataset_stats(const char* dataset_dir, char** out_stats_json) {
  if (!dataset_dir || !out_stats_json)
    return fail(TS_ERROR_INVALID_ARGUMENT, "ts_dataset_stats: NULL argument");
  return guarded([&] {
    *out_stats_json = alloc_string(dataset_stats_text(dataset_dir));
  });
}

ts_status ts_coco_export(const ts_catalog* catalog,
                         const char* const* annotation_jsons,
                         size_t annotation_count, char** out_coco_json) {
  if (!catalog || !out_coco_json || (annotation_count > 0 && !annotation_jsons))
    return fail(TS_ERROR_INVALID_ARGUMENT, "ts_coco_export: NULL argument");
  return guarded([&] {
    std::vector<AnnotationSet> sets;
    sets.reserve(annotation_count);
    for (size_t i = 0; i < annotation_count; ++i) {
      if (!annotation_jsons[i]) throw ValidationError("NULL annotation document");
      sets.push_back(AnnotationSet::from_json_text(annotation_jsons[i]));
    }
    *out_coco_json = alloc_string(coco_export_text(sets, as_catalog(catalog)));
  });
}

ts_status ts_eval_detections(const char* detections_json,
                             const char* ground_truth_coco_json,
                             double iou_threshold, double score_threshold,
                             char** out_result_json) {
  if (!detections_json || !ground_truth_coco_json || !out_result_json)
    return fail(TS_ERROR_INVALID_ARGUMENT, "ts_eval_detections: NULL argument");
  return guarded([&] {
    const CocoGroundTruth gt = parse_coco_ground_truth(ground_truth_coco_json);
    const std::vector<Detection> dets = parse_coco_detections(detections_json);
    const EvalResult result = evaluate_all(dets, gt.boxes, gt.category_count,
                                           iou_threshold, score_threshold);
    *out_result_json = alloc_string(result.to_json_text());
  });
}

ts_status ts_scale_optimize(ts_detector_fn objective, void* user_data,
                            const char* search_config_json,
                            char** out_result_json) {
  if (!objective || !out_result_json)
    return fail(TS_ERROR_INVALID_ARGUMENT, "ts_scale_optimize: NULL argument");
  return guarded([&] {
    ScaleSearchConfig cfg;
    if (search_config_json && search_config_json[0] != '\0')
      cfg = ScaleSearchConfig::from_json_text(search_config_json);
    auto wrapped = [&](double scale) {
      double f1 = 0.0;
      const ts_status rc = objective(scale, &f1, user_data);
      if (rc != TS_OK)
        throw DetectorError("detector callback failed at scale " +
                            std::to_string(scale));
      return f1;
    };
    const ScaleOptResult result = optimize_scale(wrapped, cfg);
    *out_result_json = alloc_string(result.to_json_text());
  });
}

ts_status ts_scale_labels_generate(const ts_catalog* catalog,
                                   const char* params_json,
                                   const char* scene_config_json, int count,
                                   double s_min, double s_max,
                                   uint64_t master_seed, const char* out_dir,
                                   char** out_labels_json) {
  if (!catalog || !out_labels_json)
    return fail(TS_ERROR_INVALID_ARGUMENT, "ts_scale_labels_generate: NULL argument");
  return guarded([&] {
    const std::vector<LabeledScene> labeled = generate_scale_labels(
        as_catalog(catalog), params_from_arg(params_json),
        scene_config_from_arg(scene_config_json), count, s_min, s_max,
        master_seed);
    std::vector<ScaleLabel> labels;
    labels.reserve(labeled.size());
    for (const LabeledScene& item : labeled) labels.push_back(item.label);
    const std::string labels_text = scale_labels_to_json_text(labels);
    if (out_dir && out_dir[0] != '\0') {
      namespace fs = std::filesystem;
      std::error_code ec;
      fs::create_directories(out_dir, ec);
      if (ec) throw IoError(std::string("cannot create ") + out_dir);
      for (const LabeledScene& item : labeled) {
        const fs::path path =
            fs::path(out_dir) / scene_file_name(item.scene.scene_id);
        write_text_file(path.string(), item.scene.to_json_text());
      }
      write_text_file((fs::path(out_dir) / "scale_labels.json").string(),
                      labels_text);
    }
    *out_labels_json = alloc_string(labels_text);
  });
}

ts_status ts_rescale_manifest(const char* image_files_json, double factor,
                              char** out_manifest_json) {
  if (!image_files_json || !out_manifest_json)
    return fail(TS_ERROR_INVALID_ARGUMENT, "ts_rescale_manifest: NULL argument");
  return guarded([&] {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(image_files_json);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("image file list: ") + e.what());
    }
    if (!j.is_array()) throw ParseError("image file list must be a JSON array");
    std::vector<std::string> files;
    for (const auto& item : j) {
      if (!item.is_string()) throw ParseError("image file list must hold strings");
      files.push_back(item.get<std::string>());
    }
    *out_manifest_json = alloc_string(constant_rescale_manifest_text(files, factor));
  });
}

}  // extern "C"
