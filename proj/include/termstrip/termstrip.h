#ifndef TERMSTRIP_TERMSTRIP_H
#define TERMSTRIP_TERMSTRIP_H

/* C interface to the terminal-strip synthetic dataset toolkit.
 *
 * Conventions:
 *  - Every function returns a ts_status; TS_OK is 0. On failure the
 *    thread-local message from ts_last_error() describes the problem.
 *  - Structured data crosses the boundary as JSON text. Returned strings
 *    (out parameters of type char**) are heap-allocated; release them with
 *    ts_string_free. Output parameters are written only on TS_OK.
 *  - Handles returned by ts_catalog_* stay valid until ts_catalog_free.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TS_API __declspec(dllexport)
#else
#define TS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ts_status {
  TS_OK = 0,
  TS_ERROR_INVALID_ARGUMENT = 1,
  TS_ERROR_PARSE = 2,
  TS_ERROR_VALIDATION = 3,
  TS_ERROR_IO = 4,
  TS_ERROR_GENERATION = 5,
  TS_ERROR_NUMERIC = 6,
  TS_ERROR_DETECTOR = 7
} ts_status;

/* Library semantic version, a static string. */
TS_API const char* ts_version(void);

/* Message of the last failure on the calling thread; empty string if the
 * last call succeeded. The buffer is owned by the library. */
TS_API const char* ts_last_error(void);

TS_API void ts_string_free(char* text);

typedef struct ts_catalog ts_catalog;

TS_API ts_status ts_catalog_load(const char* path, ts_catalog** out_catalog);
TS_API ts_status ts_catalog_parse(const char* json_text, ts_catalog** out_catalog);
TS_API void ts_catalog_free(ts_catalog* catalog);
TS_API int ts_catalog_part_count(const ts_catalog* catalog);
TS_API int ts_catalog_class_count(const ts_catalog* catalog);

/* Generates one strip configuration. params_json may be NULL or "{}" for
 * defaults; the seed argument overrides any seed in params_json. */
TS_API ts_status ts_strip_generate(const ts_catalog* catalog,
                                   const char* params_json, uint64_t seed,
                                   char** out_strip_json);

/* Full scene: strip + camera + lighting + background, deterministic in
 * (master_seed, scene_index). */
TS_API ts_status ts_scene_generate(const ts_catalog* catalog,
                                   const char* params_json,
                                   const char* scene_config_json,
                                   uint64_t master_seed, int scene_index,
                                   char** out_scene_json);

/* Analytic ground-truth boxes for a scene document. min_area_px < 0 selects
 * the default threshold. */
TS_API ts_status ts_scene_annotate(const ts_catalog* catalog,
                                   const char* scene_json, double min_area_px,
                                   char** out_annotation_json);

/* Rasterizes the scene's part boxes to an RGB PNG at png_path. */
TS_API ts_status ts_scene_preview_png(const ts_catalog* catalog,
                                      const char* scene_json,
                                      const char* png_path);

/* Builds a full dataset directory (scenes, annotations, COCO files,
 * manifest) from a pipeline config document. Returns the manifest. */
TS_API ts_status ts_dataset_build(const char* pipeline_config_json,
                                  char** out_manifest_json);

/* Recomputes corpus statistics for a built dataset directory. */
TS_API ts_status ts_dataset_stats(const char* dataset_dir, char** out_stats_json);

/* Exports annotation documents (JSON texts, one per scene) as one COCO
 * ground-truth document. */
TS_API ts_status ts_coco_export(const ts_catalog* catalog,
                                const char* const* annotation_jsons,
                                size_t annotation_count, char** out_coco_json);

/* Scores a COCO results array against a COCO ground-truth document:
 * mAP@50, mAP@[50:95], F1/precision/recall at the given thresholds, and a
 * confusion matrix. */
TS_API ts_status ts_eval_detections(const char* detections_json,
                                    const char* ground_truth_coco_json,
                                    double iou_threshold, double score_threshold,
                                    char** out_result_json);

/* Objective callback for ts_scale_optimize: writes the detector's F1 at the
 * given preprocessing scale to *out_f1. Any nonzero return aborts the search
 * and surfaces as TS_ERROR_DETECTOR. */
typedef ts_status (*ts_detector_fn)(double scale, double* out_f1, void* user_data);

/* Bayesian-optimization search for the preprocessing scale that maximizes
 * the objective. search_config_json may be NULL or "{}" for defaults. */
TS_API ts_status ts_scale_optimize(ts_detector_fn objective, void* user_data,
                                   const char* search_config_json,
                                   char** out_result_json);

/* Scale-regression training pairs. Writes scene_NNNNNN.json files plus
 * scale_labels.json under out_dir (created if needed) when out_dir is
 * non-NULL, and returns the labels document. */
TS_API ts_status ts_scale_labels_generate(const ts_catalog* catalog,
                                          const char* params_json,
                                          const char* scene_config_json,
                                          int count, double s_min, double s_max,
                                          uint64_t master_seed,
                                          const char* out_dir,
                                          char** out_labels_json);

/* Manifest applying one constant rescale factor to a JSON array of image
 * file names; box coordinates multiply by the same factor. */
TS_API ts_status ts_rescale_manifest(const char* image_files_json, double factor,
                                     char** out_manifest_json);

#ifdef __cplusplus
}
#endif

#endif /* TERMSTRIP_TERMSTRIP_H */
