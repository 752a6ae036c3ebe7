#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "annotate.hpp"
#include "catalog.hpp"
#include "scenegen.hpp"
#include "stripgen.hpp"

namespace termstrip {

struct SplitFractions {
  double train = 0.79;
  double val = 0.01;
  double test = 0.20;
};

struct PipelineConfig {
  std::string catalog_path;
  GenerationParams generation;  // per-scene seed is derived, the field is ignored
  SceneConfig scene;
  int count = 1000;
  SplitFractions split;
  std::string out_dir;
  std::uint64_t master_seed = 0;
  int workers = 0;  // 0: one per hardware thread
  double min_area_px = 100.0;

  void validate() const;
  std::string to_json_text() const;
  static PipelineConfig from_json_text(const std::string& text);
};

struct SplitCounts {
  int train = 0;
  int val = 0;
  int test = 0;
};

// Floor of count x fraction per split; the remainder goes to train.
SplitCounts split_counts(int count, const SplitFractions& split);

// Deterministic split per scene id (0 train, 1 val, 2 test): scene ids are
// shuffled on a dedicated stream of master_seed and dealt out in
// train, val, test order with split_counts sizes.
std::vector<int> split_assignment(int count, const SplitFractions& split,
                                  std::uint64_t master_seed);

const char* split_name(int split_index);

struct SceneRecord {
  int scene_id = 0;
  std::uint64_t seed = 0;
  std::string split;
  std::string scene_file;       // relative to the dataset root
  std::string annotation_file;  // relative to the dataset root
  int object_count = 0;
  double strip_length_mm = 0.0;
};

struct CorpusStats {
  int scene_count = 0;
  long long total_objects = 0;
  double mean_objects = 0.0;
  double std_objects = 0.0;  // population standard deviation
  std::vector<long long> class_counts;        // per class id
  std::vector<long long> class_image_counts;  // images containing the class
  std::vector<int> overrepresented;           // classes in more than 40% of images
  double mean_strip_length_mm = 0.0;
  double min_strip_length_mm = 0.0;
  double max_strip_length_mm = 0.0;
  std::map<std::string, int> split_sizes;

  std::string to_json_text(const Catalog& catalog) const;
};

CorpusStats corpus_stats(const Catalog& catalog,
                         const std::vector<AnnotationSet>& sets,
                         const std::vector<double>& strip_lengths,
                         const std::map<std::string, int>& split_sizes);

struct DatasetManifest {
  PipelineConfig config;
  std::vector<SceneRecord> scenes;
  std::string stats_json;

  std::string to_json_text() const;
  static DatasetManifest from_json_text(const std::string& text);
};

// Generates and annotates `config.count` scenes with a worker pool, then
// writes under config.out_dir:
//   scenes/scene_NNNNNN.json          one SceneSpec per scene
//   annotations/annotation_NNNNNN.json one AnnotationSet per scene
//   coco/instances_{train,val,test}.json
//   manifest.json                      config, per-scene records, stats
// Output bytes depend only on the config (not on worker count or timing).
DatasetManifest build_dataset(const PipelineConfig& config);

// Recomputes CorpusStats for a dataset directory from its manifest and
// annotation files. Throws ValidationError when the manifest lists no scenes.
CorpusStats dataset_stats(const std::string& dataset_dir);

// Same, rendered to JSON with class names from the manifest's catalog.
std::string dataset_stats_text(const std::string& dataset_dir);

}  // namespace termstrip
