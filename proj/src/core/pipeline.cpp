#include "pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <mutex>
#include <thread>

#include "json.hpp"

#include "coco.hpp"
#include "errors.hpp"
#include "io_util.hpp"

namespace termstrip {
namespace {

using nlohmann::json;

// Shuffle stream index for the split assignment; far above any scene index so
// it can never collide with a per-scene stream of the same master seed.
constexpr std::uint64_t kSplitShuffleStream = 0x73706c6974ULL;

json split_to_json(const SplitFractions& s) {
  return json{{"train", s.train}, {"val", s.val}, {"test", s.test}};
}

SplitFractions split_from_json(const json& j) {
  SplitFractions s;
  if (j.contains("train")) s.train = j.at("train").get<double>();
  if (j.contains("val")) s.val = j.at("val").get<double>();
  if (j.contains("test")) s.test = j.at("test").get<double>();
  return s;
}

json config_to_json(const PipelineConfig& c) {
  return json{{"catalog", c.catalog_path},
              {"count", c.count},
              {"generation", json::parse(c.generation.to_json_text())},
              {"master_seed", c.master_seed},
              {"min_area_px", c.min_area_px},
              {"out_dir", c.out_dir},
              {"scene", json::parse(c.scene.to_json_text())},
              {"split", split_to_json(c.split)},
              {"workers", c.workers}};
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  if (!j.is_object()) throw ParseError("pipeline config must be a JSON object");
  if (j.contains("catalog")) c.catalog_path = j.at("catalog").get<std::string>();
  if (j.contains("count")) c.count = j.at("count").get<int>();
  if (j.contains("generation"))
    c.generation = GenerationParams::from_json_text(j.at("generation").dump());
  if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("min_area_px")) c.min_area_px = j.at("min_area_px").get<double>();
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("scene")) c.scene = SceneConfig::from_json_text(j.at("scene").dump());
  if (j.contains("split")) c.split = split_from_json(j.at("split"));
  if (j.contains("workers")) c.workers = j.at("workers").get<int>();
  return c;
}

json record_to_json(const SceneRecord& r) {
  return json{{"annotation_file", r.annotation_file},
              {"object_count", r.object_count},
              {"scene_file", r.scene_file},
              {"scene_id", r.scene_id},
              {"seed", r.seed},
              {"split", r.split},
              {"strip_length_mm", r.strip_length_mm}};
}

SceneRecord record_from_json(const json& j) {
  SceneRecord r;
  r.annotation_file = j.at("annotation_file").get<std::string>();
  r.object_count = j.at("object_count").get<int>();
  r.scene_file = j.at("scene_file").get<std::string>();
  r.scene_id = j.at("scene_id").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.split = j.at("split").get<std::string>();
  r.strip_length_mm = j.at("strip_length_mm").get<double>();
  return r;
}

std::string indexed_name(const char* prefix, int index) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%06d.json", prefix, index);
  return buf;
}

}  // namespace

void PipelineConfig::validate() const {
  if (catalog_path.empty()) throw ValidationError("pipeline: catalog path is empty");
  if (out_dir.empty()) throw ValidationError("pipeline: out_dir is empty");
  if (count < 1) throw ValidationError("pipeline: count must be >= 1");
  if (workers < 0) throw ValidationError("pipeline: workers must be >= 0");
  if (min_area_px < 0.0) throw ValidationError("pipeline: min_area_px must be >= 0");
  if (split.train < 0.0 || split.val < 0.0 || split.test < 0.0)
    throw ValidationError("pipeline: split fractions must be >= 0");
  const double sum = split.train + split.val + split.test;
  if (std::abs(sum - 1.0) > 1e-9)
    throw ValidationError("pipeline: split fractions must sum to 1");
  generation.validate();
  scene.validate();
}

std::string PipelineConfig::to_json_text() const {
  return config_to_json(*this).dump(2);
}

PipelineConfig PipelineConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("pipeline config: ") + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const json::exception& e) {
    throw ParseError(std::string("pipeline config: ") + e.what());
  }
}

SplitCounts split_counts(int count, const SplitFractions& split) {
  SplitCounts c;
  c.train = static_cast<int>(std::floor(count * split.train));
  c.val = static_cast<int>(std::floor(count * split.val));
  c.test = static_cast<int>(std::floor(count * split.test));
  c.train += count - (c.train + c.val + c.test);  // remainder to train
  return c;
}

std::vector<int> split_assignment(int count, const SplitFractions& split,
                                  std::uint64_t master_seed) {
  const SplitCounts sizes = split_counts(count, split);
  std::vector<int> order(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) order[static_cast<std::size_t>(i)] = i;
  CounterRng rng(derive_stream(master_seed, kSplitShuffleStream));
  for (int i = count - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[static_cast<std::size_t>(i)], order[j]);
  }
  std::vector<int> assignment(static_cast<std::size_t>(count), 0);
  for (int i = 0; i < count; ++i) {
    const int scene = order[static_cast<std::size_t>(i)];
    const int split_index = i < sizes.train ? 0 : (i < sizes.train + sizes.val ? 1 : 2);
    assignment[static_cast<std::size_t>(scene)] = split_index;
  }
  return assignment;
}

const char* split_name(int split_index) {
  switch (split_index) {
    case 0: return "train";
    case 1: return "val";
    case 2: return "test";
    default: throw ValidationError("split index out of range");
  }
}

CorpusStats corpus_stats(const Catalog& catalog,
                         const std::vector<AnnotationSet>& sets,
                         const std::vector<double>& strip_lengths,
                         const std::map<std::string, int>& split_sizes) {
  if (sets.empty()) throw ValidationError("corpus stats: no scenes");
  if (strip_lengths.size() != sets.size())
    throw ValidationError("corpus stats: strip length list does not match scenes");

  CorpusStats s;
  s.scene_count = static_cast<int>(sets.size());
  s.class_counts.assign(static_cast<std::size_t>(catalog.class_count()), 0);
  s.class_image_counts.assign(static_cast<std::size_t>(catalog.class_count()), 0);

  double sum = 0.0, sum_sq = 0.0;
  std::vector<char> seen;
  for (const AnnotationSet& set : sets) {
    seen.assign(s.class_counts.size(), 0);
    for (const GroundTruthObject& obj : set.objects) {
      if (obj.class_id < 0 || obj.class_id >= catalog.class_count())
        throw ValidationError("corpus stats: class id out of range");
      ++s.class_counts[static_cast<std::size_t>(obj.class_id)];
      seen[static_cast<std::size_t>(obj.class_id)] = 1;
    }
    for (std::size_t c = 0; c < seen.size(); ++c)
      if (seen[c]) ++s.class_image_counts[c];
    const auto n = static_cast<double>(set.objects.size());
    s.total_objects += static_cast<long long>(set.objects.size());
    sum += n;
    sum_sq += n * n;
  }
  s.mean_objects = sum / s.scene_count;
  const double var = sum_sq / s.scene_count - s.mean_objects * s.mean_objects;
  s.std_objects = std::sqrt(std::max(0.0, var));

  for (std::size_t c = 0; c < s.class_image_counts.size(); ++c) {
    if (static_cast<double>(s.class_image_counts[c]) > 0.4 * s.scene_count)
      s.overrepresented.push_back(static_cast<int>(c));
  }

  s.min_strip_length_mm = strip_lengths.front();
  s.max_strip_length_mm = strip_lengths.front();
  double len_sum = 0.0;
  for (double len : strip_lengths) {
    len_sum += len;
    s.min_strip_length_mm = std::min(s.min_strip_length_mm, len);
    s.max_strip_length_mm = std::max(s.max_strip_length_mm, len);
  }
  s.mean_strip_length_mm = len_sum / static_cast<double>(strip_lengths.size());
  s.split_sizes = split_sizes;
  return s;
}

std::string CorpusStats::to_json_text(const Catalog& catalog) const {
  json classes = json::array();
  for (std::size_t c = 0; c < class_counts.size(); ++c) {
    const int cls = static_cast<int>(c);
    const double fraction =
        scene_count > 0 ? static_cast<double>(class_image_counts[c]) / scene_count : 0.0;
    classes.push_back(json{
        {"class_id", cls},
        {"count", class_counts[c]},
        {"image_count", class_image_counts[c]},
        {"image_fraction", fraction},
        {"name", catalog.class_name(cls)},
        {"overrepresented",
         std::find(overrepresented.begin(), overrepresented.end(), cls) !=
             overrepresented.end()}});
  }
  json over = json::array();
  for (int cls : overrepresented) over.push_back(catalog.class_name(cls));
  json splits = json::object();
  for (const auto& [name, size] : split_sizes) splits[name] = size;
  const json j{{"classes", classes},
               {"objects_per_image", json{{"mean", mean_objects}, {"std", std_objects}}},
               {"overrepresented", over},
               {"scene_count", scene_count},
               {"split_sizes", splits},
               {"strip_length_mm", json{{"max", max_strip_length_mm},
                                        {"mean", mean_strip_length_mm},
                                        {"min", min_strip_length_mm}}},
               {"total_objects", total_objects}};
  return j.dump(2);
}

std::string DatasetManifest::to_json_text() const {
  json scene_list = json::array();
  for (const SceneRecord& r : scenes) scene_list.push_back(record_to_json(r));
  const json j{{"config", config_to_json(config)},
               {"scenes", scene_list},
               {"schema_version", 1},
               {"stats", json::parse(stats_json)}};
  return j.dump(2);
}

DatasetManifest DatasetManifest::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("dataset manifest: ") + e.what());
  }
  try {
    DatasetManifest m;
    m.config = config_from_json(j.at("config"));
    for (const json& r : j.at("scenes")) m.scenes.push_back(record_from_json(r));
    m.stats_json = j.at("stats").dump(2);
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("dataset manifest: ") + e.what());
  }
}

DatasetManifest build_dataset(const PipelineConfig& config) {
  config.validate();
  const Catalog catalog = Catalog::load(config.catalog_path);

  namespace fs = std::filesystem;
  std::error_code ec;
  for (const char* sub : {"", "scenes", "annotations", "coco"}) {
    fs::create_directories(fs::path(config.out_dir) / sub, ec);
    if (ec) throw IoError("cannot create " + (fs::path(config.out_dir) / sub).string());
  }

  const std::vector<int> assignment =
      split_assignment(config.count, config.split, config.master_seed);

  const auto count = static_cast<std::size_t>(config.count);
  std::vector<AnnotationSet> annotations(count);
  std::vector<SceneRecord> records(count);

  int workers = config.workers > 0
                    ? config.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, config.count);

  std::atomic<int> next_index{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto work = [&]() {
    for (;;) {
      const int index = next_index.fetch_add(1);
      if (index >= config.count) return;
      try {
        const SceneSpec scene =
            make_scene(catalog, config.generation, config.scene,
                       config.master_seed, index);
        AnnotationSet ann = annotate_scene(catalog, scene, config.min_area_px);

        SceneRecord rec;
        rec.scene_id = index;
        rec.seed = scene.seed;
        rec.split = split_name(assignment[static_cast<std::size_t>(index)]);
        rec.scene_file = std::string("scenes/") + indexed_name("scene", index);
        rec.annotation_file =
            std::string("annotations/") + indexed_name("annotation", index);
        rec.object_count = static_cast<int>(ann.objects.size());
        rec.strip_length_mm = scene.strip.total_length_mm;

        write_text_file((fs::path(config.out_dir) / rec.scene_file).string(),
                        scene.to_json_text());
        write_text_file((fs::path(config.out_dir) / rec.annotation_file).string(),
                        ann.to_json_text());

        annotations[static_cast<std::size_t>(index)] = std::move(ann);
        records[static_cast<std::size_t>(index)] = std::move(rec);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next_index.store(config.count);
        return;
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::map<std::string, int> split_sizes{{"train", 0}, {"val", 0}, {"test", 0}};
  std::vector<double> strip_lengths(count);
  for (std::size_t i = 0; i < count; ++i) {
    ++split_sizes[records[i].split];
    strip_lengths[i] = records[i].strip_length_mm;
  }

  for (int split_index = 0; split_index < 3; ++split_index) {
    std::vector<AnnotationSet> subset;
    for (std::size_t i = 0; i < count; ++i)
      if (assignment[i] == split_index) subset.push_back(annotations[i]);
    const std::string path = (fs::path(config.out_dir) / "coco" /
                              (std::string("instances_") + split_name(split_index) +
                               ".json"))
                                 .string();
    write_text_file(path, coco_export_text(subset, catalog));
  }

  DatasetManifest manifest;
  manifest.config = config;
  // Execution knob, not dataset content: normalize so the same data yields
  // the same manifest bytes regardless of parallelism.
  manifest.config.workers = 0;
  manifest.scenes.assign(records.begin(), records.end());
  manifest.stats_json =
      corpus_stats(catalog, annotations, strip_lengths, split_sizes)
          .to_json_text(catalog);
  write_text_file((fs::path(config.out_dir) / "manifest.json").string(),
                  manifest.to_json_text());
  return manifest;
}

namespace {

CorpusStats load_dataset_stats(const std::string& dataset_dir, Catalog* out_catalog) {
  namespace fs = std::filesystem;
  const DatasetManifest manifest = DatasetManifest::from_json_text(
      read_text_file((fs::path(dataset_dir) / "manifest.json").string()));
  if (manifest.scenes.empty())
    throw ValidationError("dataset stats: manifest lists no scenes");

  Catalog catalog = Catalog::load(manifest.config.catalog_path);
  std::vector<AnnotationSet> sets;
  std::vector<double> strip_lengths;
  std::map<std::string, int> split_sizes{{"train", 0}, {"val", 0}, {"test", 0}};
  sets.reserve(manifest.scenes.size());
  for (const SceneRecord& rec : manifest.scenes) {
    sets.push_back(AnnotationSet::from_json_text(
        read_text_file((fs::path(dataset_dir) / rec.annotation_file).string())));
    strip_lengths.push_back(rec.strip_length_mm);
    ++split_sizes[rec.split];
  }
  CorpusStats stats = corpus_stats(catalog, sets, strip_lengths, split_sizes);
  if (out_catalog) *out_catalog = std::move(catalog);
  return stats;
}

}  // namespace

CorpusStats dataset_stats(const std::string& dataset_dir) {
  return load_dataset_stats(dataset_dir, nullptr);
}

std::string dataset_stats_text(const std::string& dataset_dir) {
  Catalog catalog;
  const CorpusStats stats = load_dataset_stats(dataset_dir, &catalog);
  return stats.to_json_text(catalog);
}

}  // namespace termstrip
