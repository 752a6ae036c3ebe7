// Command-line front end. Talks to the library exclusively through the C API
// in termstrip/termstrip.h; JSON goes to standard output, logs and progress
// to standard error. Exit codes: 0 success, 1 validation/input error,
// 2 runtime error.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "termstrip/termstrip.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct StringFree {
  void operator()(char* p) const { ts_string_free(p); }
};
using ApiString = std::unique_ptr<char, StringFree>;

struct CatalogFree {
  void operator()(ts_catalog* c) const { ts_catalog_free(c); }
};
using CatalogHandle = std::unique_ptr<ts_catalog, CatalogFree>;

int exit_code_for(ts_status status) {
  switch (status) {
    case TS_OK:
      return 0;
    case TS_ERROR_INVALID_ARGUMENT:
    case TS_ERROR_PARSE:
    case TS_ERROR_VALIDATION:
      return 1;
    default:
      return 2;
  }
}

// Exits the process on failure; the spec for each subcommand is simple
// enough that there is nothing to unwind.
void check(ts_status status, const char* context) {
  if (status == TS_OK) return;
  std::fprintf(stderr, "error: %s: %s\n", context, ts_last_error());
  std::exit(exit_code_for(status));
}

std::string read_file(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) {
    std::fprintf(stderr, "error: cannot open %s\n", path.c_str());
    std::exit(2);
  }
  std::string text;
  char buf[65536];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) text.append(buf, n);
  const bool bad = std::ferror(f) != 0;
  std::fclose(f);
  if (bad) {
    std::fprintf(stderr, "error: read failed for %s\n", path.c_str());
    std::exit(2);
  }
  return text;
}

void write_file(const std::string& path, const std::string& text) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) {
    std::fprintf(stderr, "error: cannot write %s\n", path.c_str());
    std::exit(2);
  }
  const std::size_t written = std::fwrite(text.data(), 1, text.size(), f);
  if (std::fclose(f) != 0 || written != text.size()) {
    std::fprintf(stderr, "error: short write to %s\n", path.c_str());
    std::exit(2);
  }
}

void emit(const std::string& text, const std::optional<std::string>& out_file) {
  if (out_file) {
    write_file(*out_file, text);
    std::fprintf(stderr, "wrote %s\n", out_file->c_str());
  } else {
    std::fputs(text.c_str(), stdout);
    std::fputc('\n', stdout);
  }
}

CatalogHandle load_catalog(const std::string& path) {
  ts_catalog* raw = nullptr;
  check(ts_catalog_load(path.c_str(), &raw), "loading catalog");
  return CatalogHandle(raw);
}

json parse_json_or_die(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    std::fprintf(stderr, "error: %s is not valid JSON\n", what);
    std::exit(1);
  }
  return j;
}

std::vector<std::string> sorted_json_files(const std::string& dir) {
  std::vector<std::string> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path().string());
  }
  if (ec) {
    std::fprintf(stderr, "error: cannot list %s\n", dir.c_str());
    std::exit(2);
  }
  std::sort(files.begin(), files.end());
  return files;
}

// ---------------------------------------------------------------------------
// catalog validate

int cmd_catalog_validate(const std::string& path) {
  ts_catalog* raw = nullptr;
  const ts_status status = ts_catalog_load(path.c_str(), &raw);
  json report;
  report["valid"] = status == TS_OK;
  if (status == TS_OK) {
    CatalogHandle catalog(raw);
    report["parts"] = ts_catalog_part_count(catalog.get());
    report["classes"] = ts_catalog_class_count(catalog.get());
  } else {
    report["error"] = ts_last_error();
  }
  std::fputs(report.dump(2).c_str(), stdout);
  std::fputc('\n', stdout);
  return status == TS_OK ? 0 : 1;
}

// ---------------------------------------------------------------------------
// generate

struct GenerateOptions {
  std::optional<std::string> config_file;
  std::optional<std::string> catalog;
  std::optional<std::string> out_dir;
  std::optional<int> count;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

int cmd_generate(const GenerateOptions& opt) {
  json config = json::object();
  if (opt.config_file)
    config = parse_json_or_die(read_file(*opt.config_file), "pipeline config");

  // Precedence: flags over environment over config file.
  if (const char* dir = std::getenv("TERMSTRIP_OUT_DIR"); dir && *dir)
    config["out_dir"] = dir;
  if (const char* workers = std::getenv("TERMSTRIP_WORKERS"); workers && *workers)
    config["workers"] = std::atoi(workers);
  if (opt.catalog) config["catalog"] = *opt.catalog;
  if (opt.out_dir) config["out_dir"] = *opt.out_dir;
  if (opt.count) config["count"] = *opt.count;
  if (opt.seed) config["master_seed"] = *opt.seed;
  if (opt.workers) config["workers"] = *opt.workers;

  std::fprintf(stderr, "building dataset (%d scenes) into %s\n",
               config.value("count", 1000),
               config.value("out_dir", std::string("?")).c_str());
  ApiString manifest_text;
  {
    char* raw = nullptr;
    check(ts_dataset_build(config.dump().c_str(), &raw), "building dataset");
    manifest_text.reset(raw);
  }

  const json manifest = parse_json_or_die(manifest_text.get(), "manifest");
  const std::string out_dir = manifest.at("config").at("out_dir").get<std::string>();
  json summary;
  summary["manifest"] = (fs::path(out_dir) / "manifest.json").string();
  summary["out_dir"] = out_dir;
  summary["scene_count"] = manifest.at("scenes").size();
  summary["split_sizes"] = manifest.at("stats").at("split_sizes");
  json coco = json::object();
  for (const char* split : {"train", "val", "test"})
    coco[split] =
        (fs::path(out_dir) / "coco" / (std::string("instances_") + split + ".json"))
            .string();
  summary["coco"] = coco;
  std::fputs(summary.dump(2).c_str(), stdout);
  std::fputc('\n', stdout);
  return 0;
}

// ---------------------------------------------------------------------------
// annotate

int cmd_annotate(const std::string& catalog_path,
                 const std::optional<std::string>& scene_file,
                 const std::optional<std::string>& scenes_dir, double min_area,
                 const std::optional<std::string>& out) {
  const CatalogHandle catalog = load_catalog(catalog_path);
  if (scene_file) {
    const std::string scene = read_file(*scene_file);
    char* raw = nullptr;
    check(ts_scene_annotate(catalog.get(), scene.c_str(), min_area, &raw),
          "annotating scene");
    ApiString text(raw);
    emit(text.get(), out);
    return 0;
  }

  if (!out) {
    std::fprintf(stderr, "error: --scenes requires --out DIR\n");
    return 1;
  }
  std::error_code ec;
  fs::create_directories(*out, ec);
  const std::vector<std::string> files = sorted_json_files(*scenes_dir);
  int written = 0;
  for (const std::string& file : files) {
    const std::string scene = read_file(file);
    char* raw = nullptr;
    check(ts_scene_annotate(catalog.get(), scene.c_str(), min_area, &raw),
          "annotating scene");
    ApiString text(raw);
    std::string name = fs::path(file).filename().string();
    if (name.rfind("scene_", 0) == 0) name = "annotation_" + name.substr(6);
    write_file((fs::path(*out) / name).string(), text.get());
    ++written;
  }
  std::fprintf(stderr, "annotated %d scenes into %s\n", written, out->c_str());
  json summary{{"annotations", written}, {"out_dir", *out}};
  std::fputs(summary.dump(2).c_str(), stdout);
  std::fputc('\n', stdout);
  return 0;
}

// ---------------------------------------------------------------------------
// export-coco

int cmd_export_coco(const std::string& catalog_path, const std::string& dir,
                    const std::optional<std::string>& out) {
  const CatalogHandle catalog = load_catalog(catalog_path);
  const std::vector<std::string> files = sorted_json_files(dir);
  std::vector<std::string> texts;
  texts.reserve(files.size());
  for (const std::string& file : files) texts.push_back(read_file(file));
  std::vector<const char*> pointers;
  pointers.reserve(texts.size());
  for (const std::string& text : texts) pointers.push_back(text.c_str());

  char* raw = nullptr;
  check(ts_coco_export(catalog.get(), pointers.data(), pointers.size(), &raw),
        "exporting COCO");
  ApiString text(raw);
  emit(text.get(), out);
  return 0;
}

// ---------------------------------------------------------------------------
// eval

int cmd_eval(const std::string& gt_file, const std::string& dets_file,
             double iou, double score, const std::optional<std::string>& out) {
  const std::string gt = read_file(gt_file);
  const std::string dets = read_file(dets_file);
  char* raw = nullptr;
  check(ts_eval_detections(dets.c_str(), gt.c_str(), iou, score, &raw),
        "evaluating detections");
  ApiString text(raw);

  const json result = parse_json_or_die(text.get(), "eval result");
  std::fprintf(stderr, "%-14s %s\n", "metric", "value");
  std::fprintf(stderr, "%-14s %.4f\n", "mAP@0.5", result.at("map_50").get<double>());
  std::fprintf(stderr, "%-14s %.4f\n", "mAP@[.5:.95]",
               result.at("map_5095").get<double>());
  std::fprintf(stderr, "%-14s %.4f\n", "precision",
               result.at("precision").get<double>());
  std::fprintf(stderr, "%-14s %.4f\n", "recall", result.at("recall").get<double>());
  std::fprintf(stderr, "%-14s %.4f\n", "f1", result.at("f1").get<double>());
  std::fprintf(stderr, "%-14s %lld/%lld/%lld\n", "tp/fp/fn",
               result.at("tp").get<long long>(), result.at("fp").get<long long>(),
               result.at("fn").get<long long>());

  if (out) write_file(*out, text.get());
  std::fputs(text.get(), stdout);
  std::fputc('\n', stdout);
  return 0;
}

// ---------------------------------------------------------------------------
// scale-opt

struct DetectorContext {
  std::string command;
  std::string image_file;
  int image_id = 0;
  std::string gt_json;  // single-image COCO document
  double iou = 0.5;
  double score = 0.5;
  std::string error;
  int evaluations = 0;
};

// Runs `command` through /bin/sh, feeding `input` on stdin and collecting
// stdout. Returns false (with ctx-style message in *error) on spawn failure,
// nonzero exit, or signal.
bool run_subprocess(const std::string& command, const std::string& input,
                    std::string* output, std::string* error) {
  int in_pipe[2] = {-1, -1};
  int out_pipe[2] = {-1, -1};
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) {
    *error = "pipe() failed";
    return false;
  }
  const pid_t pid = fork();
  if (pid < 0) {
    *error = "fork() failed";
    return false;
  }
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);

  std::size_t off = 0;
  bool write_ok = true;
  while (off < input.size()) {
    const ssize_t n = write(in_pipe[1], input.data() + off, input.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      write_ok = false;  // detector exited early; its status decides below
      break;
    }
    off += static_cast<std::size_t>(n);
  }
  close(in_pipe[1]);

  output->clear();
  char buf[65536];
  for (;;) {
    const ssize_t n = read(out_pipe[0], buf, sizeof(buf));
    if (n < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (n == 0) break;
    output->append(buf, static_cast<std::size_t>(n));
  }
  close(out_pipe[0]);

  int status = 0;
  if (waitpid(pid, &status, 0) < 0) {
    *error = "waitpid() failed";
    return false;
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    *error = WIFEXITED(status)
                 ? "detector exited with status " + std::to_string(WEXITSTATUS(status))
                 : "detector terminated by signal";
    return false;
  }
  if (!write_ok) {
    *error = "detector closed stdin before reading the request";
    return false;
  }
  return true;
}

ts_status detector_objective(double scale, double* out_f1, void* user_data) {
  auto* ctx = static_cast<DetectorContext*>(user_data);
  ++ctx->evaluations;

  const json request{{"image", ctx->image_file}, {"scale", scale}};
  std::string output;
  if (!run_subprocess(ctx->command, request.dump() + "\n", &output, &ctx->error))
    return TS_ERROR_DETECTOR;

  json dets = json::parse(output, nullptr, false);
  if (dets.is_discarded() || !dets.is_array()) {
    ctx->error = "detector output is not a JSON array";
    return TS_ERROR_DETECTOR;
  }
  // Accept evalkit-style entries (class_id) and COCO-style (category_id);
  // the image id is forced to the image under optimization.
  json results = json::array();
  for (const json& d : dets) {
    if (!d.is_object() || !d.contains("bbox") || !d.contains("score")) {
      ctx->error = "detector entry missing bbox/score";
      return TS_ERROR_DETECTOR;
    }
    const int category = d.contains("category_id")
                             ? d.at("category_id").get<int>()
                             : d.at("class_id").get<int>() + 1;
    results.push_back(json{{"image_id", ctx->image_id},
                           {"category_id", category},
                           {"bbox", d.at("bbox")},
                           {"score", d.at("score")}});
  }

  char* raw = nullptr;
  const ts_status rc = ts_eval_detections(results.dump().c_str(),
                                          ctx->gt_json.c_str(), ctx->iou,
                                          ctx->score, &raw);
  if (rc != TS_OK) {
    ctx->error = ts_last_error();
    return rc;
  }
  ApiString text(raw);
  const json result = json::parse(text.get(), nullptr, false);
  if (result.is_discarded()) {
    ctx->error = "unparseable eval result";
    return TS_ERROR_DETECTOR;
  }
  *out_f1 = result.at("f1").get<double>();
  return TS_OK;
}

int cmd_scale_opt(const std::string& gt_file, const std::string& images_file,
                  const std::string& detector_cmd,
                  const std::optional<std::string>& config_file, double iou,
                  double score, const std::string& out_dir) {
  const json gt = parse_json_or_die(read_file(gt_file), "ground truth");
  const json images = parse_json_or_die(read_file(images_file), "image list");
  if (!images.is_array()) {
    std::fprintf(stderr,
                 "error: image list must be a JSON array of {image_id, file}\n");
    return 1;
  }
  std::string search_config = "{}";
  if (config_file) search_config = read_file(*config_file);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::fprintf(stderr, "error: cannot create %s\n", out_dir.c_str());
    return 2;
  }

  json summary = json::array();
  for (const json& entry : images) {
    if (!entry.is_object() || !entry.contains("image_id") || !entry.contains("file")) {
      std::fprintf(stderr, "error: image entries need image_id and file\n");
      return 1;
    }
    const int image_id = entry.at("image_id").get<int>();
    const std::string file = entry.at("file").get<std::string>();

    // Single-image slice of the ground truth document.
    json slice;
    slice["categories"] = gt.value("categories", json::array());
    slice["images"] = json::array();
    for (const json& img : gt.value("images", json::array()))
      if (img.at("id").get<int>() == image_id) slice["images"].push_back(img);
    if (slice["images"].empty()) {
      std::fprintf(stderr, "error: image_id %d not present in %s\n", image_id,
                   gt_file.c_str());
      return 1;
    }
    slice["annotations"] = json::array();
    for (const json& ann : gt.value("annotations", json::array()))
      if (ann.at("image_id").get<int>() == image_id)
        slice["annotations"].push_back(ann);

    DetectorContext ctx;
    ctx.command = detector_cmd;
    ctx.image_file = file;
    ctx.image_id = image_id;
    ctx.gt_json = slice.dump();
    ctx.iou = iou;
    ctx.score = score;

    std::fprintf(stderr, "optimizing scale for image %d (%s)\n", image_id,
                 file.c_str());
    char* raw = nullptr;
    const ts_status rc =
        ts_scale_optimize(detector_objective, &ctx, search_config.c_str(), &raw);
    if (rc != TS_OK) {
      std::fprintf(stderr, "error: scale search for image %d: %s\n", image_id,
                   ctx.error.empty() ? ts_last_error() : ctx.error.c_str());
      return exit_code_for(rc);
    }
    ApiString text(raw);

    char name[64];
    std::snprintf(name, sizeof(name), "scale_opt_%06d.json", image_id);
    const std::string result_file = (fs::path(out_dir) / name).string();
    write_file(result_file, text.get());

    const json result = parse_json_or_die(text.get(), "scale-opt result");
    std::fprintf(stderr, "image %d: best_scale %.4f best_f1 %.4f (%d evaluations)\n",
                 image_id, result.at("best_scale").get<double>(),
                 result.at("best_f1").get<double>(), ctx.evaluations);
    summary.push_back(json{{"image_id", image_id},
                           {"file", file},
                           {"best_scale", result.at("best_scale")},
                           {"best_f1", result.at("best_f1")},
                           {"result_file", result_file}});
  }
  std::fputs(summary.dump(2).c_str(), stdout);
  std::fputc('\n', stdout);
  return 0;
}

// ---------------------------------------------------------------------------
// scale-labels

int cmd_scale_labels(const std::string& catalog_path, int count, double s_min,
                     double s_max, std::uint64_t seed,
                     const std::optional<std::string>& params_file,
                     const std::optional<std::string>& scene_config_file,
                     const std::optional<std::string>& out_dir) {
  const CatalogHandle catalog = load_catalog(catalog_path);
  const std::string params = params_file ? read_file(*params_file) : "{}";
  const std::string scene_cfg =
      scene_config_file ? read_file(*scene_config_file) : "{}";
  char* raw = nullptr;
  check(ts_scale_labels_generate(catalog.get(), params.c_str(), scene_cfg.c_str(),
                                 count, s_min, s_max, seed,
                                 out_dir ? out_dir->c_str() : nullptr, &raw),
        "generating scale labels");
  ApiString text(raw);
  if (out_dir)
    std::fprintf(stderr, "wrote %d scenes and scale_labels.json to %s\n", count,
                 out_dir->c_str());
  std::fputs(text.get(), stdout);
  std::fputc('\n', stdout);
  return 0;
}

// ---------------------------------------------------------------------------
// stats / preview

int cmd_stats(const std::string& dataset_dir) {
  char* raw = nullptr;
  check(ts_dataset_stats(dataset_dir.c_str(), &raw), "computing dataset stats");
  ApiString text(raw);
  std::fputs(text.get(), stdout);
  std::fputc('\n', stdout);
  return 0;
}

int cmd_preview(const std::string& catalog_path, const std::string& scene_file,
                const std::string& out_png) {
  const CatalogHandle catalog = load_catalog(catalog_path);
  const std::string scene = read_file(scene_file);
  check(ts_scene_preview_png(catalog.get(), scene.c_str(), out_png.c_str()),
        "rendering preview");
  std::fprintf(stderr, "wrote %s\n", out_png.c_str());
  json summary{{"image", out_png}};
  std::fputs(summary.dump(2).c_str(), stdout);
  std::fputc('\n', stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGPIPE, SIG_IGN);

  CLI::App app{"Synthetic terminal-strip dataset toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ts_version()));

  int rc = 0;

  // catalog validate
  auto* catalog_cmd = app.add_subcommand("catalog", "Catalog utilities");
  catalog_cmd->require_subcommand(1);
  auto* validate_cmd =
      catalog_cmd->add_subcommand("validate", "Validate a catalog JSON file");
  static std::string validate_path;
  validate_cmd->add_option("path", validate_path, "Catalog JSON file")->required();
  validate_cmd->callback([&] { rc = cmd_catalog_validate(validate_path); });

  // generate
  auto* generate_cmd =
      app.add_subcommand("generate", "Build a dataset (scenes, annotations, COCO)");
  static GenerateOptions gen_opt;
  static std::string gen_config, gen_catalog, gen_out;
  static int gen_count = 0, gen_workers = 0;
  static std::uint64_t gen_seed = 0;
  auto* o_config = generate_cmd->add_option("--config", gen_config,
                                            "Pipeline config JSON file");
  auto* o_catalog = generate_cmd->add_option("--catalog", gen_catalog,
                                             "Catalog path override");
  auto* o_out = generate_cmd->add_option("--out", gen_out, "Output directory");
  auto* o_count = generate_cmd->add_option("--count", gen_count, "Scene count");
  auto* o_seed = generate_cmd->add_option("--seed", gen_seed, "Master seed");
  auto* o_workers =
      generate_cmd->add_option("--workers", gen_workers, "Worker thread count");
  generate_cmd->callback([&] {
    if (*o_config) gen_opt.config_file = gen_config;
    if (*o_catalog) gen_opt.catalog = gen_catalog;
    if (*o_out) gen_opt.out_dir = gen_out;
    if (*o_count) gen_opt.count = gen_count;
    if (*o_seed) gen_opt.seed = gen_seed;
    if (*o_workers) gen_opt.workers = gen_workers;
    rc = cmd_generate(gen_opt);
  });

  // annotate
  auto* annotate_cmd =
      app.add_subcommand("annotate", "Compute ground-truth boxes for scenes");
  static std::string ann_catalog, ann_scene, ann_scenes, ann_out;
  static double ann_min_area = -1.0;
  annotate_cmd->add_option("--catalog", ann_catalog, "Catalog JSON file")->required();
  auto* o_scene = annotate_cmd->add_option("--scene", ann_scene, "One scene JSON file");
  auto* o_scenes =
      annotate_cmd->add_option("--scenes", ann_scenes, "Directory of scene files");
  auto* o_ann_out = annotate_cmd->add_option(
      "--out", ann_out, "Output file (single scene) or directory (--scenes)");
  annotate_cmd->add_option("--min-area", ann_min_area,
                           "Minimum box area in px^2 (default 100)");
  o_scene->excludes(o_scenes);
  annotate_cmd->callback([&] {
    if (!*o_scene && !*o_scenes) {
      std::fprintf(stderr, "error: one of --scene or --scenes is required\n");
      rc = 1;
      return;
    }
    rc = cmd_annotate(ann_catalog,
                      *o_scene ? std::optional<std::string>(ann_scene) : std::nullopt,
                      *o_scenes ? std::optional<std::string>(ann_scenes) : std::nullopt,
                      ann_min_area,
                      *o_ann_out ? std::optional<std::string>(ann_out) : std::nullopt);
  });

  // export-coco
  auto* export_cmd =
      app.add_subcommand("export-coco", "Bundle annotation files as COCO JSON");
  static std::string exp_catalog, exp_dir, exp_out;
  export_cmd->add_option("--catalog", exp_catalog, "Catalog JSON file")->required();
  export_cmd->add_option("--annotations", exp_dir, "Directory of annotation files")
      ->required();
  auto* o_exp_out = export_cmd->add_option("--out", exp_out, "Output file");
  export_cmd->callback([&] {
    rc = cmd_export_coco(exp_catalog, exp_dir,
                         *o_exp_out ? std::optional<std::string>(exp_out)
                                    : std::nullopt);
  });

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Corpus statistics for a dataset");
  static std::string stats_dir;
  stats_cmd->add_option("--dataset", stats_dir, "Dataset directory")->required();
  stats_cmd->callback([&] { rc = cmd_stats(stats_dir); });

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Score a COCO results file");
  static std::string eval_gt, eval_dets, eval_out;
  static double eval_iou = 0.5, eval_score = 0.5;
  eval_cmd->add_option("--gt", eval_gt, "COCO ground-truth file")->required();
  eval_cmd->add_option("--dets", eval_dets, "COCO results array file")->required();
  eval_cmd->add_option("--iou", eval_iou, "IoU threshold for F1/confusion");
  eval_cmd->add_option("--score", eval_score, "Score threshold for F1/confusion");
  auto* o_eval_out = eval_cmd->add_option("--out", eval_out, "Also write report here");
  eval_cmd->callback([&] {
    rc = cmd_eval(eval_gt, eval_dets, eval_iou, eval_score,
                  *o_eval_out ? std::optional<std::string>(eval_out) : std::nullopt);
  });

  // scale-opt
  auto* opt_cmd = app.add_subcommand(
      "scale-opt", "Per-image Bayesian search for the best preprocessing scale");
  static std::string opt_gt, opt_images, opt_detector, opt_config, opt_out = ".";
  static double opt_iou = 0.5, opt_score = 0.5;
  opt_cmd->add_option("--gt", opt_gt, "COCO ground-truth file")->required();
  opt_cmd->add_option("--images", opt_images,
                      "JSON array of {image_id, file} entries")
      ->required();
  opt_cmd->add_option("--detector-cmd", opt_detector,
                      "Shell command reading {image, scale} JSON on stdin and "
                      "writing a detections JSON array on stdout")
      ->required();
  auto* o_opt_config =
      opt_cmd->add_option("--config", opt_config, "Scale search config JSON file");
  opt_cmd->add_option("--iou", opt_iou, "IoU threshold for the F1 objective");
  opt_cmd->add_option("--score", opt_score, "Score threshold for the F1 objective");
  opt_cmd->add_option("--out", opt_out, "Directory for per-image result files");
  opt_cmd->callback([&] {
    rc = cmd_scale_opt(opt_gt, opt_images, opt_detector,
                       *o_opt_config ? std::optional<std::string>(opt_config)
                                     : std::nullopt,
                       opt_iou, opt_score, opt_out);
  });

  // scale-labels
  auto* labels_cmd = app.add_subcommand(
      "scale-labels", "Generate scale-regression scenes and labels");
  static std::string lbl_catalog, lbl_params, lbl_scene_cfg, lbl_out;
  static int lbl_count = 1000;
  static double lbl_smin = 0.5, lbl_smax = 3.0;
  static std::uint64_t lbl_seed = 0;
  labels_cmd->add_option("--catalog", lbl_catalog, "Catalog JSON file")->required();
  labels_cmd->add_option("--count", lbl_count, "Number of labeled scenes");
  labels_cmd->add_option("--s-min", lbl_smin, "Smallest applied scale");
  labels_cmd->add_option("--s-max", lbl_smax, "Largest applied scale");
  labels_cmd->add_option("--seed", lbl_seed, "Master seed");
  auto* o_lbl_params =
      labels_cmd->add_option("--params", lbl_params, "GenerationParams JSON file");
  auto* o_lbl_scene = labels_cmd->add_option("--scene-config", lbl_scene_cfg,
                                             "SceneConfig JSON file");
  auto* o_lbl_out =
      labels_cmd->add_option("--out", lbl_out, "Directory for scene files");
  labels_cmd->callback([&] {
    rc = cmd_scale_labels(
        lbl_catalog, lbl_count, lbl_smin, lbl_smax, lbl_seed,
        *o_lbl_params ? std::optional<std::string>(lbl_params) : std::nullopt,
        *o_lbl_scene ? std::optional<std::string>(lbl_scene_cfg) : std::nullopt,
        *o_lbl_out ? std::optional<std::string>(lbl_out) : std::nullopt);
  });

  // preview
  auto* preview_cmd = app.add_subcommand("preview", "Rasterize a scene to PNG");
  static std::string prev_catalog, prev_scene, prev_out;
  preview_cmd->add_option("--catalog", prev_catalog, "Catalog JSON file")->required();
  preview_cmd->add_option("--scene", prev_scene, "Scene JSON file")->required();
  preview_cmd->add_option("--out", prev_out, "Output PNG path")->required();
  preview_cmd->callback([&] { rc = cmd_preview(prev_catalog, prev_scene, prev_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return rc;
}
