// bannerforge command-line interface. Every subcommand reads a JSON job file
// (--config), writes its artifacts under an output directory and exits with
//   0 success, 1 internal error, 2 usage error, 3 data error, 4 config error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "bannerforge/annotation.hpp"
#include "bannerforge/compositor.hpp"
#include "bannerforge/csv.hpp"
#include "bannerforge/ctr_ranker.hpp"
#include "bannerforge/error.hpp"
#include "bannerforge/features.hpp"
#include "bannerforge/ga_optimizer.hpp"
#include "bannerforge/pipeline.hpp"
#include "bannerforge/raster.hpp"
#include "bannerforge/synthetic.hpp"
#include "bannerforge/weight_calibration.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace bannerforge;

namespace {

enum Exit { kOk = 0, kInternal = 1, kUsage = 2, kData = 3, kConfig = 4 };

struct Job {
  fs::path config_path;
  fs::path base;  ///< directory of the config file
  json doc;
  std::optional<std::uint64_t> seed;
  std::optional<fs::path> out_flag;

  [[nodiscard]] fs::path path(std::string_view key) const {
    if (!doc.contains(key)) throw DataError(config_path.string() + ": " + std::string(key), "missing mandatory field");
    if (!doc[std::string(key)].is_string()) throw DataError(config_path.string() + ": " + std::string(key), "expected a path");
    const fs::path p = doc[std::string(key)].get<std::string>();
    return p.is_absolute() ? p : base / p;
  }

  [[nodiscard]] std::optional<fs::path> optional_path(std::string_view key) const {
    if (!doc.contains(key) || doc[std::string(key)].is_null()) return std::nullopt;
    return path(key);
  }

  /// --out, else the job's "output" entry, else <config dir>/out.
  [[nodiscard]] fs::path out_dir() const {
    if (out_flag) return *out_flag;
    if (doc.contains("output")) return path("output");
    return base / "out";
  }

  [[nodiscard]] std::string sub(std::string_view key) const {
    return doc.contains(key) ? doc[std::string(key)].dump() : std::string("{}");
  }
};

Job load_job(const std::string& config, const std::optional<std::uint64_t>& seed, const std::string& out) {
  Job job;
  job.config_path = config;
  job.base = job.config_path.has_parent_path() ? job.config_path.parent_path() : fs::path(".");
  const std::string text = read_text_file(job.config_path);
  try {
    job.doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(config, std::string("malformed JSON: ") + e.what());
  }
  if (!job.doc.is_object()) throw DataError(config, "expected a JSON object");
  job.seed = seed;
  if (!out.empty()) job.out_flag = fs::path(out);
  return job;
}

void write_json(const fs::path& path, const json& doc) { write_file_atomic(path, doc.dump(2) + "\n"); }

// ---------------------------------------------------------------- subcommands

int cmd_validate(const Job& job) {
  const PipelineConfig cfg = parse_pipeline_config(job.doc.dump(), job.base);
  std::vector<BannerFailure> unreadable;
  const auto catalog = load_annotations(cfg.annotations_dir, &unreadable);
  json report = {{"annotations", catalog.size()}, {"violations", json::array()}, {"library_violations", json::array()}};
  for (const auto& f : unreadable) report["violations"].push_back({{"image_id", f.image_id}, {"path", ""}, {"message", f.error}});
  for (const auto& ann : catalog) {
    for (const auto& v : validate(ann)) {
      report["violations"].push_back({{"image_id", ann.image_id}, {"path", v.path}, {"message", v.message}});
    }
    const fs::path image = cfg.images_dir / (ann.image_id + ".png");
    if (!fs::exists(image)) {
      report["violations"].push_back({{"image_id", ann.image_id}, {"path", "image"}, {"message", "missing " + image.string()}});
    }
  }
  const ElementLibrary lib = parse_element_library(read_text_file(cfg.library_path));
  for (const auto& v : validate(lib)) report["library_violations"].push_back({{"path", v.path}, {"message", v.message}});
  for (const auto& logo : lib.logos) {
    if (!fs::exists(cfg.library_path.parent_path() / logo.path)) {
      report["library_violations"].push_back({{"path", logo.brand}, {"message", "missing logo file " + logo.path}});
    }
  }
  std::cout << report.dump(2) << "\n";
  if (job.out_flag) write_json(*job.out_flag / "validation.json", report);
  const std::size_t problems = report["violations"].size() + report["library_violations"].size();
  if (problems > 0) {
    std::cerr << "error[data]: " << problems << " validation problem(s)\n";
    return kData;
  }
  return kOk;
}

LayoutProblem problem_of(const Job& job) { return parse_layout_problem(job.doc.dump()); }

int cmd_layout(const Job& job) {
  const LayoutProblem prob = problem_of(job);
  GAConfig ga = parse_ga_config(job.sub("ga"));
  if (job.seed) ga.rng_seed = *job.seed;
  const GARun run = evolve(prob, ga);
  const fs::path out = job.out_dir();
  write_file_atomic(out / "layout.json", serialize_run(run, prob) + "\n");
  write_file_atomic(out / "history.csv", run.history_csv());
  std::cout << "best_energy " << format_number(run.best_energy) << "\n";
  return kOk;
}

int cmd_oracle(const Job& job, std::optional<std::size_t> grid) {
  const LayoutProblem prob = problem_of(job);
  std::size_t steps = 16;
  if (grid) {
    steps = *grid;
  } else if (job.doc.contains("grid_steps")) {
    steps = job.doc["grid_steps"].get<std::size_t>();
  }
  const auto best = brute_force_layout(prob, steps);
  json doc = {{"grid_steps", steps}, {"best_energy", best.energy}, {"layout", json::parse(serialize_layout(best.layout))}};
  write_json(job.out_dir() / "oracle.json", doc);
  std::cout << "best_energy " << format_number(best.energy) << "\n";
  return kOk;
}

int cmd_compose(const Job& job) {
  const Raster image = read_png(job.path("image"));
  const ImageAnnotation ann = parse_annotation(read_text_file(job.path("annotation")));
  const Layout layout = parse_layout(read_text_file(job.path("layout")));
  const Raster logo = read_png(job.path("logo"));
  std::vector<std::string> callouts;
  if (job.doc.contains("callouts")) callouts = job.doc["callouts"].get<std::vector<std::string>>();
  const ComposeOptions options = parse_compose_options(job.sub("options"));
  const Raster banner = compose(image, ann, layout, logo, callouts, options);
  const fs::path out = job.out_dir() / "banner.png";
  write_png(out, banner);
  std::cout << out.string() << "\n";
  return kOk;
}

int cmd_features(const Job& job) {
  const fs::path out = job.out_dir();
  FeatureSchema schema;
  if (const auto sp = job.optional_path("schema"); sp && fs::exists(*sp)) {
    schema = parse_schema(read_text_file(*sp));
  } else {
    const std::size_t k = job.doc.value("k_scene", kDefaultSceneSlots);
    schema = build_schema(load_annotations(job.path("annotations")), k);
    write_file_atomic(out / "schema.json", serialize_schema(schema));
  }
  const auto rows = features_from_output(job.path("banners"), schema, job.optional_path("external"));
  write_file_atomic(out / "features.csv", feature_matrix_csv(schema, rows));
  std::cout << rows.size() << " feature rows\n";
  return kOk;
}

int cmd_calibrate(const Job& job) {
  const auto records = parse_records_csv(read_text_file(job.path("records")));
  const CalibrationResult fit = fit_weights(records);
  const fs::path out = job.out_dir();
  write_file_atomic(out / "weights.json", serialize_weights(fit.weights));
  json report = {{"n_records", fit.n_records},
                 {"r_squared", fit.r_squared},
                 {"intercept", fit.intercept},
                 {"coefficients",
                  {{"e_align", fit.coefficients[0]},
                   {"e_overlap", fit.coefficients[1]},
                   {"e_dist", fit.coefficients[2]},
                   {"e_sym", fit.coefficients[3]}}},
                 {"weights", json::parse(serialize_weights(fit.weights))}};
  write_json(out / "calibration.json", report);
  std::cout << serialize_weights(fit.weights);
  return kOk;
}

Dataset dataset_of(const Job& job) {
  return load_dataset(read_text_file(job.path("features")), read_text_file(job.path("labels")));
}

int cmd_train(const Job& job) {
  ModelSpec spec = parse_model_spec(job.sub("model"));
  if (job.seed) spec.seed = *job.seed;
  const Dataset ds = dataset_of(job);
  const fs::path out = job.out_dir();
  if (job.doc.contains("train_fraction")) {
    const double frac = job.doc["train_fraction"].get<double>();
    const auto [train_set, test_set] = split(ds, frac, spec.seed);
    const TrainedModel model = train(train_set, spec);
    write_file_atomic(out / "model.json", serialize_model(model));
    const EvalReport rep = evaluate(model, test_set);
    write_file_atomic(out / "eval.json", serialize_eval_report(rep));
    std::cout << "auc " << format_number(rep.auc) << " ndcg " << format_number(rep.ndcg) << "\n";
  } else {
    write_file_atomic(out / "model.json", serialize_model(train(ds, spec)));
  }
  return kOk;
}

int cmd_evaluate(const Job& job) {
  const TrainedModel model = parse_model(read_text_file(job.path("model")));
  const EvalReport rep = evaluate(model, dataset_of(job));
  write_file_atomic(job.out_dir() / "eval.json", serialize_eval_report(rep));
  std::cout << serialize_eval_report(rep);
  return kOk;
}

int cmd_rank(const Job& job) {
  const TrainedModel model = parse_model(read_text_file(job.path("model")));
  const CsvTable table = parse_csv(read_text_file(job.path("features")));
  if (table.header.empty() || table.header.front() != "banner_id") throw DataError("features", "first column must be banner_id");
  const std::vector<std::string> names(table.header.begin() + 1, table.header.end());
  if (names_fingerprint(names) != model.fingerprint) throw DataError("features", "columns do not match the model");
  std::vector<std::string> ids;
  std::vector<double> scores;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    std::vector<double> x;
    for (std::size_t j = 1; j < table.header.size(); ++j) x.push_back(parse_csv_number(table.rows[i][j], i + 2, table.header[j]));
    ids.push_back(table.rows[i][0]);
    scores.push_back(predict_ctr(model, x));
  }
  std::map<std::string, double> score_of;
  for (std::size_t i = 0; i < ids.size(); ++i) score_of[ids[i]] = scores[i];
  std::string csv = "rank,banner_id,predicted_ctr\n";
  std::size_t r = 0;
  for (const auto& id : rank_by_score(ids, scores)) csv += std::to_string(++r) + "," + id + "," + format_number(score_of[id]) + "\n";
  write_file_atomic(job.out_dir() / "ranking.csv", csv);
  std::cout << csv;
  return kOk;
}

int cmd_pipeline(const Job& job) {
  PipelineConfig cfg = parse_pipeline_config(job.doc.dump(), job.base);
  if (job.seed) cfg.seed = *job.seed;
  if (job.out_flag) cfg.output_dir = *job.out_flag;
  const BannerManifest m = run_pipeline(cfg);
  std::cout << m.banners.size() << " banners, " << m.failures.size() << " failures -> "
            << (cfg.output_dir / "manifest.json").string() << "\n";
  return kOk;
}

int cmd_synth(const Job& job) {
  const std::string kind = job.doc.value("kind", std::string("dataset"));
  const std::uint64_t seed = job.seed.value_or(job.doc.value("seed", std::uint64_t{1}));
  const fs::path out = job.out_dir();
  if (kind == "dataset") {
    SyntheticSpec spec;
    spec.n = job.doc.value("n", spec.n);
    spec.strength = job.doc.value("strength", spec.strength);
    spec.base_rate = job.doc.value("base_rate", spec.base_rate);
    spec.zero_noise = job.doc.value("zero_noise", spec.zero_noise);
    spec.k_scene = job.doc.value("k_scene", spec.k_scene);
    spec.seed = seed;
    const SyntheticData data = generate_synthetic(spec);
    write_file_atomic(out / "features.csv", dataset_features_csv(data.dataset));
    write_file_atomic(out / "labels.csv", dataset_labels_csv(data.dataset));
    write_file_atomic(out / "schema.json", serialize_schema(data.schema));
    write_json(out / "synth.json", {{"n", spec.n},
                                     {"strength", spec.strength},
                                     {"zero_noise", spec.zero_noise},
                                     {"seed", seed},
                                     {"planted_feature", data.planted_feature},
                                     {"bayes_auc", data.bayes_auc}});
    std::cout << "bayes_auc " << format_number(data.bayes_auc) << "\n";
  } else if (kind == "records") {
    RecordSpec spec;
    spec.n = job.doc.value("n", spec.n);
    spec.sigma = job.doc.value("sigma", spec.sigma);
    spec.base_ctr = job.doc.value("base_ctr", spec.base_ctr);
    if (job.doc.contains("coefficients")) {
      const auto c = job.doc["coefficients"].get<std::vector<double>>();
      if (c.size() != 4) throw DataError("coefficients", "expected 4 values");
      std::copy(c.begin(), c.end(), spec.coefficients.begin());
    }
    spec.seed = seed;
    write_file_atomic(out / "records.csv", records_to_csv(generate_records(spec)));
  } else if (kind == "demo") {
    write_demo_corpus(out, seed);
  } else {
    throw ConfigError("synth kind must be dataset, records or demo");
  }
  std::cout << out.string() << "\n";
  return kOk;
}

spdlog::level::level_enum log_level_from_env() {
  const char* v = std::getenv("BANNERFORGE_LOG");
  if (!v) return spdlog::level::warn;
  const auto level = spdlog::level::from_str(v);
  return level == spdlog::level::off && std::string_view(v) != "off" ? spdlog::level::warn : level;
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("bannerforge");
  spdlog::set_default_logger(logger);
  spdlog::set_level(log_level_from_env());

  CLI::App app{"bannerforge: layout optimization, banner compositing and CTR ranking"};
  app.require_subcommand(1);
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> grid;

  struct Entry {
    const char* name;
    const char* help;
  };
  static constexpr Entry kCommands[] = {
      {"validate", "check annotations, images and the element library"},
      {"layout", "optimize a layout problem with the genetic algorithm"},
      {"oracle", "exhaustive lattice search for a small layout problem"},
      {"compose", "render one banner from image, annotation, layout and logo"},
      {"features", "feature matrix for a pipeline output"},
      {"calibrate", "fit energy weights from historical banner records"},
      {"train", "train a CTR model (optionally with a held-out evaluation)"},
      {"evaluate", "AUC and NDCG of a model on a labelled feature matrix"},
      {"rank", "order banners by predicted CTR"},
      {"pipeline", "generate, score and write banners for a request"},
      {"synth", "generate synthetic datasets, records or the demo corpus"},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& c : kCommands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config, "job configuration (JSON)")->required();
    sub->add_option("--seed", seed, "override the configured seed");
    sub->add_option("--out", out, "output directory");
    subs[c.name] = sub;
  }
  subs["oracle"]->add_option("--grid", grid, "lattice steps per axis (default 16)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[usage]: " << e.what() << "\n";
    return kUsage;
  }

  try {
    const Job job = load_job(config, seed, out);
    if (subs["validate"]->parsed()) return cmd_validate(job);
    if (subs["layout"]->parsed()) return cmd_layout(job);
    if (subs["oracle"]->parsed()) return cmd_oracle(job, grid);
    if (subs["compose"]->parsed()) return cmd_compose(job);
    if (subs["features"]->parsed()) return cmd_features(job);
    if (subs["calibrate"]->parsed()) return cmd_calibrate(job);
    if (subs["train"]->parsed()) return cmd_train(job);
    if (subs["evaluate"]->parsed()) return cmd_evaluate(job);
    if (subs["rank"]->parsed()) return cmd_rank(job);
    if (subs["pipeline"]->parsed()) return cmd_pipeline(job);
    if (subs["synth"]->parsed()) return cmd_synth(job);
  } catch (const DataError& e) {
    std::cerr << "error[data]: " << e.what() << "\n";
    return kData;
  } catch (const ConfigError& e) {
    std::cerr << "error[config]: " << e.what() << "\n";
    return kConfig;
  } catch (const json::exception& e) {
    std::cerr << "error[data]: " << config << ": " << e.what() << "\n";
    return kData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error[config]: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return kInternal;
  }
  std::cerr << "error[usage]: no subcommand\n";
  return kUsage;
}
