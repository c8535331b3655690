// Copyright 2026 The mrfc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: generate, solve, train and benchmark.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mrfc/bench.hpp"
#include "mrfc/error.hpp"
#include "mrfc/io.hpp"

namespace fs = std::filesystem;
using namespace mrfc;

namespace {

enum class LogLevel { error = 0, info = 1, debug = 2 };

LogLevel log_level() {
  const char* env = std::getenv("MRFC_LOG");
  if (env == nullptr) return LogLevel::info;
  const std::string v = env;
  if (v == "error") return LogLevel::error;
  if (v == "debug") return LogLevel::debug;
  return LogLevel::info;
}

void log(LogLevel level, const std::string& msg) {
  static const LogLevel threshold = log_level();
  if (level > threshold) return;
  static const char* tags[] = {"error", "info", "debug"};
  std::cerr << "[mrfc " << tags[static_cast<int>(level)] << "] " << msg << '\n';
}

// Expands "3", "1,4" and "10-14" into seed lists.
std::vector<std::uint64_t> parse_seeds(const std::vector<std::string>& specs) {
  std::vector<std::uint64_t> out;
  for (const std::string& spec : specs) {
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (part.empty()) continue;
      const auto dash = part.find('-', 1);
      try {
        if (dash == std::string::npos) {
          out.push_back(std::stoull(part));
        } else {
          const auto lo = std::stoull(part.substr(0, dash));
          const auto hi = std::stoull(part.substr(dash + 1));
          if (hi < lo) throw ConfigError("empty seed range '" + part + "'");
          for (auto s = lo; s <= hi; ++s) out.push_back(s);
        }
      } catch (const std::logic_error&) {
        throw ConfigError("invalid seed '" + part + "'");
      }
    }
  }
  return out;
}

struct SyntheticFlags {
  std::vector<std::string> seeds;
  int rows = 64;
  int cols = 64;
  int labels = 16;
  int regions = 6;
  double noise = 2.0;
  double weight = 2.0;

  SyntheticSpec spec(std::uint64_t seed) const { return {seed, rows, cols, labels, regions, noise, weight}; }
};

struct InstanceFlags {
  std::vector<std::string> models;
  std::vector<std::string> stereo;
  int max_disp = 15;
  double disp_step = 1.0;
  std::vector<std::string> restore;
  std::vector<std::string> masks;
  int restore_labels = kRestorationLabels;
  SyntheticFlags synthetic;
};

void add_instance_flags(CLI::App* app, InstanceFlags& f) {
  app->add_option("--model", f.models, "Model JSON file (repeatable)");
  app->add_option("--stereo", f.stereo, "Left and right PGM images")->expected(2);
  app->add_option("--max-disp", f.max_disp, "Largest stereo disparity")->check(CLI::NonNegativeNumber);
  app->add_option("--disp-step", f.disp_step, "Stereo disparity step in pixels")->check(CLI::PositiveNumber);
  app->add_option("--restore", f.restore, "Degraded PGM image to restore (repeatable)");
  app->add_option("--mask", f.masks, "Known-pixel mask PGM per --restore image, 0 = missing");
  app->add_option("--restore-labels", f.restore_labels, "Intensity levels for restoration")->check(CLI::Range(2, 65536));
  app->add_option("--synthetic", f.synthetic.seeds, "Synthetic instance seeds, e.g. 7 or 1000-1009");
  app->add_option("--rows", f.synthetic.rows, "Synthetic grid rows")->check(CLI::PositiveNumber);
  app->add_option("--cols", f.synthetic.cols, "Synthetic grid columns")->check(CLI::PositiveNumber);
  app->add_option("--labels", f.synthetic.labels, "Synthetic label count")->check(CLI::PositiveNumber);
  app->add_option("--regions", f.synthetic.regions, "Synthetic rectangles painted into the truth")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--noise", f.synthetic.noise, "Synthetic unary noise sigma")->check(CLI::NonNegativeNumber);
  app->add_option("--weight", f.synthetic.weight, "Synthetic pairwise weight")->check(CLI::NonNegativeNumber);
}

struct LoadedInstance {
  std::string name;
  Model model;
  std::optional<Solution> truth;
};

std::vector<LoadedInstance> load_instances(const InstanceFlags& f) {
  std::vector<LoadedInstance> out;
  for (const std::string& path : f.models) {
    log(LogLevel::debug, "loading model " + path);
    out.push_back({fs::path(path).stem().string(), model_from_json(read_json(path)), std::nullopt});
  }
  if (!f.stereo.empty()) {
    StereoSpec spec;
    spec.left = load_pgm(f.stereo[0]);
    spec.right = load_pgm(f.stereo[1]);
    spec.max_disparity = f.max_disp;
    spec.disparity_step = f.disp_step;
    out.push_back({fs::path(f.stereo[0]).stem().string(), build_stereo_model(spec), std::nullopt});
  }
  if (!f.masks.empty() && f.masks.size() != f.restore.size()) {
    throw ConfigError("--mask must be given once per --restore image");
  }
  for (size_t k = 0; k < f.restore.size(); ++k) {
    RestorationSpec spec;
    spec.image = load_pgm(f.restore[k]);
    if (!f.masks.empty()) spec.mask = load_pgm(f.masks[k]);
    spec.label_count = f.restore_labels;
    out.push_back({fs::path(f.restore[k]).stem().string(), build_restoration_model(spec), std::nullopt});
  }
  for (std::uint64_t seed : parse_seeds(f.synthetic.seeds)) {
    SyntheticInstance inst = generate_synthetic(f.synthetic.spec(seed));
    out.push_back({"synthetic" + std::to_string(seed), std::move(inst.model), std::move(inst.ground_truth)});
  }
  if (out.empty()) throw ConfigError("no instance given; use --model, --stereo, --restore or --synthetic");
  return out;
}

struct PipelineFlags {
  std::string strategy = "pruning";
  int scales = kDefaultScales;
  std::string lambda = "10";
  double rho_factor = kDefaultRhoFactor;
  std::string solver = "alpha-expansion";
  int max_sweeps = 100;
  std::uint64_t seed = 0;
  std::string groupings;
  CLI::Option* lambda_opt = nullptr;
};

void add_pipeline_flags(CLI::App* app, PipelineFlags& f, bool with_strategy) {
  if (with_strategy) {
    app->add_option("--strategy", f.strategy, "direct, multiscale or pruning")
        ->check(CLI::IsMember({"direct", "multiscale", "pruning"}));
  }
  app->add_option("--scales", f.scales, "Pyramid depth")->check(CLI::PositiveNumber);
  app->add_option("--rho-factor", f.rho_factor, "Discontinuity threshold in mean edge weights")
      ->check(CLI::PositiveNumber);
  app->add_option("--solver", f.solver, "icm or alpha-expansion")->check(CLI::IsMember({"icm", "alpha-expansion"}));
  app->add_option("--max-sweeps", f.max_sweeps, "Solver sweep/cycle limit per scale")->check(CLI::PositiveNumber);
  app->add_option("--seed", f.seed, "Solver seed");
  app->add_option("--groupings", f.groupings, "Grouping JSON for non-grid models");
}

PipelineConfig pipeline_config(const PipelineFlags& f) {
  PipelineConfig cfg;
  cfg.strategy = strategy_from_name(f.strategy);
  cfg.num_scales = f.scales;
  cfg.rho_factor = f.rho_factor;
  cfg.solver.kind = solver_from_name(f.solver);
  cfg.solver.max_sweeps = f.max_sweeps;
  cfg.solver.seed = f.seed;
  if (!f.groupings.empty()) cfg.groupings = groupings_from_json(read_json(f.groupings));
  return cfg;
}

fs::path prepare_out(const std::string& dir) {
  fs::path out(dir);
  fs::create_directories(out);
  return out;
}

// Grid shape of each pyramid scale under the default 2x2 grouping.
std::optional<GridShape> scale_shape(const Model& model, const PipelineConfig& cfg, int scale) {
  if (!model.grid() || !cfg.groupings.empty()) return std::nullopt;
  GridShape s = *model.grid();
  for (int k = 0; k < scale; ++k) s = {(s.rows + 1) / 2, (s.cols + 1) / 2};
  return s;
}

nlohmann::json energy_json(const Energy& e) {
  return {{"total", e.total}, {"unary", e.unary}, {"pairwise", e.pairwise}};
}

int cmd_generate(const std::string& kind, const SyntheticFlags& syn, int size, double image_noise, double missing,
                 const std::string& out_dir) {
  const fs::path out = prepare_out(out_dir);
  const auto seeds = parse_seeds(syn.seeds.empty() ? std::vector<std::string>{"0"} : syn.seeds);
  for (std::uint64_t seed : seeds) {
    const std::string stem = (kind == "synthetic" ? "synthetic" : "restore") + std::to_string(seed);
    if (kind == "synthetic") {
      SyntheticInstance inst = generate_synthetic(syn.spec(seed));
      write_json(model_to_json(inst.model), out / (stem + ".json"));
      write_json(solution_to_json(inst.ground_truth), out / (stem + "_truth.json"));
      save_pgm(labels_to_image(inst.ground_truth, *inst.model.grid(), inst.model.label_count()),
               out / (stem + "_truth.pgm"));
    } else {
      const GrayImage clean = make_test_image(seed, size, size);
      const DegradedImage deg = degrade_image(clean, seed + 1, image_noise, missing);
      save_pgm(clean, out / (stem + "_clean.pgm"));
      save_pgm(deg.noisy, out / (stem + ".pgm"));
      save_pgm(deg.mask, out / (stem + "_mask.pgm"));
    }
    log(LogLevel::info, "wrote " + (out / stem).string() + "*");
  }
  return 0;
}

int cmd_solve(const InstanceFlags& inst_flags, const PipelineFlags& pf, const std::string& cascade_path,
              const std::string& out_dir) {
  auto instances = load_instances(inst_flags);
  if (instances.size() != 1) throw ConfigError("solve takes exactly one instance");
  const LoadedInstance& inst = instances.front();
  PipelineConfig cfg = pipeline_config(pf);

  std::optional<CascadeModel> cascade;
  if (!cascade_path.empty()) cascade = load_cascade(cascade_path);
  const bool lambda_given = pf.lambda_opt != nullptr && pf.lambda_opt->count() > 0;
  cfg.lambda = parse_lambda(pf.lambda);
  if (cascade && !lambda_given) cfg.lambda = cascade->lambda;
  if (cascade && !std::isinf(cfg.lambda) && cfg.lambda != cascade->lambda) {
    throw ConfigError("--lambda " + pf.lambda + " does not match the cascade (trained with lambda " +
                      format_lambda(cascade->lambda) + ")");
  }
  if (cfg.strategy == Strategy::pruning && !cascade && !std::isinf(cfg.lambda)) {
    throw ConfigError("pruning needs --cascade, or --lambda inf for an unpruned run");
  }

  log(LogLevel::info, "solving " + inst.name + " (" + std::to_string(inst.model.node_count()) + " nodes, " +
                          std::to_string(inst.model.label_count()) + " labels) with " + strategy_name(cfg.strategy));
  const PipelineResult r = run(inst.model, cfg, cascade ? &*cascade : nullptr);
  for (const ScaleRecord& s : r.trace) {
    log(LogLevel::debug, "scale " + std::to_string(s.scale) + ": E " + std::to_string(s.energy_before) + " -> " +
                             std::to_string(s.energy_after) + ", active " + std::to_string(s.active_ratio));
  }

  const fs::path out = prepare_out(out_dir);
  write_json(solution_to_json(r.x), out / "solution.json");
  if (inst.model.grid()) {
    save_pgm(labels_to_image(r.x, *inst.model.grid(), inst.model.label_count()), out / "solution.pgm");
  }
  for (const auto& [s, a] : r.pruning) {
    if (s > 2) continue;
    if (const auto shape = scale_shape(inst.model, cfg, s)) {
      save_pgm(active_ratio_image(a, *shape), out / ("active_ratio_scale" + std::to_string(s) + ".pgm"));
    }
  }
  std::vector<double> per_scale;
  for (const ScaleRecord& s : r.trace) per_scale.push_back(s.active_ratio);
  nlohmann::json metrics = {{"instance", inst.name},
                            {"strategy", strategy_name(cfg.strategy)},
                            {"lambda", format_lambda(cfg.strategy == Strategy::pruning ? cfg.lambda : kNoPruning)},
                            {"solver", solver_name(cfg.solver.kind)},
                            {"scales", cfg.num_scales},
                            {"rho_factor", cfg.rho_factor},
                            {"energy", energy_json(r.energy)},
                            {"time_ms", 1e3 * r.wall_time.count()},
                            {"active_ratio", r.active_label_ratio()},
                            {"active_ratio_per_scale", per_scale},
                            {"trace", trace_to_json(r.trace)}};
  if (inst.truth) {
    long same = 0;
    for (size_t i = 0; i < r.x.size(); ++i) same += r.x[i] == (*inst.truth)[i];
    metrics["truth_agreement"] = static_cast<double>(same) / static_cast<double>(r.x.size());
  }
  write_json(metrics, out / "metrics.json");
  std::cout << "energy " << r.energy.total << "  time_ms " << 1e3 * r.wall_time.count() << "  active_ratio "
            << r.active_label_ratio() << '\n';
  return 0;
}

Solution load_truth(const std::string& path, const Model& model) {
  Solution x;
  if (fs::path(path).extension() == ".pgm") {
    x = image_to_labels(load_pgm(path), model.label_count());
  } else {
    x = solution_from_json(read_json(path));
  }
  validate_solution(model, x);
  return x;
}

nlohmann::json training_report(const TrainingSet& set, const CascadeModel& cascade) {
  nlohmann::json scales = nlohmann::json::array();
  for (const auto& [s, groups] : set.samples) {
    const ScaleClassifier& sc = cascade.at(s);
    nlohmann::json g_json = nlohmann::json::array();
    for (int g = 0; g < 2; ++g) {
      const LinearClassifier& clf = g == 0 ? sc.psd0 : sc.psd1;
      long correct = 0;
      long kept_c1 = 0;
      long kept = 0;
      for (const TrainingSample& t : groups[g]) {
        const bool keep = clf.keep(FeatureVector(t.lev, t.uc));
        correct += keep == (t.target != 0);
        kept_c1 += keep && t.target;
        kept += keep;
      }
      const GroupCounts c = set.counts(s, g);
      const double n = static_cast<double>(groups[g].size());
      g_json.push_back({{"psd", g},
                        {"c0", c.c0},
                        {"c1", c.c1},
                        {"weight_c1", sc.weight_c1[g]},
                        {"fallback", sc.fallback[g]},
                        {"accuracy", n > 0 ? correct / n : 1.0},
                        {"c1_recall", c.c1 > 0 ? static_cast<double>(kept_c1) / c.c1 : 1.0},
                        {"keep_ratio", n > 0 ? kept / n : 1.0}});
    }
    scales.push_back({{"scale", s}, {"groups", std::move(g_json)}});
  }
  return {{"lambda", format_lambda(cascade.lambda)}, {"C", cascade.C}, {"scales", std::move(scales)}};
}

int cmd_train(const InstanceFlags& inst_flags, const PipelineFlags& pf, const std::vector<std::string>& truths,
              const std::string& lambdas, double C, bool proxy, const std::string& out_dir) {
  auto instances = load_instances(inst_flags);
  PipelineConfig cfg = pipeline_config(pf);
  cfg.strategy = Strategy::multiscale;

  // Explicit truths pair up, in order, with the instances that lack one.
  size_t next_truth = 0;
  for (LoadedInstance& inst : instances) {
    if (!inst.truth && next_truth < truths.size()) inst.truth = load_truth(truths[next_truth++], inst.model);
  }
  if (next_truth != truths.size()) throw ConfigError("more --truth files than instances without ground truth");

  std::vector<TrainingInstance> training;
  for (LoadedInstance& inst : instances) {
    if (proxy) {
      PipelineConfig direct = cfg;
      direct.strategy = Strategy::direct;
      log(LogLevel::info, "proxy truth for " + inst.name + " from a direct run");
      inst.truth = run(inst.model, direct).x;
    }
    if (!inst.truth) {
      throw ConfigError("instance " + inst.name + " has no ground truth; pass --truth or --proxy-truth");
    }
    training.push_back({inst.model, *inst.truth});
  }

  std::vector<double> lambda_list;
  {
    std::stringstream ss(lambdas);
    std::string part;
    while (std::getline(ss, part, ',')) lambda_list.push_back(parse_lambda(part));
  }
  if (lambda_list.empty()) throw ConfigError("--lambda needs at least one value");
  for (double l : lambda_list) {
    if (std::isinf(l)) throw ConfigError("cannot train a cascade for lambda = inf; it means no pruning");
  }

  log(LogLevel::info, "collecting training data from " + std::to_string(training.size()) + " instance(s)");
  const TrainingSet set = collect_training_data(training, cfg);
  log(LogLevel::info, std::to_string(set.size()) + " training samples");
  const fs::path out = prepare_out(out_dir);
  {
    std::ofstream csv(out / "training.csv");
    write_training_csv(set, csv);
  }

  nlohmann::json report = {{"instances", training.size()},
                           {"samples", set.size()},
                           {"proxy_truth", proxy},
                           {"cascades", nlohmann::json::array()}};
  for (double lambda : lambda_list) {
    const CascadeModel cascade = train_cascade(set, lambda, C);
    nlohmann::json j = cascade_to_json(cascade);
    j["metadata"] = {{"proxy_truth", proxy}, {"instances", training.size()}, {"scales", cfg.num_scales}};
    const fs::path file = out / ("cascade_lambda" + format_lambda(lambda) + ".json");
    write_json(j, file);
    nlohmann::json entry = training_report(set, cascade);
    entry["file"] = file.filename().string();
    report["cascades"].push_back(std::move(entry));
    log(LogLevel::info, "wrote " + file.string());
  }
  write_json(report, out / "training_report.json");
  return 0;
}

int cmd_benchmark(const InstanceFlags& inst_flags, const PipelineFlags& pf, const std::vector<std::string>& cascades,
                  bool no_unpruned, int repeats, int jobs, const std::string& out_dir) {
  auto loaded = load_instances(inst_flags);
  BenchmarkConfig bc;
  bc.pipeline = pipeline_config(pf);
  for (const std::string& path : cascades) bc.cascades.push_back(load_cascade(path));
  bc.include_unpruned = !no_unpruned;
  bc.repeats = repeats;
  bc.jobs = jobs;

  std::vector<BenchmarkInstance> instances;
  for (LoadedInstance& inst : loaded) instances.push_back({inst.name, std::move(inst.model)});
  log(LogLevel::info, "benchmarking " + std::to_string(instances.size()) + " instance(s), " +
                          std::to_string(bc.cascades.size()) + " cascade(s)");
  const BenchmarkReport report = run_benchmark(instances, bc);

  const fs::path out = prepare_out(out_dir);
  {
    std::ofstream csv(out / "report.csv");
    write_report_csv(report, csv);
  }
  write_json(report_to_json(report), out / "metrics.json");
  write_report_csv(report, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coarse-to-fine MRF MAP inference with learned label pruning"};
  app.require_subcommand(1);

  std::string out_dir = "out";

  SyntheticFlags gen_syn;
  std::string gen_kind = "synthetic";
  int gen_size = 64;
  double gen_noise = 10.0;
  double gen_missing = 0.1;
  auto* gen = app.add_subcommand("generate", "Write synthetic models or degraded test images");
  gen->add_option("kind", gen_kind, "synthetic or restoration")->check(CLI::IsMember({"synthetic", "restoration"}));
  gen->add_option("--seed", gen_syn.seeds, "Seeds, e.g. 7 or 100-104");
  gen->add_option("--rows", gen_syn.rows, "Grid rows")->check(CLI::PositiveNumber);
  gen->add_option("--cols", gen_syn.cols, "Grid columns")->check(CLI::PositiveNumber);
  gen->add_option("--labels", gen_syn.labels, "Label count")->check(CLI::PositiveNumber);
  gen->add_option("--regions", gen_syn.regions, "Rectangles painted into the truth")->check(CLI::NonNegativeNumber);
  gen->add_option("--noise", gen_syn.noise, "Unary noise sigma")->check(CLI::NonNegativeNumber);
  gen->add_option("--weight", gen_syn.weight, "Pairwise weight")->check(CLI::NonNegativeNumber);
  gen->add_option("--size", gen_size, "Restoration image side length")->check(CLI::PositiveNumber);
  gen->add_option("--image-noise", gen_noise, "Restoration Gaussian noise sigma")->check(CLI::NonNegativeNumber);
  gen->add_option("--missing", gen_missing, "Fraction of hidden pixels")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--out", out_dir, "Output directory");

  InstanceFlags solve_inst;
  PipelineFlags solve_pf;
  std::string solve_cascade;
  auto* solve = app.add_subcommand("solve", "Run one strategy on one instance");
  add_instance_flags(solve, solve_inst);
  add_pipeline_flags(solve, solve_pf, true);
  solve_pf.lambda_opt = solve->add_option("--lambda", solve_pf.lambda, "Pruning aggressiveness, or inf");
  solve->add_option("--cascade", solve_cascade, "Trained cascade JSON");
  solve->add_option("--out", out_dir, "Output directory");

  InstanceFlags train_inst;
  PipelineFlags train_pf;
  std::vector<std::string> train_truths;
  std::string train_lambdas = "10";
  double train_C = kDefaultSvmC;
  bool train_proxy = false;
  auto* train = app.add_subcommand("train", "Train pruning cascades from labelled instances");
  add_instance_flags(train, train_inst);
  add_pipeline_flags(train, train_pf, false);
  train->add_option("--truth", train_truths, "Ground truth (JSON labels or PGM) per non-synthetic instance");
  train->add_option("--lambda", train_lambdas, "Comma-separated lambdas, one cascade each");
  train->add_option("--svm-c", train_C, "SVM regularization constant")->check(CLI::PositiveNumber);
  train->add_flag("--proxy-truth", train_proxy, "Label with a direct run instead of ground truth");
  train->add_option("--out", out_dir, "Output directory");

  InstanceFlags bench_inst;
  PipelineFlags bench_pf;
  std::vector<std::string> bench_cascades;
  bool bench_no_unpruned = false;
  int bench_repeats = 1;
  int bench_jobs = 1;
  auto* bench = app.add_subcommand("benchmark", "Compare direct, multiscale and pruning runs");
  add_instance_flags(bench, bench_inst);
  add_pipeline_flags(bench, bench_pf, false);
  bench->add_option("--cascade", bench_cascades, "Cascade JSON, one pruning run each (repeatable)");
  bench->add_flag("--no-unpruned", bench_no_unpruned, "Skip the lambda = inf pruning run");
  bench->add_option("--repeats", bench_repeats, "Timed repetitions; the fastest counts")->check(CLI::PositiveNumber);
  bench->add_option("--jobs", bench_jobs, "Instances processed concurrently")->check(CLI::PositiveNumber);
  bench->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) return cmd_generate(gen_kind, gen_syn, gen_size, gen_noise, gen_missing, out_dir);
    if (*solve) return cmd_solve(solve_inst, solve_pf, solve_cascade, out_dir);
    if (*train) {
      return cmd_train(train_inst, train_pf, train_truths, train_lambdas, train_C, train_proxy, out_dir);
    }
    if (*bench) {
      return cmd_benchmark(bench_inst, bench_pf, bench_cascades, bench_no_unpruned, bench_repeats, bench_jobs,
                           out_dir);
    }
  } catch (const ConfigError& e) {
    log(LogLevel::error, e.what());
    return 2;
  } catch (const std::exception& e) {
    log(LogLevel::error, e.what());
    return 1;
  }
  return 0;
}
