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

#include "mrfc/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "mrfc/error.hpp"

namespace mrfc {

std::string format_lambda(double lambda) {
  if (std::isinf(lambda)) return "inf";
  std::ostringstream os;
  os << lambda;
  return os.str();
}

double parse_lambda(const std::string& text) {
  if (text == "inf" || text == "+inf" || text == "infinity") return kNoPruning;
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("invalid lambda '" + text + "'");
  }
  if (used != text.size() || !(v > 0.0)) throw ConfigError("invalid lambda '" + text + "'");
  return v;
}

std::vector<RunMetrics> compute_metrics(const std::vector<RunRecord>& runs) {
  auto base = std::find_if(runs.begin(), runs.end(), [](const RunRecord& r) { return r.strategy == Strategy::direct; });
  if (base == runs.end()) throw InvalidInput("metrics need a direct-strategy baseline");

  // Ties go to the earliest run.
  const RunRecord* best = &runs.front();
  for (const RunRecord& r : runs) {
    if (r.result.energy.total < best->result.energy.total) best = &r;
  }

  const double e_direct = base->result.energy.total;
  const double t_direct = base->time_ms;
  std::vector<RunMetrics> out;
  for (const RunRecord& r : runs) {
    RunMetrics m;
    m.instance = r.instance;
    m.strategy = r.strategy;
    m.lambda = r.lambda;
    m.energy = r.result.energy.total;
    m.time_ms = r.time_ms;
    if (e_direct != 0.0) {
      m.energy_ratio = m.energy / e_direct;
    } else {
      m.energy_ratio = std::numeric_limits<double>::quiet_NaN();
      m.energy_ratio_valid = false;
    }
    if (t_direct > 0.0 && r.time_ms > 0.0) {
      m.speedup = t_direct / r.time_ms;
    } else {
      m.speedup = std::numeric_limits<double>::quiet_NaN();
      m.speedup_valid = false;
    }
    for (const ScaleRecord& s : r.result.trace) m.active_ratio_per_scale.push_back(s.active_ratio);
    m.active_ratio = r.result.active_label_ratio();
    long same = 0;
    for (size_t i = 0; i < r.result.x.size(); ++i) same += r.result.x[i] == best->result.x[i];
    m.agreement = static_cast<double>(same) / static_cast<double>(r.result.x.size());
    out.push_back(std::move(m));
  }
  return out;
}

RunRecord timed_run(const std::string& instance, const Model& model, const PipelineConfig& cfg,
                    const CascadeModel* cascade, int repeats) {
  RunRecord rec;
  rec.instance = instance;
  rec.strategy = cfg.strategy;
  rec.lambda = cfg.strategy == Strategy::pruning ? cfg.lambda : kNoPruning;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < std::max(1, repeats); ++k) {
    PipelineResult r = run(model, cfg, cascade);
    best = std::min(best, 1e3 * r.wall_time.count());
    if (k == 0) rec.result = std::move(r);
  }
  rec.time_ms = best;
  return rec;
}

namespace {

std::vector<RunRecord> run_instance(const BenchmarkInstance& inst, const BenchmarkConfig& cfg) {
  std::vector<RunRecord> runs;
  PipelineConfig pc = cfg.pipeline;
  pc.strategy = Strategy::direct;
  runs.push_back(timed_run(inst.name, inst.model, pc, nullptr, cfg.repeats));
  pc.strategy = Strategy::multiscale;
  runs.push_back(timed_run(inst.name, inst.model, pc, nullptr, cfg.repeats));
  pc.strategy = Strategy::pruning;
  for (const CascadeModel& c : cfg.cascades) {
    pc.lambda = c.lambda;
    runs.push_back(timed_run(inst.name, inst.model, pc, &c, cfg.repeats));
  }
  if (cfg.include_unpruned) {
    pc.lambda = kNoPruning;
    runs.push_back(timed_run(inst.name, inst.model, pc, nullptr, cfg.repeats));
  }
  return runs;
}

}  // namespace

BenchmarkReport run_benchmark(const std::vector<BenchmarkInstance>& instances, const BenchmarkConfig& cfg) {
  std::vector<std::vector<RunRecord>> per_instance(instances.size());
  const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(instances.size())));
  if (jobs == 1) {
    for (size_t k = 0; k < instances.size(); ++k) per_instance[k] = run_instance(instances[k], cfg);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::exception_ptr> errors(static_cast<size_t>(jobs));
    std::vector<std::thread> workers;
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (size_t k = next++; k < instances.size(); k = next++) per_instance[k] = run_instance(instances[k], cfg);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : workers) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  BenchmarkReport report;
  for (auto& runs : per_instance) {
    auto rows = compute_metrics(runs);
    report.rows.insert(report.rows.end(), rows.begin(), rows.end());
    for (auto& r : runs) report.runs.push_back(std::move(r));
  }
  nlohmann::json lambdas = nlohmann::json::array();
  for (const CascadeModel& c : cfg.cascades) lambdas.push_back(format_lambda(c.lambda));
  report.config = {{"scales", cfg.pipeline.num_scales},
                   {"rho_factor", cfg.pipeline.rho_factor},
                   {"solver", solver_name(cfg.pipeline.solver.kind)},
                   {"max_sweeps", cfg.pipeline.solver.max_sweeps},
                   {"seed", cfg.pipeline.solver.seed},
                   {"lambdas", lambdas},
                   {"include_unpruned", cfg.include_unpruned},
                   {"repeats", cfg.repeats},
                   {"jobs", cfg.jobs}};
  return report;
}

void write_report_csv(const BenchmarkReport& report, std::ostream& out) {
  out << kReportCsvHeader << '\n';
  const auto old = out.precision(17);
  auto num = [&](double v, bool valid) -> std::ostream& {
    if (valid) {
      out << v;
    } else {
      out << "nan";
    }
    return out;
  };
  for (const RunMetrics& m : report.rows) {
    out << m.instance << ',' << strategy_name(m.strategy) << ',' << format_lambda(m.lambda) << ',' << m.energy << ',';
    num(m.energy_ratio, m.energy_ratio_valid) << ',' << m.time_ms << ',';
    num(m.speedup, m.speedup_valid) << ',' << m.active_ratio << ',' << m.agreement << '\n';
  }
  out.precision(old);
}

nlohmann::json metrics_to_json(const RunMetrics& m) {
  auto maybe = [](double v, bool valid) -> nlohmann::json { return valid ? nlohmann::json(v) : nlohmann::json(nullptr); };
  return {{"instance", m.instance},
          {"strategy", strategy_name(m.strategy)},
          {"lambda", format_lambda(m.lambda)},
          {"energy", m.energy},
          {"energy_ratio", maybe(m.energy_ratio, m.energy_ratio_valid)},
          {"time_ms", m.time_ms},
          {"speedup", maybe(m.speedup, m.speedup_valid)},
          {"active_ratio", m.active_ratio},
          {"active_ratio_per_scale", m.active_ratio_per_scale},
          {"agreement", m.agreement}};
}

nlohmann::json trace_to_json(const ScaleTrace& trace) {
  nlohmann::json arr = nlohmann::json::array();
  for (const ScaleRecord& s : trace) {
    arr.push_back({{"scale", s.scale},
                   {"nodes", s.node_count},
                   {"energy_before", s.energy_before},
                   {"energy_after", s.energy_after},
                   {"active_labels", s.active_labels},
                   {"active_ratio", s.active_ratio},
                   {"solve_ms", 1e3 * s.solve_time.count()},
                   {"iterations", s.solver_iterations}});
  }
  return arr;
}

nlohmann::json report_to_json(const BenchmarkReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (size_t k = 0; k < report.rows.size(); ++k) {
    nlohmann::json row = metrics_to_json(report.rows[k]);
    if (k < report.runs.size()) row["trace"] = trace_to_json(report.runs[k].result.trace);
    rows.push_back(std::move(row));
  }
  return {{"config", report.config},
          {"environment", {{"hardware_threads", std::thread::hardware_concurrency()}}},
          {"rows", std::move(rows)}};
}

GrayImage active_ratio_image(const PruningMatrix& a, GridShape shape) {
  if (shape.size() != a.node_count()) throw InvalidInput("grid shape does not match pruning matrix");
  GrayImage img(shape.cols, shape.rows, 255);
  for (int i = 0; i < a.node_count(); ++i) {
    const double ratio = static_cast<double>(a.active_count(i)) / a.label_count();
    img.pixels[i] = static_cast<std::uint16_t>(std::lround(255.0 * ratio));
  }
  return img;
}

}  // namespace mrfc
