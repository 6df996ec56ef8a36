/**
 * @file runner.cpp
 * @brief Experiment driver: bench, sweep, train, solve, and dist commands.
 */

#include "otseq/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <utility>

#include "otseq/seqdist.hpp"
#include "otseq/sinkhorn.hpp"
#include "otseq/train.hpp"

namespace otseq {

namespace {

std::string format_g(const char* spec, double value) {
  char text[64];
  std::snprintf(text, sizeof text, spec, value);
  return text;
}

std::string regime_name(Regime regime) {
  return regime == Regime::kContentDominated ? "content" : "ordering";
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.flush();
  if (!out.good()) {
    throw std::runtime_error("cannot write " + path.string());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) {
    throw std::runtime_error("cannot read " + path.string());
  }
  return Json::parse(in);
}

struct SolveCounter {
  long long total = 0;
  long long nonconverged = 0;

  double fraction() const {
    return total == 0 ? 0.0 : static_cast<double>(nonconverged) / static_cast<double>(total);
  }
};

Json convergence_json(const SolveCounter& counter, double budget) {
  return Json{{"total_solves", counter.total},
              {"nonconverged_solves", counter.nonconverged},
              {"fraction", counter.fraction()},
              {"budget", budget},
              {"within_budget", counter.fraction() <= budget}};
}

int convergence_status(const SolveCounter& counter, double budget) {
  return counter.fraction() <= budget ? 0 : 3;
}

SequenceMetric make_metric(const std::string& name, const DistanceConfig& dcfg,
                           SolveCounter* counter) {
  if (name == "agg") {
    return [](const SegmentSequence& a, const SegmentSequence& b) { return agg_distance(a, b); };
  }
  if (name == "dtw") {
    return
        [](const SegmentSequence& a, const SegmentSequence& b) { return dtw_distance(a, b).first; };
  }
  return [dcfg, counter](const SegmentSequence& a, const SegmentSequence& b) {
    const SequenceDistanceResult result = cmot_distance(a, b, dcfg);
    if (counter != nullptr) {
      ++counter->total;
      if (!result.converged) {
        ++counter->nonconverged;
      }
    }
    return result.value;
  };
}

SequenceMetric embedded_metric(const LinearEmbedding& emb, const DistanceConfig& dcfg,
                               SolveCounter* counter) {
  return [emb, dcfg, counter](const SegmentSequence& a, const SegmentSequence& b) {
    const SequenceDistanceResult result = cmot_distance(embed(a, emb), embed(b, emb), dcfg);
    if (counter != nullptr) {
      ++counter->total;
      if (!result.converged) {
        ++counter->nonconverged;
      }
    }
    return result.value;
  };
}

std::vector<Episode> sample_episodes(const ClassBank& bank, const GeneratorConfig& gen,
                                     const RunConfig& cfg) {
  std::mt19937_64 rng(cfg.seed + 1);
  std::vector<Episode> episodes;
  episodes.reserve(static_cast<size_t>(cfg.episode_count));
  for (int e = 0; e < cfg.episode_count; ++e) {
    episodes.push_back(build_episode(bank, gen, cfg.n_way, cfg.k_shot, cfg.q_per_class, rng));
  }
  return episodes;
}

Json report_json(const std::string& label, const BenchmarkReport& report) {
  return Json{{"metric", label},
              {"mean_accuracy", report.mean_accuracy},
              {"ci95_halfwidth", report.ci95_halfwidth},
              {"episode_count", report.episode_count},
              {"tie_count", report.tie_count},
              {"per_episode_accuracies", report.per_episode_accuracies}};
}

ReportRow report_row(const std::string& label, const RunConfig& cfg,
                     const BenchmarkReport& report) {
  return ReportRow{label,
                   regime_name(cfg.generator.regime),
                   cfg.n_way,
                   cfg.k_shot,
                   report.episode_count,
                   report.mean_accuracy,
                   report.ci95_halfwidth,
                   cfg.seed};
}

void write_outputs(const RunConfig& cfg, const std::vector<ReportRow>* rows, const Json& doc) {
  if (rows != nullptr) {
    write_text_file(cfg.output_path + ".csv", csv_text(*rows));
  }
  write_text_file(cfg.output_path + ".json", doc.dump(2) + "\n");
}

int run_bench(const RunConfig& cfg) {
  GeneratorConfig gen = cfg.generator;
  gen.rng_seed = cfg.seed;
  const ClassBank bank = generate_class_bank(gen);
  const std::vector<Episode> episodes = sample_episodes(bank, gen, cfg);

  SolveCounter counter;
  std::vector<ReportRow> rows;
  Json reports = Json::array();
  for (const std::string& name : cfg.metrics) {
    const BenchmarkReport report =
        evaluate_benchmark(episodes, make_metric(name, cfg.distance, &counter));
    rows.push_back(report_row(name, cfg, report));
    reports.push_back(report_json(name, report));
  }

  Json doc;
  doc["config"] = config_snapshot(cfg);
  doc["reports"] = std::move(reports);
  doc["convergence"] = convergence_json(counter, cfg.max_nonconverged_fraction);
  write_outputs(cfg, &rows, doc);
  return convergence_status(counter, cfg.max_nonconverged_fraction);
}

int run_sweep(const RunConfig& cfg) {
  GeneratorConfig gen = cfg.generator;
  gen.rng_seed = cfg.seed;
  const ClassBank bank = generate_class_bank(gen);
  const std::vector<Episode> episodes = sample_episodes(bank, gen, cfg);

  SolveCounter counter;
  std::vector<ReportRow> rows;
  Json points = Json::array();
  for (const double value : cfg.sweep_values) {
    DistanceConfig dcfg = cfg.distance;
    if (cfg.sweep_parameter == "alpha") {
      dcfg.fusion.alpha = value;
    } else if (cfg.sweep_parameter == "sigma") {
      dcfg.positional.sigma = value;
    } else {
      dcfg.lambda_auto = true;
      dcfg.lambda_multiplier = value;
    }
    const std::string label =
        "cmot[" + cfg.sweep_parameter + "=" + format_g("%g", value) + "]";
    const BenchmarkReport report =
        evaluate_benchmark(episodes, make_metric("cmot", dcfg, &counter));
    rows.push_back(report_row(label, cfg, report));
    Json point = report_json(label, report);
    point["parameter"] = cfg.sweep_parameter;
    point["value"] = value;
    points.push_back(std::move(point));
  }

  Json doc;
  doc["config"] = config_snapshot(cfg);
  doc["reports"] = std::move(points);
  doc["convergence"] = convergence_json(counter, cfg.max_nonconverged_fraction);
  write_outputs(cfg, &rows, doc);
  return convergence_status(counter, cfg.max_nonconverged_fraction);
}

LinearEmbedding initial_embedding(const RunConfig& cfg) {
  if (cfg.train_d_out == 0) {
    return LinearEmbedding::identity(cfg.generator.dim);
  }
  std::mt19937_64 rng(cfg.seed + 3);
  std::normal_distribution<double> normal(0.0,
                                          1.0 / std::sqrt(static_cast<double>(cfg.generator.dim)));
  LinearEmbedding emb;
  emb.weight = Matrix(cfg.train_d_out, cfg.generator.dim);
  for (Index r = 0; r < emb.weight.rows(); ++r) {
    for (Index c = 0; c < emb.weight.cols(); ++c) {
      emb.weight(r, c) = normal(rng);
    }
  }
  emb.bias = Vector::Zero(cfg.train_d_out);
  return emb;
}

int run_train(const RunConfig& cfg) {
  GeneratorConfig gen = cfg.generator;
  gen.rng_seed = cfg.seed;
  const ClassBank bank = generate_class_bank(gen);
  const std::vector<Episode> eval_episodes = sample_episodes(bank, gen, cfg);

  const LinearEmbedding start = initial_embedding(cfg);
  SolveCounter counter;
  const BenchmarkReport pre =
      evaluate_benchmark(eval_episodes, embedded_metric(start, cfg.distance, &counter));

  TrainConfig tcfg = cfg.train;
  tcfg.rng_seed = cfg.seed + 2;
  const EpisodeSource source = [&bank, &gen, &cfg](std::mt19937_64& rng) {
    return build_episode(bank, gen, cfg.n_way, cfg.k_shot, cfg.q_per_class, rng);
  };
  const TrainResult trained = train_loop(source, start, tcfg, cfg.distance);

  const BenchmarkReport post =
      evaluate_benchmark(eval_episodes, embedded_metric(trained.embedding, cfg.distance, &counter));

  counter.total += trained.total_solves;
  counter.nonconverged += trained.nonconverged_solves;

  const std::vector<ReportRow> rows = {report_row("cmot[pre]", cfg, pre),
                                       report_row("cmot[post]", cfg, post)};
  const Checkpoint checkpoint{trained.embedding, tcfg.total_episodes, trained.final_rng_state};

  Json doc;
  doc["config"] = config_snapshot(cfg);
  doc["reports"] = Json::array({report_json("cmot[pre]", pre), report_json("cmot[post]", post)});
  doc["train"] = Json{{"loss_history", trained.loss_history},
                      {"checkpoint", checkpoint_to_json(checkpoint)}};
  doc["convergence"] = convergence_json(counter, cfg.max_nonconverged_fraction);
  write_outputs(cfg, &rows, doc);
  return convergence_status(counter, cfg.max_nonconverged_fraction);
}

int run_solve(const RunConfig& cfg) {
  const Matrix cost = matrix_from_json(read_json_file(cfg.solve_cost_path));
  if (cost.rows() < 1 || cost.cols() < 1) {
    throw std::invalid_argument("solve: cost matrix must be non-empty");
  }

  SinkhornConfig scfg = cfg.distance.sinkhorn;
  if (cfg.distance.lambda_auto) {
    const double med = cost_median(cost);
    scfg.lambda =
        med < 1e-12 ? cfg.distance.lambda_multiplier : cfg.distance.lambda_multiplier / med;
  }
  const SinkhornResult result =
      sinkhorn_solve(cost, Marginal::uniform(cost.rows()), Marginal::uniform(cost.cols()), scfg);

  SolveCounter counter;
  counter.total = 1;
  counter.nonconverged = result.converged ? 0 : 1;

  Json doc;
  doc["config"] = config_snapshot(cfg);
  doc["solve"] = Json{{"lambda", scfg.lambda},
                      {"value", result.value},
                      {"linear_cost", result.linear_cost},
                      {"iterations_used", result.iterations_used},
                      {"final_residual", result.final_residual},
                      {"converged", result.converged},
                      {"plan", matrix_to_json(result.plan)},
                      {"heatmap", plan_heatmap(result.plan)}};
  doc["convergence"] = convergence_json(counter, cfg.max_nonconverged_fraction);
  write_outputs(cfg, nullptr, doc);
  return convergence_status(counter, cfg.max_nonconverged_fraction);
}

int run_dist(const RunConfig& cfg) {
  const SegmentSequence a = sequence_from_json(read_json_file(cfg.dist_a_path));
  const SegmentSequence b = sequence_from_json(read_json_file(cfg.dist_b_path));
  const SequenceDistanceResult result = cmot_distance(a, b, cfg.distance);

  SolveCounter counter;
  counter.total = 1;
  counter.nonconverged = result.converged ? 0 : 1;

  Json doc;
  doc["config"] = config_snapshot(cfg);
  doc["dist"] = Json{{"value", result.value},
                     {"lambda", result.lambda},
                     {"linear_cost", result.linear_cost},
                     {"iterations_used", result.iterations_used},
                     {"converged", result.converged},
                     {"plan", matrix_to_json(result.plan)},
                     {"heatmap", plan_heatmap(result.plan)}};
  doc["convergence"] = convergence_json(counter, cfg.max_nonconverged_fraction);
  write_outputs(cfg, nullptr, doc);
  return convergence_status(counter, cfg.max_nonconverged_fraction);
}

}  // namespace

std::string csv_text(const std::vector<ReportRow>& rows) {
  std::string text = "metric,regime,n_way,k_shot,episodes,accuracy,ci95,seed\n";
  for (const ReportRow& row : rows) {
    text += row.metric + ',' + row.regime + ',' + std::to_string(row.n_way) + ',' +
            std::to_string(row.k_shot) + ',' + std::to_string(row.episodes) + ',' +
            format_g("%.6g", row.accuracy) + ',' + format_g("%.6g", row.ci95) + ',' +
            std::to_string(row.seed) + '\n';
  }
  return text;
}

std::vector<std::string> plan_heatmap(const Matrix& plan) {
  static const char ramp[] = " .:-=+*#%@";
  const double peak = plan.size() > 0 ? plan.maxCoeff() : 0.0;
  std::vector<std::string> rows;
  rows.reserve(static_cast<size_t>(plan.rows()));
  for (Index p = 0; p < plan.rows(); ++p) {
    std::string line(static_cast<size_t>(plan.cols()), ' ');
    for (Index q = 0; q < plan.cols(); ++q) {
      if (peak > 0.0) {
        const int level = static_cast<int>(plan(p, q) / peak * 10.0);
        line[static_cast<size_t>(q)] = ramp[std::clamp(level, 0, 9)];
      }
    }
    rows.push_back(std::move(line));
  }
  return rows;
}

int run_experiment(const RunConfig& cfg) {
  if (cfg.command == "bench") {
    return run_bench(cfg);
  }
  if (cfg.command == "sweep") {
    return run_sweep(cfg);
  }
  if (cfg.command == "train") {
    return run_train(cfg);
  }
  if (cfg.command == "solve") {
    return run_solve(cfg);
  }
  if (cfg.command == "dist") {
    return run_dist(cfg);
  }
  throw std::invalid_argument("unknown command '" + cfg.command + "'");
}

}  // namespace otseq
