#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bregcvx/baselines.hpp"
#include "bregcvx/config.hpp"
#include "bregcvx/dataset.hpp"
#include "bregcvx/error.hpp"
#include "bregcvx/experiment.hpp"
#include "bregcvx/grid.hpp"
#include "bregcvx/metrics.hpp"
#include "bregcvx/rounding.hpp"
#include "bregcvx/synthetic.hpp"
#include "bregcvx/table.hpp"
#include "bregcvx/trace.hpp"

namespace {

using namespace bregcvx;

/// Flags shared by `solve` and `bench`; unset options leave the config untouched.
struct ModelFlags {
  std::optional<std::string> model;
  std::optional<std::string> transfer;
  std::optional<int> clusters;
  std::optional<std::string> alpha;
  std::optional<std::string> beta;
  std::optional<std::string> gamma;
  std::optional<std::string> seed;
  std::optional<int> restarts;
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<std::string> geometry;

  void attach(CLI::App* app, bool lists) {
    const std::string many = lists ? " (comma-separated list)" : "";
    app->add_option("--model", model, "cond-jc, cond, disc, joint, alt-hard or soft-em" + many);
    app->add_option("--transfer", transfer, "linear or sigmoid" + many);
    app->add_option("--clusters", clusters, "number of clusters d (0: number of label classes)");
    app->add_option("--alpha", alpha, "weight of the norm regulariser on T" + many);
    app->add_option("--beta", beta, "weight on the prior scores u (joint model)" + many);
    app->add_option("--gamma", gamma, "weight of the norm regulariser on V (disc model)" + many);
    app->add_option("--seed", seed, "master seed" + many);
    app->add_option("--restarts", restarts, "rounding restarts (baselines: random restarts)");
    app->add_option("--tol", tol, "relative tolerance of the GCG and ADMM solvers");
    app->add_option("--max-iter", max_iter, "iteration cap of the GCG and ADMM solvers");
    app->add_option("--geometry", geometry, "constraint set the norm is taken over: m2 or m3");
  }

  void apply(KeyValueConfig& c) const {
    if (model) c.set("models", *model);
    if (transfer) c.set("transfers", *transfer);
    if (clusters) c.set("clusters", std::to_string(*clusters));
    if (alpha) c.set("alpha", *alpha);
    if (beta) c.set("beta", *beta);
    if (gamma) c.set("gamma", *gamma);
    if (seed) c.set("seeds", *seed);
    if (restarts) {
      for (const char* k : {"rounding_restarts", "baseline_restarts", "em_restarts"}) c.set(k, std::to_string(*restarts));
    }
    if (tol) {
      std::ostringstream s;
      s.precision(17);
      s << *tol;
      c.set("tol", s.str());
    }
    if (max_iter) {
      c.set("gcg_max_iter", std::to_string(*max_iter));
      c.set("admm_max_iter", std::to_string(*max_iter));
    }
    if (geometry) c.set("geometry", *geometry);
  }
};

/// Where the data of a single run comes from.
struct DataFlags {
  std::string path;
  std::string label_column = "-1";
  std::string delimiter = ",";
  std::vector<std::string> drop;
  std::string missing;
  long subsample = 0;
  std::vector<long> planted;
  std::uint64_t planted_seed = 0;
  double separation = 10.0;
  double noise = 0.5;
  double min_gap = 0.0;

  void attach(CLI::App* app, bool require) {
    auto* file = app->add_option("--data", path, "delimited numeric file with one label column");
    auto* syn = app->add_option("--planted", planted, "generate planted data: CLUSTERS PER_CLUSTER FEATURES")
                    ->expected(3);
    file->excludes(syn);
    if (require) {
      auto* group = app->add_option_group("source");
      group->add_option(file);
      group->add_option(syn);
      group->require_option(1);
    }
    app->add_option("--label-column", label_column, "label column: index (negative counts from the end) or name");
    app->add_option("--delimiter", delimiter, "field delimiter (a character, 'tab' or 'space')");
    app->add_option("--drop", drop, "columns to discard (indices or names)")->delimiter(',');
    app->add_option("--missing", missing, "token marking missing values; such rows are skipped");
    app->add_option("--subsample", subsample, "stratified down-sampling target (0: keep every row)");
    app->add_option("--planted-seed", planted_seed, "seed of the planted generator");
    app->add_option("--separation", separation, "planted centres are drawn from [0, separation]^n");
    app->add_option("--noise", noise, "planted noise standard deviation");
    app->add_option("--min-gap", min_gap, "redraw planted centres until every pair is at least this far apart");
  }

  void apply(KeyValueConfig& c, const std::string& name) const {
    if (!planted.empty()) {
      const std::string p = "synthetic." + name + ".";
      c.set(p + "clusters", std::to_string(planted[0]));
      c.set(p + "per_cluster", std::to_string(planted[1]));
      c.set(p + "features", std::to_string(planted[2]));
      c.set(p + "seed", std::to_string(planted_seed));
      std::ostringstream sep, noi, gap;
      sep.precision(17);
      noi.precision(17);
      gap.precision(17);
      sep << separation;
      noi << noise;
      gap << min_gap;
      c.set(p + "separation", sep.str());
      c.set(p + "noise", noi.str());
      c.set(p + "min_gap", gap.str());
      return;
    }
    const std::string p = "dataset." + name + ".";
    c.set(p + "path", std::filesystem::absolute(path).string());
    c.set(p + "label_column", label_column);
    c.set(p + "delimiter", delimiter);
    std::string joined;
    for (const std::string& d : drop) joined += (joined.empty() ? "" : ",") + d;
    if (!joined.empty()) c.set(p + "drop", joined);
    if (!missing.empty()) c.set(p + "missing", missing);
    c.set(p + "subsample", std::to_string(subsample));
  }

  LoadOptions load_options() const {
    LoadOptions o;
    o.label_column = label_column;
    o.delimiter = delimiter == "tab" ? '\t' : delimiter == "space" ? ' ' : delimiter.empty() ? ',' : delimiter[0];
    o.drop_columns = drop;
    o.missing_token = missing;
    return o;
  }
};

std::string number(double v) {
  if (v != v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Runs a grid, attaching an optional JSON-lines trace, and writes the artefacts.
int run_plan(GridPlan plan, const std::string& trace_path, std::optional<int> workers, bool quiet) {
  std::ofstream trace_file;
  std::unique_ptr<JsonLinesTraceWriter> writer;
  if (!trace_path.empty()) {
    trace_file.open(trace_path);
    if (!trace_file) throw Error("cannot write trace file '" + trace_path + "'");
    writer = std::make_unique<JsonLinesTraceWriter>(trace_file);
    for (ExperimentSpec& s : plan.cells) s.trace = writer->sink();
  }
  for (const std::string& s : plan.skipped) std::cerr << "skipped " << s << '\n';
  if (!quiet) std::cerr << "running " << plan.cells.size() << " cell(s)\n";

  const std::vector<ResultRecord> records = run_grid(plan.cells, workers.value_or(plan.workers));
  std::filesystem::create_directories(plan.output_dir);
  emit_table(records, TableFormat::csv, plan.output_dir + "/results.csv");
  emit_table(records, TableFormat::text, plan.output_dir + "/table.txt");
  {
    std::ofstream timings(plan.output_dir + "/timings.csv");
    if (!timings) throw Error("cannot write '" + plan.output_dir + "/timings.csv'");
    write_timings_csv(records, timings);
  }
  if (!quiet) write_text_table(records, std::cout);

  int failures = 0;
  for (const ResultRecord& r : records) {
    if (r.status != "ok") {
      ++failures;
      std::cerr << r.dataset << "/" << r.model << "/" << r.transfer << ": " << r.status << '\n';
    }
  }
  return failures == 0 ? 0 : 2;
}

std::vector<Assignment> read_assignments(const std::string& path, int clusters) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open assignment file '" + path + "'");
  std::vector<Assignment> out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    std::vector<int> labels;
    std::string cell;
    while (fields >> cell) {
      try {
        std::size_t used = 0;
        const int v = std::stoi(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        labels.push_back(v);
      } catch (const std::exception&) {
        throw ParseError("non-integer label '" + cell + "'", line_no);
      }
    }
    int k = clusters;
    for (int l : labels) k = std::max(k, l + 1);
    out.emplace_back(std::move(labels), k);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convex relaxations of Bregman-divergence clustering"};
  app.require_subcommand(1);

  // solve: one dataset, one model.
  auto* solve = app.add_subcommand("solve", "solve, round and re-optimise one model on one dataset");
  DataFlags solve_data;
  ModelFlags solve_model;
  std::string solve_out = "results";
  std::string solve_trace;
  std::string solve_name;
  solve_data.attach(solve, true);
  solve_model.attach(solve, false);
  solve->add_option("--out", solve_out, "output directory (results.csv, table.txt, timings.csv, assignments)");
  solve->add_option("--trace", solve_trace, "write solver iterations as JSON lines to this file");
  solve->add_option("--name", solve_name, "dataset name used in the outputs");

  // bench: a grid described by a config file, with flag overrides.
  auto* bench = app.add_subcommand("bench", "run a model x transfer x dataset grid from a key=value config");
  std::string bench_config;
  ModelFlags bench_model;
  std::optional<std::string> bench_out;
  std::optional<int> bench_workers;
  std::string bench_trace;
  bool bench_quiet = false;
  bench->add_option("--config", bench_config, "grid configuration file")->required()->check(CLI::ExistingFile);
  bench_model.attach(bench, true);
  bench->add_option("--out", bench_out, "output directory (overrides the config's 'output')");
  bench->add_option("--workers", bench_workers, "worker threads (overrides the config's 'workers')");
  bench->add_option("--trace", bench_trace, "write solver iterations as JSON lines to this file");
  bench->add_flag("--quiet", bench_quiet, "do not print the result table");

  // score: recompute objective and accuracy from persisted assignments.
  auto* score = app.add_subcommand("score", "recompute objectives and accuracies of stored assignments");
  DataFlags score_data;
  std::string score_assign;
  std::string score_model = "cond";
  std::string score_transfer = "linear";
  int score_clusters = 0;
  std::uint64_t score_seed = 0;
  score_data.attach(score, true);
  score->add_option("--assign", score_assign, "assignment file, one clustering per line")->required();
  score->add_option("--model", score_model, "objective to evaluate: joint uses the prior-weighted objective");
  score->add_option("--transfer", score_transfer, "linear or sigmoid");
  score->add_option("--clusters", score_clusters, "number of clusters (default: inferred)");
  score->add_option("--seed", score_seed, "master seed of the run (selects the same subsample)");

  // table: re-render a results CSV.
  auto* table = app.add_subcommand("table", "render a results CSV as an aligned text table or CSV");
  std::string table_in;
  std::string table_format = "text";
  std::string table_out;
  table->add_option("--in", table_in, "results CSV")->required()->check(CLI::ExistingFile);
  table->add_option("--format", table_format, "text or csv")->check(CLI::IsMember({"text", "csv"}));
  table->add_option("--out", table_out, "output file (default: standard output)");

  // generate: planted data for demos and determinism runs.
  auto* generate = app.add_subcommand("generate", "write a planted-cluster dataset as CSV");
  PlantedOptions gen;
  std::string gen_out;
  generate->add_option("--clusters", gen.clusters, "number of planted clusters");
  generate->add_option("--per-cluster", gen.per_cluster, "points per cluster");
  generate->add_option("--features", gen.features, "feature count");
  generate->add_option("--separation", gen.separation, "centres are drawn from [0, separation]^n");
  generate->add_option("--noise", gen.noise, "noise standard deviation");
  generate->add_option("--min-gap", gen.min_gap, "minimum distance between planted centres");
  generate->add_option("--seed", gen.seed, "generator seed");
  generate->add_option("--out", gen_out, "output CSV (label in the last column)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      KeyValueConfig c;
      const std::string name = !solve_name.empty()         ? solve_name
                               : !solve_data.path.empty() ? std::filesystem::path(solve_data.path).stem().string()
                                                          : "planted";
      solve_data.apply(c, name);
      if (!solve_model.model) c.set("models", "cond-jc");
      if (!solve_model.transfer) c.set("transfers", "linear");
      solve_model.apply(c);
      c.set("output", solve_out);
      return run_plan(build_grid(c), solve_trace, 1, false);
    }
    if (*bench) {
      KeyValueConfig c = KeyValueConfig::load(bench_config);
      bench_model.apply(c);
      if (bench_out) c.set("output", *bench_out);
      const std::string base = std::filesystem::absolute(bench_config).parent_path().string();
      return run_plan(build_grid(c, base), bench_trace, bench_workers, bench_quiet);
    }
    if (*score) {
      ExperimentSpec spec;
      spec.dataset = "score";
      if (!score_data.planted.empty()) {
        PlantedOptions o;
        o.clusters = static_cast<int>(score_data.planted[0]);
        o.per_cluster = score_data.planted[1];
        o.features = score_data.planted[2];
        o.seed = score_data.planted_seed;
        o.separation = score_data.separation;
        o.noise = score_data.noise;
        o.min_gap = score_data.min_gap;
        spec.data = std::make_shared<Dataset>(planted_clusters(o));
      } else {
        spec.path = score_data.path;
        spec.load = score_data.load_options();
      }
      spec.subsample = score_data.subsample;
      spec.seed = score_seed;
      const FamilyId family = family_from_string(score_transfer);
      spec.transfer = family;
      const bool joint = model_from_string(score_model) == ModelKind::joint;
      const Dataset data = prepare_dataset(spec);
      const DivergenceFamily f(family);
      std::cout << "line,objective,accuracy\n";
      long line = 0;
      for (const Assignment& y : read_assignments(score_assign, score_clusters)) {
        ++line;
        if (y.size() != data.size())
          throw ShapeError("assignment " + std::to_string(line) + " has " + std::to_string(y.size()) +
                           " labels for " + std::to_string(data.size()) + " points");
        const double obj = joint ? joint_hard_objective(data.x, y, f) : cond_objective(data.x, y, f);
        const double acc = data.has_labels() ? matched_accuracy(y, data.labels).value : std::nan("");
        std::cout << line << ',' << number(obj) << ',' << number(acc) << '\n';
      }
      return 0;
    }
    if (*table) {
      std::ifstream in(table_in);
      const std::vector<ResultRecord> records = read_results_csv(in);
      const TableFormat fmt = table_format == "csv" ? TableFormat::csv : TableFormat::text;
      if (table_out.empty()) {
        if (fmt == TableFormat::csv)
          write_results_csv(records, std::cout);
        else
          write_text_table(records, std::cout);
      } else {
        emit_table(records, fmt, table_out);
      }
      return 0;
    }
    if (*generate) {
      const Dataset data = planted_clusters(gen);
      std::ofstream out(gen_out);
      if (!out) throw Error("cannot write '" + gen_out + "'");
      out.precision(17);
      for (const std::string& name : data.feature_names) out << name << ',';
      out << "label\n";
      for (Eigen::Index i = 0; i < data.size(); ++i) {
        for (Eigen::Index k = 0; k < data.features(); ++k) out << data.x(i, k) << ',';
        out << data.labels[static_cast<std::size_t>(i)] << '\n';
      }
      return 0;
    }
  } catch (const bregcvx::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
