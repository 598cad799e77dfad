#include "bregcvx/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "bregcvx/baselines.hpp"
#include "bregcvx/error.hpp"
#include "bregcvx/metrics.hpp"
#include "bregcvx/random.hpp"
#include "bregcvx/rounding.hpp"
#include "bregcvx/table.hpp"

namespace bregcvx {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kSolveStream = 0x736f6c7665ULL;
constexpr std::uint64_t kRoundStream = 0x726f756e64ULL;
constexpr std::uint64_t kBaselineStream = 0x62617365ULL;
constexpr std::uint64_t kSampleStream = 0x73616d706c65ULL;

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

ResultRecord blank(const ExperimentSpec& spec) {
  ResultRecord r;
  r.dataset = spec.dataset;
  r.model = std::string(to_string(spec.model));
  r.transfer = spec.transfer == FamilyId::euclidean ? "linear" : "sigmoid";
  r.d = spec.d;
  r.alpha = spec.alpha;
  r.beta = spec.beta;
  r.gamma = spec.gamma;
  r.seed = spec.seed;
  for (double* f : {&r.rounded_objective_mean, &r.rounded_objective_std, &r.rounded_accuracy_mean,
                    &r.rounded_accuracy_std, &r.objective_mean, &r.objective_std, &r.objective_best,
                    &r.accuracy_mean, &r.accuracy_std, &r.soft_accuracy_mean, &r.soft_accuracy_std,
                    &r.hard_accuracy_mean, &r.hard_accuracy_std, &r.relaxed_objective})
    *f = kNaN;
  return r;
}

void set_summary(const std::vector<double>& v, double& mean, double& stddev) {
  if (v.empty()) return;
  const RestartSummary s = RestartSummary::of(v);
  mean = s.mean;
  stddev = s.stddev;
}

void persist(const ExperimentSpec& spec, const std::vector<Assignment>& assignments) {
  if (spec.output_dir.empty()) return;
  std::filesystem::create_directories(spec.output_dir);
  const std::string path = spec.output_dir + "/" + spec.key() + ".assign";
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  for (const Assignment& a : assignments) {
    for (std::size_t i = 0; i < a.labels.size(); ++i) out << (i ? " " : "") << a.labels[i];
    out << '\n';
  }
}

/// Posterior p(j | x_i) proportional to q_j exp(-D_F(x_i, mu_j)).
Eigen::MatrixXd posterior(const Eigen::VectorXd& log_q, const Eigen::MatrixXd& centers, const Eigen::MatrixXd& x,
                          const DivergenceFamily& family) {
  Eigen::MatrixXd p(x.rows(), centers.rows());
  Eigen::VectorXd s(centers.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < centers.rows(); ++j)
      s[j] = std::isfinite(log_q[j]) ? log_q[j] - family.divergence(x.row(i).transpose(), centers.row(j).transpose())
                                     : -std::numeric_limits<double>::infinity();
    const double lse = log_sum_exp(s);
    p.row(i) = (s.array() - lse).exp().transpose();
  }
  return p;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (model == ModelKind::disc && transfer != FamilyId::bernoulli)
    throw InvalidArgument("the discriminative model uses the sigmoid transfer only");
  if (d == 1 || d < 0) throw InvalidArgument("cluster count must be at least 2");
  if (rounding_restarts < 1 || baseline_restarts < 1 || em_restarts < 1)
    throw InvalidArgument("restart counts must be positive");
  if (!data && path.empty()) throw InvalidArgument("experiment '" + dataset + "' has no data source");
}

std::string ExperimentSpec::key() const {
  std::string k = dataset + "-" + std::string(to_string(model)) + "-" +
                  (transfer == FamilyId::euclidean ? "linear" : "sigmoid") + "-a" + format_number(alpha) + "-b" +
                  format_number(beta) + "-g" + format_number(gamma) + "-s" + std::to_string(seed);
  for (char& c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' || c == '_' || c == '+')) c = '_';
  return k;
}

ResultRecord ResultRecord::failed(const ExperimentSpec& spec, const std::string& message) {
  ResultRecord r = blank(spec);
  r.status = "error: " + message;
  return r;
}

std::string assignment_checksum(const std::vector<int>& labels) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (int l : labels) {
    auto v = static_cast<std::uint32_t>(l);
    for (int b = 0; b < 4; ++b) {
      h ^= (v >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Dataset prepare_dataset(const ExperimentSpec& spec) {
  Dataset raw = spec.data ? *spec.data : load_dataset(spec.path, spec.load);
  if (!spec.dataset.empty()) raw.name = spec.dataset;
  raw.validate();
  if (spec.subsample > 0 && spec.subsample < raw.size())
    raw = stratified_subsample(raw, spec.subsample, derive_seed(spec.seed, kSampleStream));
  return preprocess(raw, spec.transfer);
}

ResultRecord run_experiment(const ExperimentSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  spec.validate();
  const Dataset data = prepare_dataset(spec);
  ResultRecord rec = blank(spec);
  rec.t = static_cast<long>(data.size());
  rec.n = static_cast<long>(data.features());
  const int d = spec.d > 0 ? spec.d : data.classes();
  if (d < 2) throw InvalidArgument("cannot infer a cluster count of at least 2 from the labels");
  rec.d = d;

  ModelConfig cfg;
  cfg.d = d;
  cfg.family = DivergenceFamily(spec.transfer);
  cfg.alpha = spec.alpha;
  cfg.beta = spec.beta;
  cfg.gamma = spec.gamma;
  cfg.geometry = spec.geometry;
  cfg.tolerances = spec.tolerances;
  cfg.trace = spec.trace;
  const Eigen::MatrixXd& x = data.x;
  const std::vector<int>& labels = data.labels;
  const bool scored = data.has_labels();

  if (is_relaxation(spec.model)) {
    cfg.seed = derive_seed(spec.seed, kSolveStream);
    const RelaxationSolution sol = solve_relaxation(spec.model, x, cfg);
    rec.relaxed_objective = sol.objective;
    rec.iterations = sol.iterations;
    rec.converged = sol.converged;
    const RoundingResult rr = spectral_round(sol.m, d, spec.rounding_restarts, derive_seed(spec.seed, kRoundStream));

    std::vector<double> robj, racc, obj, acc, sacc, hacc;
    std::vector<Assignment> finals;
    double best = std::numeric_limits<double>::infinity();
    for (const Assignment& y0 : rr.per_restart) {
      ClusteringResult fin;
      if (spec.model == ModelKind::joint) {
        robj.push_back(joint_hard_objective(x, y0, cfg.family));
        fin = joint_hard_reopt(x, y0, cfg);
        const Eigen::MatrixXd p = posterior(fin.log_prior, fin.centers, x, cfg.family);
        if (scored) {
          sacc.push_back(soft_accuracy(p, labels).value);
          hacc.push_back(hard_posterior_accuracy(fin.log_prior.array().exp().matrix(), fin.centers, x, labels,
                                                 cfg.family)
                             .value);
        }
      } else {
        robj.push_back(cond_objective(x, y0, cfg.family));
        fin = hard_reopt(x, y0, cfg.family, cfg.tolerances.max_sweeps);
      }
      if (scored) {
        racc.push_back(matched_accuracy(y0, labels).value);
        acc.push_back(matched_accuracy(fin.y, labels).value);
      }
      obj.push_back(fin.objective);
      if (fin.objective < best) {
        best = fin.objective;
        rec.checksum = assignment_checksum(fin.y.labels);
      }
      finals.push_back(fin.y);
    }
    set_summary(robj, rec.rounded_objective_mean, rec.rounded_objective_std);
    set_summary(racc, rec.rounded_accuracy_mean, rec.rounded_accuracy_std);
    set_summary(obj, rec.objective_mean, rec.objective_std);
    set_summary(acc, rec.accuracy_mean, rec.accuracy_std);
    set_summary(sacc, rec.soft_accuracy_mean, rec.soft_accuracy_std);
    set_summary(hacc, rec.hard_accuracy_mean, rec.hard_accuracy_std);
    rec.objective_best = best;
    persist(spec, finals);
  } else if (spec.model == ModelKind::alt_hard) {
    cfg.seed = derive_seed(spec.seed, kBaselineStream);
    cfg.restarts = spec.baseline_restarts;
    const ClusteringResult res = alternating_hard(x, cfg, labels);
    rec.objective_mean = res.objective_summary.mean;
    rec.objective_std = res.objective_summary.stddev;
    rec.objective_best = res.objective;
    if (scored) {
      rec.accuracy_mean = res.accuracy_summary.mean;
      rec.accuracy_std = res.accuracy_summary.stddev;
    }
    rec.iterations = static_cast<long>(res.objective_trace.size());
    rec.converged = true;
    rec.checksum = assignment_checksum(res.y.labels);
    persist(spec, {res.y});
  } else {
    cfg.seed = derive_seed(spec.seed, kBaselineStream);
    cfg.restarts = spec.em_restarts;
    const SoftEmResult res = soft_em(x, cfg, labels);
    std::vector<double> nll;
    for (double v : res.loglik_summary.values) nll.push_back(-v);
    set_summary(nll, rec.objective_mean, rec.objective_std);
    rec.objective_best = -res.loglik;
    if (scored) {
      rec.soft_accuracy_mean = res.soft_accuracy_summary.mean;
      rec.soft_accuracy_std = res.soft_accuracy_summary.stddev;
      rec.hard_accuracy_mean = res.hard_accuracy_summary.mean;
      rec.hard_accuracy_std = res.hard_accuracy_summary.stddev;
      rec.accuracy_mean = rec.hard_accuracy_mean;
      rec.accuracy_std = rec.hard_accuracy_std;
    }
    rec.iterations = res.iterations;
    rec.converged = res.iterations < cfg.tolerances.em_max_iter;
    const Assignment y = map_assignment(res.q, res.centers, x, cfg.family);
    rec.checksum = assignment_checksum(y.labels);
    persist(spec, {y});
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<ResultRecord> run_grid(const std::vector<ExperimentSpec>& specs, int workers) {
  std::vector<ResultRecord> out(specs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= specs.size()) return;
      try {
        out[i] = run_experiment(specs[i]);
      } catch (const std::exception& e) {
        out[i] = ResultRecord::failed(specs[i], e.what());
      }
    }
  };
  workers = std::max(1, std::min<int>(workers, static_cast<int>(specs.size())));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  sort_records(out);
  return out;
}

}  // namespace bregcvx
