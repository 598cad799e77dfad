#include "bregcvx/grid.hpp"

#include <filesystem>
#include <memory>
#include <set>

#include "bregcvx/error.hpp"
#include "bregcvx/synthetic.hpp"

namespace bregcvx {
namespace {

std::vector<double> doubles(const KeyValueConfig& c, const std::string& key, double fallback) {
  const std::vector<std::string> raw = c.get_list(key);
  if (raw.empty()) return {fallback};
  std::vector<double> out;
  for (const std::string& v : raw) {
    KeyValueConfig one;
    one.set(key, v);
    out.push_back(one.get_double(key, fallback));
  }
  return out;
}

std::vector<std::string> strings(const KeyValueConfig& c, const std::string& key,
                                 const std::vector<std::string>& fallback) {
  std::vector<std::string> v = c.get_list(key);
  return v.empty() ? fallback : v;
}

/// Distinct <name> components of keys "<prefix><name>.<field>", in sorted order.
std::vector<std::string> group_names(const KeyValueConfig& c, const std::string& prefix) {
  std::set<std::string> names;
  for (const std::string& key : c.keys_with_prefix(prefix)) {
    const std::string rest = key.substr(prefix.size());
    const auto dot = rest.find('.');
    if (dot == std::string::npos || dot == 0) throw InvalidArgument("malformed key '" + key + "'");
    names.insert(rest.substr(0, dot));
  }
  return {names.begin(), names.end()};
}

NormGeometry geometry_from_string(const std::string& s) {
  if (s == "m2") return NormGeometry::m2;
  if (s == "m3") return NormGeometry::m3;
  throw InvalidArgument("unknown geometry '" + s + "' (expected m2 or m3)");
}

}  // namespace

GridPlan build_grid(const KeyValueConfig& c, const std::string& base_dir) {
  GridPlan plan;
  plan.output_dir = c.get("output", "results");
  plan.workers = static_cast<int>(c.get_int("workers", 1));

  ExperimentSpec base;
  base.rounding_restarts = static_cast<int>(c.get_int("rounding_restarts", base.rounding_restarts));
  base.baseline_restarts = static_cast<int>(c.get_int("baseline_restarts", base.baseline_restarts));
  base.em_restarts = static_cast<int>(c.get_int("em_restarts", base.em_restarts));
  base.geometry = geometry_from_string(c.get("geometry", "m2"));
  SolverTolerances& tol = base.tolerances;
  if (c.has("tol")) tol.gcg_tol = tol.admm_tol = c.get_double("tol", 0);
  tol.gcg_tol = c.get_double("gcg_tol", tol.gcg_tol);
  tol.admm_tol = c.get_double("admm_tol", tol.admm_tol);
  tol.gcg_max_iter = static_cast<int>(c.get_int("gcg_max_iter", tol.gcg_max_iter));
  tol.admm_max_iter = static_cast<int>(c.get_int("admm_max_iter", tol.admm_max_iter));
  base.output_dir = plan.output_dir;

  std::vector<ExperimentSpec> sources;
  for (const std::string& name : group_names(c, "dataset.")) {
    const std::string p = "dataset." + name + ".";
    ExperimentSpec s = base;
    s.dataset = name;
    const std::filesystem::path path = c.get(p + "path");
    if (path.empty()) throw InvalidArgument("dataset '" + name + "' has no path");
    s.path = path.is_absolute() ? path.string() : (std::filesystem::path(base_dir) / path).string();
    s.load.label_column = c.get(p + "label_column", s.load.label_column);
    const std::string delim = c.get(p + "delimiter", ",");
    s.load.delimiter = delim == "tab" ? '\t' : delim == "space" ? ' ' : delim.empty() ? ',' : delim[0];
    s.load.drop_columns = c.get_list(p + "drop");
    s.load.missing_token = c.get(p + "missing");
    s.subsample = c.get_int(p + "subsample", 0);
    s.d = static_cast<int>(c.get_int(p + "clusters", c.get_int("clusters", 0)));
    sources.push_back(std::move(s));
  }
  for (const std::string& name : group_names(c, "synthetic.")) {
    const std::string p = "synthetic." + name + ".";
    PlantedOptions o;
    o.clusters = static_cast<int>(c.get_int(p + "clusters", o.clusters));
    o.per_cluster = c.get_int(p + "per_cluster", o.per_cluster);
    o.features = c.get_int(p + "features", o.features);
    o.separation = c.get_double(p + "separation", o.separation);
    o.noise = c.get_double(p + "noise", o.noise);
    o.min_gap = c.get_double(p + "min_gap", o.min_gap);
    o.seed = static_cast<std::uint64_t>(c.get_int(p + "seed", 0));
    ExperimentSpec s = base;
    s.dataset = name;
    auto data = std::make_shared<Dataset>(planted_clusters(o));
    data->name = name;
    s.data = std::move(data);
    s.d = static_cast<int>(c.get_int(p + "clusters_fit", c.get_int("clusters", 0)));
    sources.push_back(std::move(s));
  }
  if (sources.empty()) throw InvalidArgument("the grid names no dataset (dataset.<name>.path or synthetic.<name>.*)");

  const auto models = strings(c, "models", {"cond-jc", "cond", "disc", "joint", "alt-hard", "soft-em"});
  const auto transfers = strings(c, "transfers", {"linear", "sigmoid"});
  const auto alphas = doubles(c, "alpha", base.alpha);
  const auto betas = doubles(c, "beta", base.beta);
  const auto gammas = doubles(c, "gamma", base.gamma);
  std::vector<std::string> seeds = c.get_list("seeds");
  if (seeds.empty()) seeds = {c.get("seed", "0")};

  for (const ExperimentSpec& src : sources)
    for (const std::string& m : models)
      for (const std::string& tr : transfers) {
        const ModelKind model = model_from_string(m);
        const FamilyId family = family_from_string(tr);
        if (model == ModelKind::disc && family != FamilyId::bernoulli) {
          plan.skipped.push_back(src.dataset + "/" + m + "/" + tr + ": the discriminative model is sigmoid-only");
          continue;
        }
        for (double a : alphas)
          for (double b : betas)
            for (double g : gammas)
              for (const std::string& seed : seeds) {
                ExperimentSpec s = src;
                s.model = model;
                s.transfer = family;
                s.alpha = a;
                s.beta = b;
                s.gamma = g;
                KeyValueConfig one;
                one.set("seed", seed);
                const long v = one.get_int("seed", 0);
                if (v < 0) throw InvalidArgument("seeds must be nonnegative");
                s.seed = static_cast<std::uint64_t>(v);
                plan.cells.push_back(std::move(s));
              }
      }
  return plan;
}

}  // namespace bregcvx
