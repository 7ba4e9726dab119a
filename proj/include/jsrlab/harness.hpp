#ifndef JSRLAB_HARNESS_HPP
#define JSRLAB_HARNESS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jsrlab/bound_report.hpp"
#include "jsrlab/ellipsoid.hpp"
#include "jsrlab/error.hpp"
#include "jsrlab/matset.hpp"
#include "jsrlab/polytope.hpp"
#include "jsrlab/products.hpp"
#include "jsrlab/theory.hpp"
#include "jsrlab/training.hpp"

namespace jsrlab::harness {

using nlohmann::json;

// Exit codes shared by the CLI.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_numeric = 3;
inline constexpr int exit_budget = 4;

inline int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::config: return exit_config;
    case ErrorKind::numeric: return exit_numeric;
    case ErrorKind::budget: return exit_budget;
  }
  return exit_numeric;
}

/// Externally published values for a benchmark. Never produced by this code.
struct ReferenceConstants {
  std::optional<double> jsr;
  std::optional<double> rho_q;
  std::optional<double> rho_sos4;
  std::string citation;
};

inline json to_json(const ReferenceConstants& r) {
  json j = {{"source", r.citation}};
  if (r.jsr) j["jsr"] = *r.jsr;
  if (r.rho_q) j["rho_q"] = *r.rho_q;
  if (r.rho_sos4) j["rho_sos4"] = *r.rho_sos4;
  return j;
}

struct Benchmark {
  std::string name;
  MatrixSet set;
  std::optional<ReferenceConstants> reference;
};

inline std::vector<std::string> benchmark_names() { return {"sigma2", "sigma8", "family:<n>"}; }

inline std::optional<ReferenceConstants> reference_for(const std::string& name) {
  if (name == "sigma2")
    return ReferenceConstants{8.6881, 9.5868, 8.7203, "published reference values for the 2x2 two-mode benchmark"};
  if (name == "sigma8" || name == "family:8")
    return ReferenceConstants{1.0, 2.4286, 1.0006, "published reference values for the 8x8 column family"};
  return std::nullopt;
}

inline Benchmark lookup_benchmark(const std::string& name) {
  if (name == "sigma2") return {name, benchmark_sigma2(), reference_for(name)};
  if (name == "sigma8") return {name, benchmark_sigma8(), reference_for(name)};
  if (name.rfind("family:", 0) == 0) {
    std::size_t n = 0;
    try {
      n = std::stoul(name.substr(7));
    } catch (...) {
      throw ConfigError("bad family size in '" + name + "'");
    }
    return {name, benchmark_column_family(n), reference_for(name)};
  }
  std::string opts;
  for (const auto& s : benchmark_names()) opts += (opts.empty() ? "" : ", ") + s;
  throw ConfigError("unknown benchmark '" + name + "'; available: " + opts);
}

/// A named benchmark or an inline {"n", "matrices"} object.
inline Benchmark resolve_benchmark(const json& spec) {
  if (spec.is_string()) return lookup_benchmark(spec.get<std::string>());
  if (spec.is_object()) return {"inline", matrix_set_from_json(spec), std::nullopt};
  throw ConfigError("benchmark must be a name or an inline matrix set");
}

/// Shortest round-trip formatting (17 significant digits), '.' decimal separator.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  out << text;
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }
}

template <class T>
T param(const json& p, const char* key, T fallback) {
  if (!p.contains(key)) return fallback;
  try {
    return p.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------------------
// Neural training

inline TrainConfig train_config_from_json(const json& p) {
  TrainConfig c;
  c.hidden_layers = param<std::size_t>(p, "layers", c.hidden_layers);
  c.width = param<std::size_t>(p, "width", c.width);
  c.n_samples = param<std::size_t>(p, "samples", c.n_samples);
  c.n_seeds = param<std::size_t>(p, "seeds", c.n_seeds);
  c.epochs = param<std::size_t>(p, "epochs", c.epochs);
  c.step_size = param<double>(p, "step_size", c.step_size);
  c.final_step_ratio = param<double>(p, "final_step_ratio", c.final_step_ratio);
  c.l1_coeff = param<double>(p, "l1", c.l1_coeff);
  c.incremental = param<bool>(p, "incremental", c.incremental);
  if (p.contains("incremental_schedule"))
    c.incremental_schedule = param<std::vector<std::pair<std::size_t, std::size_t>>>(p, "incremental_schedule", {});
  c.ratio_epsilon = param<double>(p, "ratio_epsilon", c.ratio_epsilon);
  c.temperature_start = param<double>(p, "temperature_start", c.temperature_start);
  c.temperature_end = param<double>(p, "temperature_end", c.temperature_end);
  c.hinge_weight = param<double>(p, "hinge_weight", c.hinge_weight);
  if (p.contains("time_budget")) c.time_budget = param<double>(p, "time_budget", 0.0);
  c.validate();
  return c;
}

inline json to_json(const TrainConfig& c) {
  json j = {{"layers", c.hidden_layers},     {"width", c.width},
            {"samples", c.n_samples},        {"seeds", c.n_seeds},
            {"epochs", c.epochs},            {"step_size", c.step_size},
            {"final_step_ratio", c.final_step_ratio}, {"l1", c.l1_coeff},
            {"incremental", c.incremental},  {"ratio_epsilon", c.ratio_epsilon},
            {"temperature_start", c.temperature_start}, {"temperature_end", c.temperature_end},
            {"hinge_weight", c.hinge_weight}};
  if (c.incremental) j["incremental_schedule"] = c.effective_schedule();
  if (c.time_budget) j["time_budget"] = *c.time_budget;
  return j;
}

inline json seed_to_json(const TrainResult& r) {
  json trace = json::array();
  for (const auto& t : r.trace) trace.push_back({t.time, t.loss});
  return {{"seed", r.seed},
          {"best_loss", r.best_loss},
          {"samples", r.samples.size()},
          {"reinitializations", r.reinitializations},
          {"budget_exhausted", r.budget_exhausted},
          {"trace", std::move(trace)}};
}

struct NeuralRun {
  std::vector<TrainResult> results;
  json report;
  bool budget_exhausted = false;
};

inline NeuralRun run_neural(const Benchmark& bench, const TrainConfig& cfg, std::uint64_t seed_base,
                            std::size_t workers) {
  NeuralRun run;
  run.results = train_seeds(cfg, bench.set, seed_base, workers);
  const SeedSummary s = summarize(run.results);
  json seeds = json::array();
  for (const auto& r : run.results) {
    seeds.push_back(seed_to_json(r));
    run.budget_exhausted = run.budget_exhausted || r.budget_exhausted;
  }
  run.report = {{"seeds", std::move(seeds)},
                {"aggregate", {{"best", s.best}, {"mean", s.mean}, {"std", s.std}}},
                {"kind", std::string(to_string(BoundKind::empirical))}};
  return run;
}

/// Index of the seed with the lowest best_loss.
inline std::size_t best_seed_index(const std::vector<TrainResult>& results) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (results[i].best_loss < results[best].best_loss) best = i;
  return best;
}

// ---------------------------------------------------------------------------------------
// Theory

inline std::string big(const theory::BigInt& v) { return v.str(); }

inline json theory_query(const json& p) {
  const auto query = param<std::string>(p, "query", "");
  if (query == "tau-quad") {
    const auto n = param<std::uint64_t>(p, "n", 0);
    return {{"query", query}, {"n", n}, {"tau_quad", theory::tau_quad(n)}};
  }
  if (query == "tau-sos") {
    const auto n = param<std::uint64_t>(p, "n", 0);
    const auto d = param<std::uint64_t>(p, "d", 0);
    return {{"query", query}, {"n", n}, {"d", d}, {"tau_sos", big(theory::tau_sos(n, d))}};
  }
  if (query == "barvinok-d") {
    const auto n = param<std::uint64_t>(p, "n", 0);
    const auto k = param<std::uint64_t>(p, "k", 0);
    return {{"query", query}, {"n", n}, {"k", k}, {"D", big(theory::barvinok_D(n, k))}};
  }
  if (query == "min-k") {
    const auto n = param<std::uint64_t>(p, "n", 0);
    const auto tau = param<double>(p, "tau", 0.0);
    const auto k = theory::barvinok_min_k(n, tau, param<std::uint64_t>(p, "ceiling", 10000));
    json j = {{"query", query}, {"n", n}, {"tau", tau}};
    j["k"] = k ? json(*k) : json(nullptr);
    return j;
  }
  if (query == "mcmullen") {
    const auto n = param<std::uint64_t>(p, "n", 0);
    const auto k = param<std::uint64_t>(p, "k", 0);
    return {{"query", query}, {"n", n}, {"k", k}, {"faces", big(theory::mcmullen_faces(n, k))}};
  }
  if (query == "structure") {
    const auto n = param<std::uint64_t>(p, "n", 0);
    const auto tau = param<double>(p, "tau", 0.0);
    const auto b = theory::network_structure_bound(n, tau, param<std::uint64_t>(p, "ceiling", 10000));
    if (!b) throw NumericError("no Barvinok k below the ceiling for this tau");
    return {{"query", query},          {"n", n},
            {"tau", tau},              {"depth", b->depth},
            {"k_tau", b->k_tau},       {"vertices", big(b->vertices)},
            {"faces", big(b->faces)},  {"width_exponent", b->width_exponent},
            {"log10_width", static_cast<double>(b->log10_width)}};
  }
  throw ConfigError("unknown theory query '" + query +
                    "'; available: tau-quad, tau-sos, barvinok-d, min-k, mcmullen, structure, fig1");
}

/// Polytopic vs SOS variable counts for n = 2..n_max (CSV: n, cpwl_vars, sos_vars, tau).
inline std::string fig1_csv(std::uint64_t d, std::uint64_t n_max) {
  if (n_max < 2) throw DomainError("n_max must be >= 2");
  std::vector<std::uint64_t> dims;
  for (std::uint64_t n = 2; n <= n_max; ++n) dims.push_back(n);
  const auto rows = theory::variables_comparison(dims, d);
  std::ostringstream out;
  out << "# d=" << d << "; sos_vars assumes the Gram-matrix parameter count t(t+1)/2 with t=C(n+d-1,d)\n";
  out << "n,cpwl_vars,sos_vars,tau\n";
  for (const auto& r : rows) out << r.n << ',' << big(r.cpwl_vars) << ',' << big(r.sos_vars) << ',' << big(r.tau) << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------------------
// Table 1 and convergence traces

struct Table1Row {
  std::size_t layers = 0;
  std::size_t width = 0;
  std::optional<SeedSummary> summary;  // empty when the cell failed
  std::string error;
};

struct Table1Reference {
  std::size_t layers, width;
  double best, mean, std;
};

inline const std::vector<Table1Reference>& table1_reference() {
  static const std::vector<Table1Reference> ref = {
      {1, 5, 8.6977, 9.0251, 0.8800},  {1, 10, 8.6910, 8.6969, 0.0056}, {2, 5, 8.6983, 8.9312, 0.4645},
      {2, 10, 8.6944, 8.7049, 0.0077}, {3, 5, 8.6967, 9.1984, 0.7293},  {3, 10, 8.6946, 8.7130, 0.0175},
  };
  return ref;
}

/// Trains every (layers, width) in {1,2,3} x {5,10} on the 2x2 benchmark.
inline std::vector<Table1Row> table1_repro(std::size_t seeds, std::size_t samples, TrainConfig base = {},
                                           std::uint64_t seed_base = 0, std::size_t workers = 1) {
  if (seeds < 2) throw DomainError("table1 needs at least 2 seeds");
  const MatrixSet set = benchmark_sigma2();
  std::vector<Table1Row> rows;
  for (std::size_t k : {1, 2, 3}) {
    for (std::size_t m : {5, 10}) {
      Table1Row row{k, m, std::nullopt, {}};
      try {
        TrainConfig cfg = base;
        cfg.hidden_layers = k;
        cfg.width = m;
        cfg.n_samples = samples;
        cfg.n_seeds = seeds;
        row.summary = summarize(train_seeds(cfg, set, seed_base, workers));
      } catch (const Error& e) {
        row.error = e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

inline std::string table1_csv(const std::vector<Table1Row>& rows) {
  std::ostringstream out;
  out << "k,m,best,mean,std,status,ref_best,ref_mean,ref_std\n";
  for (const auto& r : rows) {
    out << r.layers << ',' << r.width << ',';
    if (r.summary)
      out << fmt(r.summary->best) << ',' << fmt(r.summary->mean) << ',' << fmt(r.summary->std) << ",ok,";
    else
      out << ",,,failed,";
    bool found = false;
    for (const auto& ref : table1_reference()) {
      if (ref.layers == r.layers && ref.width == r.width) {
        out << fmt(ref.best) << ',' << fmt(ref.mean) << ',' << fmt(ref.std);
        found = true;
      }
    }
    if (!found) out << ",,";
    out << '\n';
  }
  return out.str();
}

struct TraceTables {
  std::string traces;  // seed,time,loss,best_so_far
  std::string bands;   // time,mean,min,max,seeds (over best_so_far)
};

/// Per-seed convergence traces plus min/mean/max bands over a uniform time grid.
inline TraceTables convergence_trace(const std::vector<TrainResult>& results, std::size_t buckets = 50) {
  TraceTables t;
  std::ostringstream tr, bd;
  tr << "seed,time,loss,best_so_far\n";
  bd << "time,mean,min,max,seeds\n";
  double tmax = 0.0;
  for (const auto& r : results) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : r.trace) {
      best = std::min(best, p.loss);
      tr << r.seed << ',' << fmt(p.time) << ',' << fmt(p.loss) << ',' << fmt(best) << '\n';
      tmax = std::max(tmax, p.time);
    }
  }
  if (!results.empty() && buckets > 0) {
    for (std::size_t b = 1; b <= buckets; ++b) {
      const double tb = tmax * static_cast<double>(b) / static_cast<double>(buckets);
      double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
      std::size_t count = 0;
      for (const auto& r : results) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : r.trace) {
          if (p.time > tb) break;
          best = std::min(best, p.loss);
        }
        if (!std::isfinite(best)) continue;
        lo = std::min(lo, best);
        hi = std::max(hi, best);
        sum += best;
        ++count;
      }
      if (count == 0) continue;
      bd << fmt(tb) << ',' << fmt(sum / static_cast<double>(count)) << ',' << fmt(lo) << ',' << fmt(hi) << ','
         << count << '\n';
    }
  }
  t.traces = tr.str();
  t.bands = bd.str();
  return t;
}

// ---------------------------------------------------------------------------------------
// Config-driven experiments

struct ExperimentConfig {
  json benchmark = "sigma2";
  std::string method;
  json params = json::object();
  std::string output;
  std::uint64_t seed_base = 0;
};

inline ExperimentConfig experiment_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  ExperimentConfig c;
  c.benchmark = j.value("benchmark", json("sigma2"));
  c.method = param<std::string>(j, "method", "");
  c.params = j.value("params", json::object());
  if (!c.params.is_object()) throw ConfigError("params must be an object");
  // Method parameters may also sit at the top level.
  for (const auto& [key, value] : j.items())
    if (key != "benchmark" && key != "method" && key != "params" && key != "output" && key != "seed_base")
      c.params[key] = value;
  c.output = param<std::string>(j, "output", "");
  c.seed_base = param<std::uint64_t>(j, "seed_base", 0);
  static const std::vector<std::string> methods = {"neural", "ellipsoid", "lower", "certify", "theory"};
  if (std::find(methods.begin(), methods.end(), c.method) == methods.end())
    throw ConfigError("unknown method '" + c.method + "'; available: neural, ellipsoid, lower, certify, theory");
  if (c.method != "theory") resolve_benchmark(c.benchmark);
  return c;
}

struct ExperimentOutcome {
  json report;
  bool budget_exhausted = false;
};

/// Runs one experiment. Computed values live under "computed"; published constants under
/// "reference" and are never mixed in.
inline ExperimentOutcome run_experiment(const ExperimentConfig& cfg, std::size_t workers = 1) {
  ExperimentOutcome out;
  json report = {{"method", cfg.method}, {"seed_base", cfg.seed_base}, {"params", cfg.params}};

  if (cfg.method == "theory") {
    report["computed"] = theory_query(cfg.params);
    report["reference"] = nullptr;
  } else {
    const Benchmark bench = resolve_benchmark(cfg.benchmark);
    report["benchmark"] = bench.name;
    report["reference"] = bench.reference ? to_json(*bench.reference) : json(nullptr);

    if (cfg.method == "lower") {
      ProductSearchOptions o;
      o.max_length = param<std::size_t>(cfg.params, "max_length", param<std::size_t>(cfg.params, "max_len", 8));
      o.cap = param<double>(cfg.params, "cap", o.cap);
      o.prune = param<bool>(cfg.params, "prune", false);
      o.workers = workers;
      report["computed"] = to_json(lower_bound_products(bench.set, o));
    } else if (cfg.method == "ellipsoid") {
      EllipsoidOptions o;
      o.restarts = param<std::size_t>(cfg.params, "restarts", o.restarts);
      o.iters = param<std::size_t>(cfg.params, "iters", o.iters);
      o.seed = param<std::uint64_t>(cfg.params, "seed", cfg.seed_base);
      o.workers = workers;
      auto [r, norm] = ellipsoidal_upper_bound(bench.set, o);
      json comp = to_json(r);
      const Matrix& l = norm.factor();
      comp["factor_lower"] = json::array();
      for (std::size_t i = 0; i < l.rows(); ++i)
        comp["factor_lower"].push_back(std::vector<double>(l.row(i).begin(), l.row(i).end()));
      report["computed"] = std::move(comp);
    } else if (cfg.method == "neural") {
      const TrainConfig tc = train_config_from_json(cfg.params);
      NeuralRun run = run_neural(bench, tc, cfg.seed_base, workers);
      report["train_config"] = to_json(tc);
      report["computed"] = std::move(run.report);
      out.budget_exhausted = run.budget_exhausted;
    } else if (cfg.method == "certify") {
      json comp = json::array();
      auto certify_one = [&](const NetworkParams& net, const SampleSet& samples, json extra) {
        PolytopeBuildStats stats;
        const PolytopeNorm poly = build_polytope_norm(net, samples, &stats);
        json b = to_json(certified_bound(poly, bench.set));
        b["dropped_samples"] = stats.dropped;
        b.update(extra);
        comp.push_back(std::move(b));
      };
      if (cfg.params.contains("network")) {
        const NetworkParams net = network_from_json(read_json_file(param<std::string>(cfg.params, "network", "")));
        const SampleSet samples =
            sample_set_from_json(read_json_file(param<std::string>(cfg.params, "samples", "")));
        certify_one(net, samples, json::object());
      } else {
        const TrainConfig tc = train_config_from_json(cfg.params);
        NeuralRun run = run_neural(bench, tc, cfg.seed_base, workers);
        for (const auto& r : run.results)
          certify_one(r.best_params, r.samples, {{"seed", r.seed}, {"empirical_loss", r.best_loss}});
        out.budget_exhausted = run.budget_exhausted;
        report["train_config"] = to_json(tc);
      }
      report["computed"] = std::move(comp);
    }
  }

  if (!cfg.output.empty()) write_text(cfg.output, report.dump(2) + "\n");
  out.report = std::move(report);
  return out;
}

}  // namespace jsrlab::harness

#endif  // JSRLAB_HARNESS_HPP
