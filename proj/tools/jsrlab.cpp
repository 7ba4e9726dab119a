// jsrlab command-line front end.
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "jsrlab/jsrlab.hpp"

namespace {

using namespace jsrlab;
using harness::json;

void emit(const std::string& out, const std::string& text) {
  if (out.empty())
    std::cout << text;
  else
    harness::write_text(out, text);
}

void emit_json(const std::string& out, const json& j) { emit(out, j.dump(2) + "\n"); }

harness::Benchmark pick_benchmark(const std::string& name, const std::string& matrices) {
  if (!matrices.empty()) return harness::resolve_benchmark(harness::read_json_file(matrices));
  return harness::lookup_benchmark(name);
}

json reference_json(const harness::Benchmark& b) {
  return b.reference ? harness::to_json(*b.reference) : json(nullptr);
}

struct TrainFlags {
  std::size_t layers = 1, width = 10, samples = 500, seeds = 20, epochs = 4000;
  double step = 0.02, l1 = 0.0;
  double budget = 0.0;
  bool incremental = false;
  std::uint64_t seed_base = 0;

  void add(CLI::App* app) {
    app->add_option("--layers", layers, "hidden layers")->capture_default_str();
    app->add_option("--width", width, "neurons per hidden layer")->capture_default_str();
    app->add_option("--samples", samples, "sample points on the unit sphere")->capture_default_str();
    app->add_option("--seeds", seeds, "number of seeds")->capture_default_str();
    app->add_option("--epochs", epochs, "training epochs per seed")->capture_default_str();
    app->add_option("--step", step, "initial Adam step size")->capture_default_str();
    app->add_option("--l1", l1, "L1 weight penalty")->capture_default_str();
    app->add_option("--time-budget", budget, "seconds per seed (0 = unlimited)");
    app->add_flag("--incremental", incremental, "grow the sample set during training");
    app->add_option("--seed-base", seed_base, "first seed")->capture_default_str();
  }

  TrainConfig config() const {
    TrainConfig c;
    c.hidden_layers = layers;
    c.width = width;
    c.n_samples = samples;
    c.n_seeds = seeds;
    c.epochs = epochs;
    c.step_size = step;
    c.l1_coeff = l1;
    c.incremental = incremental;
    if (budget > 0.0) c.time_budget = budget;
    c.validate();
    return c;
  }
};

std::string bands_path_for(const std::string& out) {
  std::filesystem::path p(out);
  return (p.parent_path() / (p.stem().string() + "_bands" + p.extension().string())).string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint spectral radius bounds: products, ellipsoids, ReLU norms, polytope certificates"};
  app.require_subcommand(1);
  std::size_t workers = default_workers();
  app.add_option("--workers", workers, "worker threads (default: JSRLAB_WORKERS or all cores)");

  std::string out, benchmark = "sigma2", matrices;
  auto add_bench = [&](CLI::App* sub) {
    sub->add_option("--benchmark", benchmark, "sigma2, sigma8 or family:<n>")->capture_default_str();
    sub->add_option("--matrices", matrices, "matrix set JSON file (overrides --benchmark)");
    sub->add_option("--out", out, "output file (default stdout)");
  };

  // run
  std::string config_path;
  auto* run = app.add_subcommand("run", "run an experiment described by a JSON config");
  run->add_option("--config", config_path, "experiment config")->required();
  run->add_option("--out", out, "report path (overrides the config's output)");

  // table1
  TrainFlags t1;
  auto* table1 = app.add_subcommand("table1", "seed statistics over {1,2,3} layers x {5,10} neurons on sigma2");
  table1->add_option("--seeds", t1.seeds)->capture_default_str();
  table1->add_option("--samples", t1.samples)->capture_default_str();
  table1->add_option("--epochs", t1.epochs)->capture_default_str();
  table1->add_option("--seed-base", t1.seed_base)->capture_default_str();
  table1->add_option("--out", out, "CSV path (default stdout)");

  // trace
  TrainFlags tr;
  std::size_t buckets = 50;
  std::string bands_out;
  auto* trace = app.add_subcommand("trace", "per-seed convergence traces with min/mean/max bands");
  add_bench(trace);
  tr.add(trace);
  trace->add_option("--buckets", buckets, "time buckets for the bands")->capture_default_str();
  trace->add_option("--bands-out", bands_out, "bands CSV (default <out>_bands.csv)");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "lower and ellipsoidal bounds");
  bounds->require_subcommand(1);
  std::size_t max_len = 8;
  double cap = 1e7;
  bool prune = false;
  auto* lower = bounds->add_subcommand("lower", "max over products of rho(A)^(1/k)");
  add_bench(lower);
  lower->add_option("--max-len", max_len, "longest product")->capture_default_str();
  lower->add_option("--cap", cap, "maximum number of words M^L")->capture_default_str();
  lower->add_flag("--prune", prune, "skip subtrees whose norm bound cannot win");
  std::size_t restarts = 10, iters = 3000;
  std::uint64_t eseed = 0;
  auto* ell = bounds->add_subcommand("ellipsoid", "best quadratic norm by subgradient descent");
  add_bench(ell);
  ell->add_option("--restarts", restarts)->capture_default_str();
  ell->add_option("--iters", iters)->capture_default_str();
  ell->add_option("--seed", eseed)->capture_default_str();

  // theory
  auto* theory = app.add_subcommand("theory", "closed-form guarantees and size bounds");
  theory->require_subcommand(1);
  std::uint64_t tn = 2, td = 2, tk = 2, n_max = 30;
  double tau = 2.0;
  auto* tq = theory->add_subcommand("tau-quad", "quadratic-norm guarantee");
  auto* ts = theory->add_subcommand("tau-sos", "SOS guarantee constant");
  auto* tb = theory->add_subcommand("barvinok-d", "Barvinok vertex budget D(n,k)");
  auto* tm = theory->add_subcommand("min-k", "smallest k meeting precision tau");
  auto* tf = theory->add_subcommand("mcmullen", "face bound for k vertices in dimension n");
  auto* tsb = theory->add_subcommand("structure", "network depth and width bound");
  auto* fig1 = theory->add_subcommand("fig1", "polytopic vs SOS variable counts");
  for (auto* s : {tq, ts, tb, tm, tf, tsb}) {
    s->add_option("--n", tn)->required();
    s->add_option("--out", out);
  }
  ts->add_option("--d", td)->required();
  tb->add_option("--k", tk)->required();
  tf->add_option("--k", tk)->required();
  tm->add_option("--tau", tau)->required();
  tsb->add_option("--tau", tau)->required();
  td = 3;
  fig1->add_option("--d", td)->capture_default_str();
  fig1->add_option("--n-max", n_max)->capture_default_str();
  fig1->add_option("--out", out);

  // train
  TrainFlags tf_train;
  std::string save_network, save_samples;
  auto* train_cmd = app.add_subcommand("train", "train ReLU norm approximations over several seeds");
  add_bench(train_cmd);
  tf_train.add(train_cmd);
  train_cmd->add_option("--save-network", save_network, "write the best seed's network JSON");
  train_cmd->add_option("--save-samples", save_samples, "write the best seed's sample set JSON");

  // certify
  std::string network_path, samples_path, polytope_out;
  auto* certify = app.add_subcommand("certify", "certified upper bound from a trained network");
  add_bench(certify);
  certify->add_option("--network", network_path)->required();
  certify->add_option("--samples", samples_path)->required();
  certify->add_option("--polytope-out", polytope_out, "write the polytope vertices JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? harness::exit_ok : harness::exit_config;
  }
  workers = std::max<std::size_t>(1, std::min(workers, default_workers()));

  try {
    if (*run) {
      harness::ExperimentConfig cfg = harness::experiment_config_from_json(harness::read_json_file(config_path));
      if (!out.empty()) cfg.output = out;
      const auto outcome = harness::run_experiment(cfg, workers);
      if (cfg.output.empty()) std::cout << outcome.report.dump(2) << "\n";
      return outcome.budget_exhausted ? harness::exit_budget : harness::exit_ok;
    }
    if (*table1) {
      TrainConfig base;
      base.epochs = t1.epochs;
      emit(out, harness::table1_csv(harness::table1_repro(t1.seeds, t1.samples, base, t1.seed_base, workers)));
      return harness::exit_ok;
    }
    if (*trace) {
      const auto bench = pick_benchmark(benchmark, matrices);
      const TrainConfig cfg = tr.config();
      const auto results = train_seeds(cfg, bench.set, tr.seed_base, workers);
      const auto tables = harness::convergence_trace(results, buckets);
      emit(out, tables.traces);
      if (bands_out.empty() && !out.empty()) bands_out = bands_path_for(out);
      if (!bands_out.empty()) harness::write_text(bands_out, tables.bands);
      for (const auto& r : results)
        if (r.budget_exhausted) return harness::exit_budget;
      return harness::exit_ok;
    }
    if (*lower) {
      const auto bench = pick_benchmark(benchmark, matrices);
      ProductSearchOptions o;
      o.max_length = max_len;
      o.cap = cap;
      o.prune = prune;
      o.workers = workers;
      emit_json(out, {{"benchmark", bench.name},
                      {"computed", to_json(lower_bound_products(bench.set, o))},
                      {"reference", reference_json(bench)}});
      return harness::exit_ok;
    }
    if (*ell) {
      const auto bench = pick_benchmark(benchmark, matrices);
      EllipsoidOptions o;
      o.restarts = restarts;
      o.iters = iters;
      o.seed = eseed;
      o.workers = workers;
      auto [r, norm] = ellipsoidal_upper_bound(bench.set, o);
      json comp = to_json(r);
      comp["gram"] = json::array();
      const Matrix p = norm.gram();
      for (std::size_t i = 0; i < p.rows(); ++i) comp["gram"].push_back(Vector(p.row(i).begin(), p.row(i).end()));
      emit_json(out, {{"benchmark", bench.name}, {"computed", comp}, {"reference", reference_json(bench)}});
      return harness::exit_ok;
    }
    if (*fig1) {
      emit(out, harness::fig1_csv(td, n_max));
      return harness::exit_ok;
    }
    if (*theory) {
      json q = {{"n", tn}};
      if (*tq) q["query"] = "tau-quad";
      if (*ts) q.update({{"query", "tau-sos"}, {"d", td}});
      if (*tb) q.update({{"query", "barvinok-d"}, {"k", tk}});
      if (*tm) q.update({{"query", "min-k"}, {"tau", tau}});
      if (*tf) q.update({{"query", "mcmullen"}, {"k", tk}});
      if (*tsb) q.update({{"query", "structure"}, {"tau", tau}});
      emit_json(out, harness::theory_query(q));
      return harness::exit_ok;
    }
    if (*train_cmd) {
      const auto bench = pick_benchmark(benchmark, matrices);
      const TrainConfig cfg = tf_train.config();
      harness::NeuralRun r = harness::run_neural(bench, cfg, tf_train.seed_base, workers);
      json report = {{"benchmark", bench.name},
                     {"seed_base", tf_train.seed_base},
                     {"train_config", harness::to_json(cfg)},
                     {"computed", r.report},
                     {"reference", reference_json(bench)}};
      emit_json(out, report);
      if (!r.results.empty()) {
        const auto& best = r.results[harness::best_seed_index(r.results)];
        if (!save_network.empty()) harness::write_text(save_network, to_json(best.best_params).dump() + "\n");
        if (!save_samples.empty()) harness::write_text(save_samples, to_json(best.samples).dump() + "\n");
      }
      return r.budget_exhausted ? harness::exit_budget : harness::exit_ok;
    }
    if (*certify) {
      const auto bench = pick_benchmark(benchmark, matrices);
      const NetworkParams net = network_from_json(harness::read_json_file(network_path));
      const SampleSet samples = sample_set_from_json(harness::read_json_file(samples_path));
      PolytopeBuildStats stats;
      const PolytopeNorm poly = build_polytope_norm(net, samples, &stats);
      json comp = to_json(certified_bound(poly, bench.set));
      comp["dropped_samples"] = stats.dropped;
      emit_json(out, {{"benchmark", bench.name}, {"computed", comp}, {"reference", reference_json(bench)}});
      if (!polytope_out.empty()) harness::write_text(polytope_out, to_json(poly).dump() + "\n");
      return harness::exit_ok;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return harness::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return harness::exit_numeric;
  }
  return harness::exit_ok;
}
