#include <cstdio>
#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "jsrlab/harness.hpp"

using namespace jsrlab;
using namespace jsrlab::harness;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

// Drops wall-clock fields so reports can be compared across runs.
nlohmann::json strip_times(nlohmann::json j) {
  if (j.is_object()) {
    j.erase("wall_time");
    if (j.contains("trace")) {
      for (auto& p : j["trace"]) p[0] = 0.0;
    }
    for (auto& [k, v] : j.items()) v = strip_times(v);
  } else if (j.is_array()) {
    for (auto& v : j) v = strip_times(v);
  }
  return j;
}

}  // namespace

TEST(Registry, NamedBenchmarks) {
  EXPECT_EQ(lookup_benchmark("sigma2").set.dim(), 2u);
  EXPECT_EQ(lookup_benchmark("sigma8").set.size(), 8u);
  EXPECT_EQ(lookup_benchmark("family:5").set.dim(), 5u);
  EXPECT_FALSE(lookup_benchmark("family:5").reference.has_value());
  ASSERT_TRUE(lookup_benchmark("sigma8").reference.has_value());
  EXPECT_EQ(*lookup_benchmark("sigma8").reference->rho_q, 2.4286);
  EXPECT_EQ(*lookup_benchmark("sigma2").reference->jsr, 8.6881);
  EXPECT_EQ(*lookup_benchmark("sigma2").reference->rho_sos4, 8.7203);
  try {
    lookup_benchmark("sigma3");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("sigma2"), std::string::npos);
  }
  EXPECT_THROW(lookup_benchmark("family:x"), ConfigError);
}

TEST(Formatting, SeventeenDigits) {
  EXPECT_EQ(fmt(0.1), "0.10000000000000001");
  EXPECT_EQ(fmt(2.0), "2");
  EXPECT_EQ(std::stod(fmt(8.6880707123456789)), 8.6880707123456789);
}

TEST(ExitCodes, DistinctPerKind) {
  EXPECT_EQ(exit_code_for(ConfigError("x")), exit_config);
  EXPECT_EQ(exit_code_for(ShapeError("x")), exit_config);
  EXPECT_EQ(exit_code_for(NumericError("x")), exit_numeric);
  EXPECT_EQ(exit_code_for(InfeasibleError("x")), exit_numeric);
  EXPECT_EQ(exit_code_for(BudgetExceededError("x")), exit_budget);
  EXPECT_NE(exit_config, exit_numeric);
  EXPECT_NE(exit_numeric, exit_budget);
  EXPECT_NE(exit_ok, exit_config);
}

TEST(Experiment, ConfigErrors) {
  EXPECT_THROW(experiment_config_from_json(nlohmann::json::parse(R"({"benchmark": "sigma2"})")), ConfigError);
  EXPECT_THROW(experiment_config_from_json(nlohmann::json::parse(R"({"benchmark": "nope", "method": "lower"})")),
               ConfigError);
  EXPECT_THROW(experiment_config_from_json(nlohmann::json::parse("[1, 2]")), ConfigError);
  const auto bad = std::filesystem::temp_directory_path() / "jsrlab_bad.json";
  write_text(bad.string(), "{\"method\": ");
  EXPECT_THROW(read_json_file(bad.string()), ConfigError);
  std::filesystem::remove(bad);
}

TEST(Experiment, EllipsoidReportsReferenceSideBySide) {
  auto cfg = experiment_config_from_json(
      nlohmann::json::parse(R"({"benchmark": "sigma2", "method": "ellipsoid", "restarts": 2, "iters": 1500})"));
  const json rep = run_experiment(cfg).report;
  EXPECT_EQ(rep.at("reference").at("rho_q").get<double>(), 9.5868);
  const double v = rep.at("computed").at("value").get<double>();
  EXPECT_GE(v, 8.6881);
  EXPECT_LE(v, 9.64);
  EXPECT_EQ(rep.at("computed").at("kind"), "certified-upper");
  // No reference constant leaks into the computed block.
  for (const char* key : {"jsr", "rho_q", "rho_sos4"}) EXPECT_FALSE(rep.at("computed").contains(key));
}

TEST(Experiment, Sigma8LowerBoundAtMostOne) {
  auto cfg = experiment_config_from_json(
      nlohmann::json::parse(R"({"benchmark": "sigma8", "method": "lower", "max_len": 6})"));
  const json rep = run_experiment(cfg).report;
  EXPECT_LE(rep.at("computed").at("value").get<double>(), 1.0 + 1e-12);
  EXPECT_EQ(rep.at("computed").at("meta").at("max_length"), 6);
}

TEST(Experiment, InlineMatrixSetAndOutputFile) {
  const auto out = std::filesystem::temp_directory_path() / "jsrlab_report.json";
  json j = {{"benchmark", to_json(benchmark_sigma2())},
            {"method", "lower"},
            {"params", {{"max_length", 4}}},
            {"output", out.string()}};
  run_experiment(experiment_config_from_json(j));
  const json rep = read_json_file(out.string());
  EXPECT_EQ(rep.at("benchmark"), "inline");
  EXPECT_TRUE(rep.at("reference").is_null());
  std::filesystem::remove(out);
}

TEST(Experiment, NeuralDeterministicOnOneWorker) {
  const json j = json::parse(
      R"({"benchmark": "sigma2", "method": "neural", "seed_base": 3,
          "params": {"layers": 1, "width": 4, "samples": 30, "seeds": 2, "epochs": 40}})");
  const auto cfg = experiment_config_from_json(j);
  const json a = strip_times(run_experiment(cfg, 1).report);
  const json b = strip_times(run_experiment(cfg, 1).report);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.at("computed").at("seeds").size(), 2u);
  EXPECT_EQ(a.at("computed").at("seeds")[0].at("seed"), 3);
}

TEST(Experiment, CertifyTrainsAndCertifies) {
  const json j = json::parse(
      R"({"benchmark": "sigma2", "method": "certify",
          "params": {"layers": 1, "width": 5, "samples": 40, "seeds": 2, "epochs": 60}})");
  const json rep = run_experiment(experiment_config_from_json(j)).report;
  ASSERT_EQ(rep.at("computed").size(), 2u);
  for (const auto& c : rep.at("computed")) {
    EXPECT_GE(c.at("value").get<double>(), 8.6880);
    EXPECT_EQ(c.at("kind"), "certified-upper");
  }
}

TEST(Experiment, TheoryQueries) {
  auto run = [](const char* text) { return run_experiment(experiment_config_from_json(json::parse(text))).report; };
  EXPECT_EQ(run(R"({"method": "theory", "query": "tau-sos", "n": 2, "d": 2})").at("computed").at("tau_sos"), "3");
  EXPECT_EQ(run(R"({"method": "theory", "query": "barvinok-d", "n": 2, "k": 2})").at("computed").at("D"), "4");
  EXPECT_EQ(run(R"({"method": "theory", "query": "tau-quad", "n": 4})").at("computed").at("tau_quad"), 2.0);
  EXPECT_THROW(run(R"({"method": "theory", "query": "nope"})"), ConfigError);
  EXPECT_THROW(run(R"({"method": "theory", "query": "structure", "n": 4, "tau": 1.0000001, "ceiling": 50})"),
               NumericError);
}

TEST(Fig1, CsvShape) {
  const auto rows = parse_csv(fig1_csv(3, 10));
  ASSERT_EQ(rows.size(), 10u);  // header + n = 2..10
  EXPECT_EQ(rows[0], (std::vector<std::string>{"n", "cpwl_vars", "sos_vars", "tau"}));
  EXPECT_EQ(rows[1][0], "2");
  EXPECT_NE(fig1_csv(3, 4).find("# d=3"), std::string::npos);
  EXPECT_THROW(fig1_csv(3, 1), DomainError);
}

TEST(Table1, SmallRunLayout) {
  TrainConfig base;
  base.epochs = 15;
  const auto rows = table1_repro(2, 15, base);
  ASSERT_EQ(rows.size(), 6u);
  const auto csv = parse_csv(table1_csv(rows));
  ASSERT_EQ(csv.size(), 7u);
  EXPECT_EQ(csv[0], (std::vector<std::string>{"k", "m", "best", "mean", "std", "status", "ref_best", "ref_mean",
                                              "ref_std"}));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ASSERT_TRUE(rows[i].summary.has_value());
    EXPECT_GE(rows[i].summary->std, 0.0);
    EXPECT_LE(rows[i].summary->best, rows[i].summary->mean);
    EXPECT_EQ(csv[i + 1][5], "ok");
  }
  EXPECT_EQ(csv[2][0], "1");
  EXPECT_EQ(csv[2][1], "10");
  EXPECT_EQ(csv[2][6], "8.6910000000000007");
  EXPECT_THROW(table1_repro(1, 10), DomainError);
}

TEST(Table1, FailedCellsAreMarked) {
  std::vector<Table1Row> rows{{1, 5, std::nullopt, "boom"}};
  const auto csv = parse_csv(table1_csv(rows));
  ASSERT_EQ(csv.size(), 2u);
  EXPECT_EQ(csv[1][5], "failed");
  EXPECT_EQ(csv[1][2], "");
}

TEST(Trace, EmptySeedListGivesHeaderOnly) {
  const TraceTables t = convergence_trace({});
  EXPECT_EQ(t.traces, "seed,time,loss,best_so_far\n");
  EXPECT_EQ(t.bands, "time,mean,min,max,seeds\n");
}

TEST(Trace, BestSoFarNonincreasingAndBandsOrdered) {
  TrainConfig c;
  c.width = 4;
  c.n_samples = 30;
  c.n_seeds = 3;
  c.epochs = 50;
  const auto results = train_seeds(c, benchmark_sigma2(), 0);
  const TraceTables t = convergence_trace(results, 10);
  const auto rows = parse_csv(t.traces);
  std::map<std::string, double> last;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double best = std::stod(rows[i][3]);
    if (last.count(rows[i][0])) {
      EXPECT_LE(best, last[rows[i][0]]);
    }
    last[rows[i][0]] = best;
  }
  EXPECT_EQ(last.size(), 3u);
  const auto bands = parse_csv(t.bands);
  ASSERT_GE(bands.size(), 2u);
  for (std::size_t i = 1; i < bands.size(); ++i) {
    const double mean = std::stod(bands[i][1]), lo = std::stod(bands[i][2]), hi = std::stod(bands[i][3]);
    EXPECT_LE(lo, mean + 1e-12);
    EXPECT_LE(mean, hi + 1e-12);
  }
}

TEST(Cli, TrainSavesNetworkThatCertifies) {
  const auto dir = std::filesystem::temp_directory_path() / "jsrlab_cli_test";
  std::filesystem::create_directories(dir);
  const std::string net = (dir / "net.json").string(), smp = (dir / "samples.json").string();
  const std::string res = (dir / "train.json").string(), cert = (dir / "cert.json").string();
  const std::string cli = JSRLAB_CLI_PATH;
  const std::string train = cli + " train --benchmark sigma2 --width 5 --samples 40 --seeds 2 --epochs 80 --out " + res +
                            " --save-network " + net + " --save-samples " + smp;
  ASSERT_EQ(std::system(train.c_str()), 0);
  const json tr = read_json_file(res);
  EXPECT_EQ(tr.at("computed").at("seeds").size(), 2u);
  EXPECT_TRUE(tr.at("computed").at("seeds")[0].at("trace")[0].is_array());
  const std::string certify =
      cli + " certify --benchmark sigma2 --network " + net + " --samples " + smp + " --out " + cert;
  ASSERT_EQ(std::system(certify.c_str()), 0);
  const json c = read_json_file(cert);
  EXPECT_GE(c.at("computed").at("value").get<double>(), 8.688);
  std::filesystem::remove_all(dir);
}
