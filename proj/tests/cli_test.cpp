#include "gsr/cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace gsr {
namespace {

namespace fs = std::filesystem;
using io::json;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "gsr");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("gsr_cli_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

TEST(RunConfig, JsonRoundTrip) {
  io::RunConfig c;
  c.subcommand = "curve";
  c.output = "out.jsonl";
  c.confidence = 0.99;
  c.precision = "extended";
  c.seed = 123456789012345ULL;
  c.target = {"irrational", 1, 1, 1.4142135623730951, {2, 3}};
  c.rect = {1.5, 1.6, -0.25, 0.2, 3, 4, "absolute"};
  c.eps = 0.37;
  c.T = 12345.5;
  c.samples = 777;
  c.schedule = {100, 1000, 1e4};
  c.primes = {2, 3, 5, 7};
  c.delta = 0.3;
  c.scale = 0.5;
  c.method = "lattice";
  c.step = 1e-3;
  c.search_bound = 1e9;
  c.N = 12;
  c.R = 500;
  c.trials = 99;
  c.s0_re = 1.75;
  c.s0_im = -3;
  c.haar_trials = 321;
  c.margin = 0.1;
  const json j = io::to_json(c);
  EXPECT_EQ(io::config_from_json(j), c);
  EXPECT_EQ(io::config_from_json(json::parse(j.dump(2))), c);
  EXPECT_EQ(io::config_from_json(json::object()), io::RunConfig{});
}

TEST(RunConfig, RejectsUnknownAndMistypedFieldsWithPath) {
  auto message = [](const std::string& text) -> std::string {
    try {
      io::config_from_json(json::parse(text));
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::usage);
      return e.what();
    }
    return "no error";
  };
  EXPECT_NE(message(R"({"epsilon": 0.1})").find("epsilon: unknown field"), std::string::npos);
  EXPECT_NE(message(R"({"rect": {"gird": [3, 3]}})").find("rect.gird: unknown field"), std::string::npos);
  EXPECT_NE(message(R"({"eps": "big"})").find("eps: expected a number"), std::string::npos);
  EXPECT_NE(message(R"({"primes": [2, -3]})").find("primes[1]"), std::string::npos);
  EXPECT_NE(message(R"({"rect": {"sigma": [1]}})").find("rect.sigma: expected two values"),
            std::string::npos);
  EXPECT_NE(message(R"({"subcommand": "plot"})").find("subcommand"), std::string::npos);
}

TEST(RunConfig, RegionInference) {
  io::RectSpec r;
  r.sigma_lo = 1.5, r.sigma_hi = 1.6;
  EXPECT_EQ(r.build().region, Region::absolute);
  r.sigma_lo = 0.6, r.sigma_hi = 0.7;
  EXPECT_EQ(r.build().region, Region::critical_strip);
  r.sigma_lo = 0.9, r.sigma_hi = 1.2;
  EXPECT_EQ(r.build().region, Region::unrestricted);
  r.region = "sideways";
  EXPECT_THROW(r.build(), Error);
}

TEST(Cli, ScanRecordIsSelfDescribingAndDeterministic) {
  const std::vector<std::string> args{"scan", "--j", "1", "--k", "2", "--sigma", "1.5:1.6", "--t", "0:0.2",
                                      "--eps", "0.5", "--T", "1e3", "--samples", "400", "--seed", "7"};
  const CliRun a = run_cli(args), b = run_cli(args);
  ASSERT_EQ(a.code, 0) << a.err;
  const json ra = io::parse_record(a.out), rb = io::parse_record(b.out);
  EXPECT_EQ(ra["kind"], "density");
  EXPECT_EQ(ra["payload"].dump(), rb["payload"].dump());
  EXPECT_EQ(ra["config"].dump(), rb["config"].dump());
  EXPECT_EQ(io::config_from_json(ra["config"]).T, 1e3);
  const double v = ra["payload"]["value"];
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, 1.0);
  EXPECT_EQ(ra["payload"]["samples"], 400);
  EXPECT_EQ(ra["failures"], 0);

  // The same run, reproduced from the echoed configuration alone.
  TempDir dir;
  std::ofstream(dir / "echo.json") << ra["config"].dump();
  const CliRun c = run_cli({"scan", "--config", dir / "echo.json"});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_EQ(io::parse_record(c.out)["payload"].dump(), ra["payload"].dump());
}

TEST(Cli, TrivialTargetGivesOne) {
  const CliRun r = run_cli({"scan", "--j", "1", "--k", "1", "--sigma", "1.5:1.6", "--t", "0:0.2", "--eps", "1e-6",
                         "--T", "1e4", "--samples", "200"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(io::parse_record(r.out)["payload"]["value"], 1.0);
}

TEST(Cli, KroneckerScanWindowsHavePositiveMeasure) {
  const CliRun r = run_cli({"kronecker", "--primes", "2,3,5", "--delta", "0.5", "--T", "1e4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json rec = io::parse_record(r.out);
  EXPECT_EQ(rec["kind"], "windows");
  EXPECT_GT(rec["payload"]["windows"].size(), 0u);
  EXPECT_GT(rec["payload"]["measure_over_T"].get<double>(), 0.0);
  double m = 0;
  for (const auto& w : rec["payload"]["windows"]) m += w["tau_hi"].get<double>() - w["tau_lo"].get<double>();
  EXPECT_NEAR(m, rec["payload"]["total_measure"].get<double>(), 1e-9);
}

TEST(Cli, FlagsOverrideConfigFile) {
  TempDir dir;
  std::ofstream(dir / "c.json") << R"({"eps": 0.3, "T": 500, "samples": 100, "rect": {"sigma": [2, 2.1]}})";
  const CliRun r = run_cli({"scan", "--config", dir / "c.json", "--eps", "0.6", "--save-config", dir / "eff.json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const io::RunConfig eff = io::load_config(dir / "eff.json");
  EXPECT_EQ(eff.eps, 0.6);
  EXPECT_EQ(eff.T, 500);
  EXPECT_EQ(eff.rect.sigma_hi, 2.1);
  EXPECT_EQ(io::parse_record(r.out)["payload"]["eps"], 0.6);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli({}).code, 1);
  EXPECT_EQ(run_cli({"plot"}).code, 1);
  EXPECT_EQ(run_cli({"scan", "--bogus", "1"}).code, 1);
  EXPECT_EQ(run_cli({"scan", "--eps", "-1"}).code, 1);
  EXPECT_EQ(run_cli({"scan", "--sigma", "a:b"}).code, 1);
  EXPECT_EQ(run_cli({"scan", "--config", "/nonexistent/c.json"}).code, 2);
  EXPECT_EQ(run_cli({"kronecker", "--method", "guess"}).code, 1);

  const CliRun demo = run_cli({"demo41", "--j", "1", "--k", "2", "--sigma", "2:2.2", "--t", "0:0.1", "--eps", "0.1",
                            "--search-bound", "10"});
  EXPECT_EQ(demo.code, 2);
  EXPECT_NE(demo.err.find("stage kronecker"), std::string::npos) << demo.err;

  // A witness pinned to one prime on a small support cannot reach this eps.
  const CliRun wit = run_cli({"witness", "--j", "1", "--k", "2", "--sigma", "1.8:2", "--t", "0:0.5", "--eps",
                           "0.001", "--N", "1", "--R", "50"});
  EXPECT_EQ(wit.code, 2);
  EXPECT_NE(wit.err.find("witness-failed"), std::string::npos) << wit.err;
}

TEST(Cli, Demo41Succeeds) {
  const CliRun r = run_cli({"demo41", "--j", "1", "--k", "2", "--sigma", "2:2.2", "--t", "0:0.1", "--eps", "0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json p = io::parse_record(r.out)["payload"];
  EXPECT_TRUE(p["passed"].get<bool>());
  EXPECT_LT(p["zeta_sup"].get<double>(), 0.21);
  EXPECT_EQ(p["stages"].size(), 6u);
}

TEST(Cli, OutputFileAppendsAndEnvironmentDefault) {
  TempDir dir;
  const std::string path = dir / "runs.jsonl";
  for (int seed : {1, 2})
    ASSERT_EQ(run_cli({"kronecker", "--primes", "2,3", "--delta", "0.4", "--T", "100", "--seed",
                       std::to_string(seed), "--output", path})
                  .code,
              0);
  EXPECT_EQ(io::read_records(path).size(), 2u);

  ::setenv("GSR_OUTPUT_DIR", dir.operator/("").c_str(), 1);
  const CliRun r = run_cli({"kronecker", "--primes", "2", "--delta", "0.4", "--T", "100"});
  ::unsetenv("GSR_OUTPUT_DIR");
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(io::read_records(dir / "kronecker.jsonl").size(), 1u);
}

TEST(Records, SchemaVersionIsChecked) {
  json rec = io::make_record(io::RunConfig{}, "density", json::object());
  EXPECT_NO_THROW(io::parse_record(rec.dump()));
  rec["schema_version"] = io::kSchemaVersion + 1;
  EXPECT_THROW(io::parse_record(rec.dump()), Error);
  json missing = io::make_record(io::RunConfig{}, "density", json::object());
  missing.erase("payload");
  EXPECT_THROW(io::parse_record(missing.dump()), Error);
  EXPECT_THROW(io::parse_record("{not json"), Error);
}

TEST(Export, CurveRowsRoundTrip) {
  TempDir dir;
  const std::string records = dir / "curve.jsonl";
  const CliRun r = run_cli({"curve", "--j", "1", "--k", "2", "--sigma", "1.5:1.6", "--t", "0:0.2", "--eps", "0.5",
                         "--schedule", "100,200,400", "--samples", "100", "--output", records});
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_EQ(run_cli({"export", "--input", records, "--output", dir / "curve.csv"}).code, 0);
  const auto rows = read_csv(dir / "curve.csv");
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"T", "nu_T", "ci_lo", "ci_hi", "hits", "samples", "failures"}));
  const auto est = io::read_records(records)[0]["payload"]["estimates"];
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(std::stod(rows[i + 1][0]), est[i]["T"].get<double>());
    EXPECT_EQ(std::stod(rows[i + 1][1]), est[i]["value"].get<double>());
    EXPECT_EQ(std::stod(rows[i + 1][2]), est[i]["ci"][0].get<double>());
    EXPECT_EQ(std::stod(rows[i + 1][3]), est[i]["ci"][1].get<double>());
    EXPECT_EQ(std::stoul(rows[i + 1][4]), est[i]["hits"].get<std::size_t>());
  }
}

TEST(Export, EmptyCurveIsHeaderOnlyAndWindowsExport) {
  TempDir dir;
  json empty = io::make_record(io::RunConfig{}, "curve", {{"estimates", json::array()}});
  io::export_plot_data({empty}, dir / "empty.csv");
  EXPECT_EQ(read_csv(dir / "empty.csv").size(), 1u);

  const std::string records = dir / "w.jsonl";
  ASSERT_EQ(run_cli({"kronecker", "--primes", "2,3,5", "--delta", "0.5", "--T", "2000", "--output", records}).code, 0);
  io::export_plot_data(io::read_records(records), dir / "w.csv");
  const auto rows = read_csv(dir / "w.csv");
  const auto windows = io::read_records(records)[0]["payload"]["windows"];
  ASSERT_EQ(rows.size(), windows.size() + 1);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"tau_lo", "tau_hi", "certified"}));
  for (std::size_t i = 0; i < windows.size(); ++i) {
    EXPECT_EQ(std::stod(rows[i + 1][0]), windows[i]["tau_lo"].get<double>());
    EXPECT_EQ(std::stod(rows[i + 1][1]), windows[i]["tau_hi"].get<double>());
  }

  EXPECT_THROW(io::export_plot_data({}, dir / "x.csv"), Error);
  EXPECT_THROW(io::export_plot_data({empty}, "/nonexistent/dir/x.csv"), Error);
  const json density = io::make_record(io::RunConfig{}, "density",
                                       {{"T", 1.0}, {"value", 0.5}, {"ci", {0.1, 0.9}}, {"hits", 1},
                                        {"samples", 2}, {"failures", 0}});
  EXPECT_NO_THROW(io::export_plot_data({empty, density}, dir / "mixed_ok.csv"));
  const json windows_rec = io::read_records(records)[0];
  EXPECT_THROW(io::export_plot_data({empty, windows_rec}, dir / "mixed.csv"), Error);
}

TEST(Cli, BinaryReportsExitCodes) {
  const std::string bin = GSR_CLI_PATH;
  EXPECT_EQ(std::system((bin + " scan --bogus 1 >/dev/null 2>&1").c_str()), 1 << 8);
  EXPECT_EQ(std::system((bin + " kronecker --primes 2,3 --delta 0.5 --T 100 >/dev/null 2>&1").c_str()), 0);
  EXPECT_EQ(std::system((bin + " demo41 --search-bound 10 >/dev/null 2>&1").c_str()), 2 << 8);
}

}  // namespace
}  // namespace gsr
