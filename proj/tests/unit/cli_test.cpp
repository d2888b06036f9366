#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tsrvlab/cli.hpp"
#include "tsrvlab/estimators.hpp"
#include "tsrvlab/io.hpp"

using namespace tsrv;

namespace fs = std::filesystem;

namespace {

struct Run
{
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args)
{
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name)
{
  const auto dir = fs::temp_directory_path() / "tsrvlab_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Cli, SimulateThenTsrvMatchesLibrary)
{
  const auto path = scratch("day.csv").string();
  const auto sim = run({"simulate", "--out", path});
  ASSERT_EQ(sim.code, ExitOk) << sim.err;
  const auto ticks = ingest_ticks(path);
  EXPECT_EQ(ticks.size(), 23401);
  EXPECT_EQ(ticks.timestamps.front(), 0.0);
  EXPECT_NEAR(ticks.timestamps.back(), 23400.0, 1e-6);

  const auto r = run({"tsrv", "--input", path});
  ASSERT_EQ(r.code, ExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  const auto expected = tsrv::tsrv(ticks.log_prices(), select_K(23400, 1.0));
  EXPECT_EQ(j["K"].get<int>(), 818);
  EXPECT_EQ(j["tsrv"].get<double>(), expected.tsrv);
  EXPECT_EQ(j["rv_all"].get<double>(), expected.rv_all);
  EXPECT_EQ(j["n"].get<int>(), 23400);

  const auto adj = nlohmann::json::parse(run({"tsrv", "--input", path, "--K", "100", "--adjust"}).out);
  const auto e100 = tsrv::tsrv(ticks.log_prices(), 100, true);
  EXPECT_EQ(adj["tsrv_adjusted"].get<double>(), *e100.adjusted);

  const auto ing = run({"ingest", "--input", path});
  ASSERT_EQ(ing.code, ExitOk);
  EXPECT_EQ(nlohmann::json::parse(ing.out)["last_timestamp"].get<double>(), ticks.timestamps.back());
}

TEST(Cli, SimulateIsDeterministic)
{
  const auto a = scratch("a.csv").string();
  const auto b = scratch("b.csv").string();
  ASSERT_EQ(run({"simulate", "--out", a, "--n", "500", "--kernel", "rounding"}).code, ExitOk);
  ASSERT_EQ(run({"simulate", "--out", b, "--n", "500", "--kernel", "rounding"}).code, ExitOk);
  EXPECT_EQ(slurp(a), slurp(b));
  ASSERT_EQ(run({"simulate", "--out", b, "--n", "500", "--kernel", "rounding", "--seed", "1"}).code, ExitOk);
  EXPECT_NE(slurp(a), slurp(b));
  // rounding prices are whole ticks
  for (double p : ingest_ticks(a).prices)
    EXPECT_NEAR(p / 0.01, std::round(p / 0.01), 1e-9);
}

TEST(Cli, ConfigErrorsExitTwo)
{
  EXPECT_EQ(run({}).code, ExitConfig);
  EXPECT_EQ(run({"bogus"}).code, ExitConfig);
  EXPECT_EQ(run({"simulate"}).code, ExitConfig);
  EXPECT_EQ(run({"simulate", "--out", scratch("x.csv").string(), "--kernel", "laplace"}).code, ExitConfig);
  EXPECT_EQ(run({"simulate", "--out", scratch("x.csv").string(), "--sigma", "-1"}).code, ExitConfig);
  EXPECT_EQ(run({"experiment", "thm9"}).code, ExitConfig);
  const auto r = run({"experiment", "fig3", "--K", "30000", "--out", scratch("never").string()});
  EXPECT_EQ(r.code, ExitConfig);
  EXPECT_NE(r.err.find("K"), std::string::npos) << r.err;
  EXPECT_EQ(run({"experiment", "thm3", "--kernel", "additive", "--out", scratch("never").string()}).code, ExitConfig);

  const auto cfg = scratch("wrong.cfg");
  std::ofstream(cfg) << "experiment = fig2\n";
  EXPECT_EQ(run({"experiment", "fig3", "--config", cfg.string()}).code, ExitConfig);
}

TEST(Cli, DataErrorsExitThree)
{
  const auto bad = scratch("bad.csv");
  std::ofstream(bad) << "timestamp,price\n1,1\n2,0\n";
  const auto r = run({"tsrv", "--input", bad.string()});
  EXPECT_EQ(r.code, ExitData);
  EXPECT_NE(r.err.find("row 2"), std::string::npos) << r.err;
  EXPECT_EQ(run({"ingest", "--input", scratch("absent.csv").string()}).code, ExitData);
  const auto big = scratch("short.csv");
  std::ofstream(big) << "timestamp,price\n1,1\n2,1\n3,1\n";
  EXPECT_EQ(run({"tsrv", "--input", big.string(), "--K", "4"}).code, ExitConfig);
}

TEST(Cli, ExperimentWritesDeterministicReports)
{
  const auto p1 = scratch("fig2").string();
  const auto p2 = scratch("fig2_stamped").string();
  const auto r = run({"experiment", "fig2", "--out", p1});
  ASSERT_EQ(r.code, ExitOk) << r.err;
  EXPECT_NE(r.out.find("PASS "), std::string::npos);
  const auto csv = slurp(p1 + ".csv");
  const auto json = slurp(p1 + ".json");
  ASSERT_EQ(run({"experiment", "fig2", "--out", p1}).code, ExitOk);
  EXPECT_EQ(slurp(p1 + ".csv"), csv);
  EXPECT_EQ(slurp(p1 + ".json"), json);
  EXPECT_EQ(csv.substr(0, 42), "t,x,y_rounded,f_gamma_0.001,f_gamma_0.005\n");

  ASSERT_EQ(run({"experiment", "fig2", "--out", p2, "--timestamp"}).code, ExitOk);
  EXPECT_TRUE(nlohmann::json::parse(slurp(p2 + ".json"))["metadata"].contains("generated_at"));
}

TEST(Cli, FlagOverridesConfigFile)
{
  const auto cfg = scratch("thm1.cfg");
  std::ofstream(cfg) << "experiment = thm1\nn = 2000\nreplications = 100\ngamma = 0.001\n";
  const auto prefix = scratch("thm1").string();
  const auto r = run({"experiment", "thm1", "--config", cfg.string(), "--gamma", "0.002", "--out", prefix});
  ASSERT_TRUE(r.code == ExitOk) << r.err;
  const auto j = nlohmann::json::parse(slurp(prefix + ".json"));
  EXPECT_EQ(j["config"]["gamma"], "0.002");
  EXPECT_EQ(j["config"]["n"], "2000");
  EXPECT_EQ(read_csv_table(prefix + ".csv").rows.rows(), 100);
}

TEST(Cli, CheckFlagExitsFour)
{
  const std::vector<std::string> base = {"experiment", "thm1",      "--n",           "2000", "--replications",
                                         "100",        "--thm1_ks_max", "0",         "--out",
                                         scratch("thm1_fail").string()};
  EXPECT_EQ(run(base).code, ExitOk);
  auto checked = base;
  checked.push_back("--check");
  const auto r = run(checked);
  EXPECT_EQ(r.code, ExitCheckFailed);
  EXPECT_NE(r.out.find("FAIL ks"), std::string::npos) << r.out;
}

TEST(Cli, Help)
{
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, ExitOk);
  for (const char* word : {"simulate", "tsrv", "ingest", "experiment"})
    EXPECT_NE(r.out.find(word), std::string::npos) << word;
  const auto e = run({"experiment", "--help"});
  EXPECT_EQ(e.code, ExitOk);
  EXPECT_NE(e.out.find("--gamma"), std::string::npos);
  EXPECT_NE(e.out.find("--check"), std::string::npos);
}

} // namespace
