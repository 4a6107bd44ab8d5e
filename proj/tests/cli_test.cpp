#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("relbandit_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(RELBANDIT_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kSmall = " --users 5 --arms 80 --keyterms 20 --d 6";

TEST(Cli, GenerateIsDeterministic) {
  const auto a = scratch("gen_a"), b = scratch("gen_b");
  ASSERT_EQ(cli("generate --out " + a.string() + " --seed 3" + kSmall), 0);
  ASSERT_EQ(cli("generate --out " + b.string() + " --seed 3" + kSmall), 0);
  for (const char* f : {"meta.tsv", "arms.tsv", "graph.tsv", "users.tsv", "manifest.txt"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  EXPECT_EQ(cli("validate --dataset " + a.string()), 0);
}

TEST(Cli, GenerateGroups) {
  const auto dir = scratch("groups");
  ASSERT_EQ(cli("generate --kind groups --c 0.4 --beta 0.3 --out " + dir.string() + kSmall), 0);
  EXPECT_NE(slurp(dir / "manifest.txt").find("beta = 0.29999999999999999"), std::string::npos);
  EXPECT_EQ(cli("validate --dataset " + dir.string()), 0);
  EXPECT_EQ(cli("generate --kind groups --c 0.7 --out " + scratch("badc").string() + kSmall), 2);
}

TEST(Cli, RunIsReproducibleAndPlots) {
  const auto data = scratch("run_data"), o1 = scratch("run_1"), o2 = scratch("run_2");
  ASSERT_EQ(cli("generate --out " + data.string() + kSmall), 0);
  const std::string common = " --dataset " + data.string() +
                             " --agents linucb,diff_fast,conucb+share --runs 2 --iterations-per-user 20 --seed 9";
  ASSERT_EQ(cli("run --out " + o1.string() + common), 0);
  ASSERT_EQ(cli("run --out " + o2.string() + common), 0);
  for (const char* f : {"aggregate.csv", "log_linucb_run0.csv", "log_diff_fast_run1.csv", "log_conucb+share_run0.csv"})
    EXPECT_EQ(slurp(o1 / f), slurp(o2 / f)) << f;
  const std::string manifest = slurp(o1 / "manifest.cfg");
  EXPECT_NE(manifest.find("base_seed = 9"), std::string::npos);
  EXPECT_NE(manifest.find("tool_version = "), std::string::npos);

  ASSERT_EQ(cli("plot --input " + (o1 / "aggregate.csv").string()), 0);
  EXPECT_NE(slurp(o1 / "cum_regret.svg").find("<polyline"), std::string::npos);
  EXPECT_TRUE(fs::exists(o1 / "avg_reward.svg"));
}

TEST(Cli, ConfigFileFlagsAndEnvironmentPrecedence) {
  const auto data = scratch("prec_data"), out = scratch("prec_out");
  ASSERT_EQ(cli("generate --out " + data.string() + kSmall), 0);
  fs::create_directories(out);
  const fs::path cfg = out / "exp.cfg";
  std::ofstream(cfg) << "base_seed = 1\nagents = oracle\nnum_runs = 1\niterations_per_user = 10\n"
                     << "candidate_arm_count = 10\ndataset = " << data.string() << "\n";
  ASSERT_EQ(cli("run --config " + cfg.string() + " --out " + out.string()), 0);
  EXPECT_NE(slurp(out / "manifest.cfg").find("base_seed = 1\n"), std::string::npos);

  ASSERT_EQ(std::system(("RELBANDIT_SEED=5 " + std::string(RELBANDIT_CLI) + " run --config " + cfg.string() +
                         " --out " + out.string() + " >/dev/null 2>&1")
                            .c_str()),
            0);
  EXPECT_NE(slurp(out / "manifest.cfg").find("base_seed = 5\n"), std::string::npos);

  ASSERT_EQ(std::system(("RELBANDIT_SEED=5 " + std::string(RELBANDIT_CLI) + " run --seed 6 --config " +
                         cfg.string() + " --out " + out.string() + " >/dev/null 2>&1")
                            .c_str()),
            0);
  EXPECT_NE(slurp(out / "manifest.cfg").find("base_seed = 6\n"), std::string::npos);
}

TEST(Cli, OracleAgentHasZeroRegret) {
  const auto data = scratch("oracle_data"), out = scratch("oracle_out");
  ASSERT_EQ(cli("generate --out " + data.string() + kSmall), 0);
  ASSERT_EQ(cli("run --dataset " + data.string() + " --out " + out.string() +
                " --agents oracle --runs 1 --iterations-per-user 30"),
            0);
  std::istringstream in(slurp(out / "aggregate.csv"));
  std::string line;
  std::getline(in, line);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream fields(line);
    std::string agent, iter, mean;
    std::getline(fields, agent, ',');
    std::getline(fields, iter, ',');
    std::getline(fields, mean, ',');
    EXPECT_EQ(std::stod(mean), 0.0) << line;
  }
  EXPECT_EQ(rows, 150u);
}

TEST(Cli, ExitCodes) {
  const auto data = scratch("exit_data"), out = scratch("exit_out");
  ASSERT_EQ(cli("generate --out " + data.string() + kSmall), 0);

  // Configuration errors.
  EXPECT_EQ(cli("run --dataset " + data.string() + " --out " + out.string() + " --agents nope"), 2);
  EXPECT_EQ(cli("frobnicate"), 2);
  fs::create_directories(out);
  std::ofstream(out / "bad.cfg") << "lamda = 0.4\n";
  EXPECT_EQ(cli("run --config " + (out / "bad.cfg").string() + " --dataset " + data.string() + " --out " +
                out.string()),
            2);

  // Data validation errors.
  const auto broken = scratch("exit_broken");
  fs::copy(data, broken);
  std::ofstream(broken / "users.tsv") << "0\t0.9\t0.9\t0.9\t0.9\t0.9\t0.9\n";
  EXPECT_EQ(cli("validate --dataset " + broken.string()), 3);
  std::ofstream(out / "bad.csv") << "agent,iteration,mean_cum_regret,std_cum_regret,mean_avg_reward,std_avg_reward\n"
                                 << "a,1,x,0,0,0\n";
  EXPECT_EQ(cli("plot --input " + (out / "bad.csv").string()), 3);

  // I/O errors.
  EXPECT_EQ(cli("validate --dataset " + scratch("exit_missing").string()), 4);
  EXPECT_EQ(cli("plot --input " + (out / "missing.csv").string()), 4);
}

}  // namespace
