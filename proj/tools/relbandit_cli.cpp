// relbandit: generate datasets, run conversational bandit experiments, plot.

#include "relbandit/config.hpp"
#include "relbandit/datagen.hpp"
#include "relbandit/dataset.hpp"
#include "relbandit/errors.hpp"
#include "relbandit/plot.hpp"
#include "relbandit/simulation.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace relbandit;

namespace {

constexpr const char* kToolVersion = "relbandit 1.0.0";

enum ExitCode : int { kOk = 0, kFailure = 1, kConfig = 2, kData = 3, kIo = 4 };

std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("error writing " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

struct GenerateArgs {
  std::string kind = "synthetic";
  std::string out;
  std::uint64_t seed = 0;
  SyntheticConfig synth;
  double c = 0.4;
  double beta = 0.0;
};

int cmd_generate(const GenerateArgs& args) {
  GroupConfig group;
  group.base = args.synth;
  group.base.seed = args.seed;
  group.c = args.c;
  group.beta = args.beta;

  Dataset ds = [&] {
    try {
      if (args.kind == "synthetic") return gen_synthetic(group.base);
      if (args.kind == "groups") return gen_group_dataset(group);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    throw ConfigError("--kind must be 'synthetic' or 'groups'");
  }();
  validate_dataset(ds);
  write_bundle(args.out, ds);

  std::ostringstream manifest;
  manifest << "kind = " << args.kind << '\n'
           << "seed = " << args.seed << '\n'
           << "num_users = " << group.base.num_users << '\n'
           << "num_arms = " << group.base.num_arms << '\n'
           << "num_keyterms = " << group.base.num_keyterms << '\n'
           << "d = " << group.base.d << '\n'
           << "sigma = " << format_double(group.base.sigma) << '\n'
           << "max_related_arms = " << group.base.max_related_arms << '\n';
  if (args.kind == "groups")
    manifest << "c = " << format_double(group.c) << '\n' << "beta = " << format_double(group.beta) << '\n';
  manifest << "tool_version = " << kToolVersion << '\n';
  write_text(fs::path(args.out) / "manifest.txt", manifest.str());

  const auto st = bundle_stats(ds);
  std::cout << "wrote " << args.out << ": " << st.num_arms << " arms, " << st.num_keyterms << " key-terms, "
            << st.num_users << " users, d=" << st.d << '\n';
  return kOk;
}

struct RunArgs {
  std::string config;
  std::string dataset;
  std::string out;
  std::string agents;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<std::size_t> iterations_per_user;
  std::optional<std::size_t> jobs;
  std::optional<bool> sharing;
  std::string report_mode;
};

int cmd_run(const RunArgs& args) {
  ConfigMap map;
  if (!args.config.empty()) map = read_config_file(args.config);
  // Precedence: flags > RELBANDIT_SEED > config file.
  if (const char* env = std::getenv("RELBANDIT_SEED"); env && *env) map["base_seed"] = env;
  if (!args.dataset.empty()) map["dataset"] = args.dataset;
  if (!args.out.empty()) map["out"] = args.out;
  if (!args.agents.empty()) map["agents"] = args.agents;
  if (args.seed) map["base_seed"] = std::to_string(*args.seed);
  if (args.runs) map["num_runs"] = std::to_string(*args.runs);
  if (args.iterations_per_user) map["iterations_per_user"] = std::to_string(*args.iterations_per_user);
  if (args.jobs) map["jobs"] = std::to_string(*args.jobs);
  if (args.sharing) map["sharing"] = *args.sharing ? "true" : "false";
  if (!args.report_mode.empty()) map["report_mode"] = args.report_mode;

  RunSettings settings = resolve_settings(map);
  if (settings.dataset.empty()) throw ConfigError("no dataset given (--dataset or config key 'dataset')");
  if (settings.out.empty()) throw ConfigError("no output directory given (--out or config key 'out')");

  const Dataset ds = load_bundle(settings.dataset);
  if (settings.sim.environment.candidate_arm_count > ds.catalog.num_arms())
    throw ConfigError("candidate_arm_count exceeds the number of arms in the dataset");

  const fs::path out(settings.out);
  ensure_dir(out);
  std::string manifest = render_settings(settings);
  manifest += "config = " + args.config + "\n";
  manifest += "tool_version = " + std::string(kToolVersion) + "\n";
  manifest += "timestamp = " + timestamp_utc() + "\n";
  write_text(out / "manifest.cfg", manifest);

  const ExperimentResult result = run_experiment(settings.sim, ds);
  for (const auto& log : result.logs) {
    std::ostringstream csv;
    write_episode_csv(csv, log);
    write_text(out / ("log_" + log.agent + "_run" + std::to_string(log.run) + ".csv"), csv.str());
  }
  std::ostringstream agg;
  write_aggregate_csv(agg, result.aggregates);
  write_text(out / "aggregate.csv", agg.str());

  for (const auto& s : result.aggregates) {
    std::cout << s.agent << ": final cumulative regret " << s.mean_cum_regret.back() << " ± "
              << s.std_cum_regret.back() << ", averaged reward " << s.mean_avg_reward.back() << '\n';
  }
  return kOk;
}

int cmd_plot(const std::string& input, const std::string& out_dir) {
  std::ifstream in(input);
  if (!in) throw IoError("cannot read " + input);
  const auto series = read_aggregate_csv(in);
  const fs::path out = out_dir.empty() ? fs::path(input).parent_path() : fs::path(out_dir);
  if (!out.empty()) ensure_dir(out);
  write_text(out / "cum_regret.svg", render_svg(series, PlotMetric::CumulativeRegret));
  write_text(out / "avg_reward.svg", render_svg(series, PlotMetric::AveragedReward));
  std::cout << "wrote " << (out / "cum_regret.svg").string() << " and " << (out / "avg_reward.svg").string()
            << '\n';
  return kOk;
}

int cmd_validate(const std::string& dataset) {
  const Dataset ds = load_bundle(dataset);
  const auto st = bundle_stats(ds);
  std::cout << "ok: d=" << st.d << " arms=" << st.num_arms << " keyterms=" << st.num_keyterms
            << " users=" << st.num_users << '\n'
            << "avg related key-terms per arm: " << st.avg_keyterms_per_arm << '\n'
            << "avg related arms per key-term: " << st.avg_arms_per_keyterm << '\n'
            << "expected reward range: [" << st.min_expected_reward << ", " << st.max_expected_reward << "]\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Comparison-based conversational contextual bandit simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate a synthetic dataset bundle");
  generate->add_option("--kind", gen.kind, "synthetic or groups")->check(CLI::IsMember({"synthetic", "groups"}));
  generate->add_option("--out", gen.out, "Output bundle directory")->required();
  generate->add_option("--seed", gen.seed, "Random seed");
  generate->add_option("--users", gen.synth.num_users, "Number of users");
  generate->add_option("--arms", gen.synth.num_arms, "Number of arms");
  generate->add_option("--keyterms", gen.synth.num_keyterms, "Number of key-terms");
  generate->add_option("--d", gen.synth.d, "Feature dimension (including the bias coordinate)");
  generate->add_option("--sigma", gen.synth.sigma, "Standard deviation of the Gaussian draws");
  generate->add_option("--max-related-arms", gen.synth.max_related_arms, "Upper bound of n_k");
  generate->add_option("--c", gen.c, "Head norm of group users, in [0, 0.5]");
  generate->add_option("--beta", gen.beta, "Weight of individual user directions");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment over a dataset bundle");
  run_cmd->add_option("--config", run.config, "Flat key = value config file");
  run_cmd->add_option("--dataset", run.dataset, "Dataset bundle directory");
  run_cmd->add_option("--out", run.out, "Output directory");
  run_cmd->add_option("--agents", run.agents, "Comma list: linucb,conucb,pos,posneg,diff,diff_fast,oracle");
  run_cmd->add_option("--seed", run.seed, "Base seed");
  run_cmd->add_option("--runs", run.runs, "Number of repeated runs");
  run_cmd->add_option("--iterations-per-user", run.iterations_per_user, "Average rounds per user");
  run_cmd->add_option("--jobs", run.jobs, "Episodes simulated in parallel");
  run_cmd->add_option("--sharing", run.sharing, "Share conversational feedback among all users");
  run_cmd->add_option("--report-mode", run.report_mode, "expected or realized regret in aggregate.csv");

  std::string plot_input, plot_out;
  auto* plot = app.add_subcommand("plot", "Render aggregate curves as SVG");
  plot->add_option("--input", plot_input, "aggregate.csv")->required();
  plot->add_option("--out", plot_out, "Output directory (default: next to the input)");

  std::string validate_dir;
  auto* validate = app.add_subcommand("validate", "Check a dataset bundle's invariants");
  validate->add_option("--dataset", validate_dir, "Dataset bundle directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*run_cmd) return cmd_run(run);
    if (*plot) return cmd_plot(plot_input, plot_out);
    if (*validate) return cmd_validate(validate_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kData;
  } catch (const InvalidGraph& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kData;
  } catch (const ModelViolation& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kData;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kData;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
