#pragma once

#include "relbandit/agents.hpp"
#include "relbandit/dataset.hpp"
#include "relbandit/environment.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace relbandit {

enum class RegretMode {
  /// Σ (best expected − chosen expected), the pseudo-regret.
  Expected,
  /// Σ (best expected − realized click).
  Realized,
};

struct SimulationConfig {
  std::size_t iterations_per_user = 400;
  std::size_t num_runs = 10;
  std::uint64_t base_seed = 0;
  std::vector<AgentConfig> agents;
  EnvironmentConfig environment;
  RegretMode report_mode = RegretMode::Expected;
  std::size_t jobs = 1;
};

/// One conversational question and its answer. For absolute questions
/// second == first.
struct Question {
  KeyTermId first;
  KeyTermId second;
  int answer;
};

struct IterationRecord {
  std::size_t iteration = 0;  // 1-based
  UserId user = 0;
  std::size_t round = 0;      // 1-based round index t of this user
  ArmId arm = 0;
  std::size_t conversations = 0;
  int reward = 0;
  double expected_chosen = 0.0;
  double expected_best = 0.0;
  std::vector<Question> questions;
};

struct MetricsLog {
  std::string agent;
  std::size_t run = 0;
  std::vector<IterationRecord> records;
};

/// Label used in CSV output, e.g. "diff_fast" or "conucb+share".
std::string agent_label(const AgentConfig& cfg);

/// Seed of a named random stream of one run. Streams: 0 arrivals and
/// candidate sets, 1 click noise, 2 conversational feedback noise. None
/// depends on the agent, so every agent of a run sees the same arrivals and
/// candidates.
std::uint64_t stream_seed(std::uint64_t base_seed, std::size_t run, std::uint64_t stream);

/// Simulates N = iterations_per_user · |users| iterations of one agent.
/// Throws std::runtime_error on non-finite model state.
MetricsLog run_episode(const SimulationConfig& config, const AgentConfig& agent, const Dataset& dataset,
                       std::size_t run);

std::vector<double> cumulative_regret(const MetricsLog& log, RegretMode mode = RegretMode::Expected);

/// Prefix means of realized rewards.
std::vector<double> averaged_reward(const MetricsLog& log);

/// Per-iteration mean and sample standard deviation across runs.
struct AggregateSeries {
  std::string agent;
  std::vector<double> mean_cum_regret;
  std::vector<double> std_cum_regret;
  std::vector<double> mean_avg_reward;
  std::vector<double> std_avg_reward;
};

std::vector<AggregateSeries> aggregate(const std::vector<MetricsLog>& logs, RegretMode mode = RegretMode::Expected);

struct ExperimentResult {
  /// Ordered by agent, then run.
  std::vector<MetricsLog> logs;
  std::vector<AggregateSeries> aggregates;
};

/// Runs every agent × run episode, up to config.jobs at a time, and
/// aggregates them.
ExperimentResult run_experiment(const SimulationConfig& config, const Dataset& dataset);

void write_episode_csv(std::ostream& out, const MetricsLog& log);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateSeries>& series);

}  // namespace relbandit
