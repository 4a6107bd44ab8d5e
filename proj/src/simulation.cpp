#include "relbandit/simulation.hpp"

#include "relbandit/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace relbandit {

std::string agent_label(const AgentConfig& cfg) {
  std::string label(variant_name(cfg.variant));
  if (cfg.sharing) label += "+share";
  return label;
}

std::uint64_t stream_seed(std::uint64_t base_seed, std::size_t run, std::uint64_t stream) {
  return derive_seed({base_seed, static_cast<std::uint64_t>(run), stream});
}

MetricsLog run_episode(const SimulationConfig& config, const AgentConfig& agent_cfg, const Dataset& dataset,
                       std::size_t run) {
  const auto& catalog = dataset.catalog;
  const std::size_t num_users = dataset.num_users();
  if (num_users == 0) throw std::invalid_argument("run_episode: dataset has no users");
  const auto& env = config.environment;
  if (env.candidate_arm_count > catalog.num_arms())
    throw std::invalid_argument("run_episode: candidate_arm_count exceeds the number of arms");

  Rng arrivals(stream_seed(config.base_seed, run, 0));
  Rng click_noise(stream_seed(config.base_seed, run, 1));
  Rng feedback_noise(stream_seed(config.base_seed, run, 2));

  std::vector<SimulatedUser> users(num_users);
  for (UserId u = 0; u < num_users; ++u)
    users[u] = {u, dataset.users.row(static_cast<Eigen::Index>(u)).transpose(), env.noise_sigma};

  const Variant variant = agent_cfg.variant;
  const bool is_oracle = variant == Variant::Oracle;
  // The oracle never reads its models; it still gets a valid config.
  Agent agent(is_oracle ? AgentConfig::defaults(Variant::LinUCB) : agent_cfg, catalog, num_users);
  const AgentConfig& cfg = agent.config();
  std::vector<std::size_t> rounds(num_users, 0);

  MetricsLog log;
  log.agent = agent_label(agent_cfg);
  log.run = run;
  const std::size_t total = config.iterations_per_user * num_users;
  log.records.reserve(total);

  for (std::size_t i = 1; i <= total; ++i) {
    const UserId u = static_cast<UserId>(arrivals.uniform_index(num_users));
    const std::size_t t = rounds[u] + 1;
    const auto q = static_cast<std::size_t>(conversation_budget(static_cast<std::int64_t>(t), env.budget_scale,
                                                                env.log_base));
    const std::vector<ArmId> arms = sample_candidates(catalog.num_arms(), env.candidate_arm_count, arrivals);
    const Eigen::MatrixXd arm_x = catalog.arm_rows(arms);

    IterationRecord rec;
    rec.iteration = i;
    rec.user = u;
    rec.round = t;

    const bool converses = variant == Variant::ConUCB || asks_relative_questions(variant);
    if (q > 0 && converses) {
      const std::vector<KeyTermId> keyterms = candidate_keyterms(catalog.graph(), arms);
      for (std::size_t j = 0; j < q; ++j) {
        auto& state = agent.state(u);
        if (variant == Variant::ConUCB) {
          const KeyTermId k = select_keyterm(state, arm_x, keyterms, catalog);
          const int r = sample_absolute_feedback(users[u], catalog.keyterm(k).transpose(), feedback_noise);
          absorb_absolute_feedback(agent.states(), u, cfg, k, r, catalog, agent.share_scope());
          rec.questions.push_back({k, k, r});
        } else {
          if (keyterms.size() < 2) break;
          const auto [k1, k2] = select_pair(variant, state, arm_x, keyterms, catalog);
          const int r = sample_relative_feedback(users[u], catalog.keyterm(k1).transpose(),
                                                 catalog.keyterm(k2).transpose(), feedback_noise);
          absorb_relative_feedback(agent.states(), u, cfg, k1, k2, r, catalog, agent.share_scope());
          rec.questions.push_back({k1, k2, r});
        }
      }
    }
    rec.conversations = rec.questions.size();

    Eigen::VectorXd expected(arm_x.rows());
    for (Eigen::Index r = 0; r < arm_x.rows(); ++r) expected(r) = expected_reward(users[u], arm_x.row(r).transpose());
    Eigen::Index best_idx = 0;
    rec.expected_best = expected.maxCoeff(&best_idx);

    std::size_t chosen_idx = 0;
    if (is_oracle) {
      chosen_idx = static_cast<std::size_t>(best_idx);
    } else {
      const ArmId a = select_arm(agent.state(u), arms, catalog, cfg);
      chosen_idx = static_cast<std::size_t>(std::lower_bound(arms.begin(), arms.end(), a) - arms.begin());
    }
    rec.arm = arms[chosen_idx];
    const auto x = arm_x.row(static_cast<Eigen::Index>(chosen_idx)).transpose();
    rec.expected_chosen = expected(static_cast<Eigen::Index>(chosen_idx));
    rec.reward = sample_click(users[u], x, click_noise);

    if (!is_oracle) {
      auto& state = agent.state(u);
      absorb_click(state, x, rec.reward, cfg);
      ++state.rounds;
    }
    ++rounds[u];
    log.records.push_back(std::move(rec));
  }
  return log;
}

std::vector<double> cumulative_regret(const MetricsLog& log, RegretMode mode) {
  std::vector<double> out;
  out.reserve(log.records.size());
  double acc = 0.0;
  for (const auto& r : log.records) {
    acc += r.expected_best - (mode == RegretMode::Expected ? r.expected_chosen : static_cast<double>(r.reward));
    out.push_back(acc);
  }
  return out;
}

std::vector<double> averaged_reward(const MetricsLog& log) {
  std::vector<double> out;
  out.reserve(log.records.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    acc += log.records[i].reward;
    out.push_back(acc / static_cast<double>(i + 1));
  }
  return out;
}

namespace {

void mean_std(const std::vector<std::vector<double>>& series, std::vector<double>& mean, std::vector<double>& sd) {
  const std::size_t n = series.front().size();
  const auto k = static_cast<double>(series.size());
  mean.assign(n, 0.0);
  sd.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double m = 0.0;
    for (const auto& s : series) m += s[i];
    m /= k;
    double v = 0.0;
    for (const auto& s : series) v += (s[i] - m) * (s[i] - m);
    mean[i] = m;
    sd[i] = series.size() > 1 ? std::sqrt(v / (k - 1.0)) : 0.0;
  }
}

}  // namespace

std::vector<AggregateSeries> aggregate(const std::vector<MetricsLog>& logs, RegretMode mode) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const MetricsLog*>> groups;
  for (const auto& log : logs) {
    if (!groups.count(log.agent)) order.push_back(log.agent);
    groups[log.agent].push_back(&log);
  }
  std::vector<AggregateSeries> out;
  for (const auto& name : order) {
    const auto& members = groups[name];
    std::vector<std::vector<double>> regret, reward;
    for (const auto* log : members) {
      if (log->records.size() != members.front()->records.size())
        throw std::invalid_argument("aggregate: runs of agent " + name + " differ in length");
      regret.push_back(cumulative_regret(*log, mode));
      reward.push_back(averaged_reward(*log));
    }
    AggregateSeries s;
    s.agent = name;
    if (!members.front()->records.empty()) {
      mean_std(regret, s.mean_cum_regret, s.std_cum_regret);
      mean_std(reward, s.mean_avg_reward, s.std_avg_reward);
    }
    out.push_back(std::move(s));
  }
  return out;
}

ExperimentResult run_experiment(const SimulationConfig& config, const Dataset& dataset) {
  if (config.agents.empty()) throw std::invalid_argument("run_experiment: no agents configured");
  if (config.num_runs == 0 || config.iterations_per_user == 0)
    throw std::invalid_argument("run_experiment: counts must be positive");

  const std::size_t episodes = config.agents.size() * config.num_runs;
  ExperimentResult result;
  result.logs.resize(episodes);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t e = next++; e < episodes; e = next++) {
      try {
        const std::size_t agent = e / config.num_runs;
        const std::size_t run = e % config.num_runs;
        result.logs[e] = run_episode(config, config.agents[agent], dataset, run);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(config.jobs, 1, episodes);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  result.aggregates = aggregate(result.logs, config.report_mode);
  return result;
}

void write_episode_csv(std::ostream& out, const MetricsLog& log) {
  out << "run,agent,iteration,user,round,arm,q_t,reward,expected_chosen,expected_best,regret_expected,"
         "regret_realized,cum_regret_expected,cum_regret_realized\n";
  double cum_e = 0.0, cum_r = 0.0;
  for (const auto& r : log.records) {
    const double re = r.expected_best - r.expected_chosen;
    const double rr = r.expected_best - r.reward;
    cum_e += re;
    cum_r += rr;
    out << log.run << ',' << log.agent << ',' << r.iteration << ',' << r.user << ',' << r.round << ',' << r.arm
        << ',' << r.conversations << ',' << r.reward << ',' << format_double(r.expected_chosen) << ','
        << format_double(r.expected_best) << ',' << format_double(re) << ',' << format_double(rr) << ','
        << format_double(cum_e) << ',' << format_double(cum_r) << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateSeries>& series) {
  out << "agent,iteration,mean_cum_regret,std_cum_regret,mean_avg_reward,std_avg_reward\n";
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.mean_cum_regret.size(); ++i) {
      out << s.agent << ',' << (i + 1) << ',' << format_double(s.mean_cum_regret[i]) << ','
          << format_double(s.std_cum_regret[i]) << ',' << format_double(s.mean_avg_reward[i]) << ','
          << format_double(s.std_avg_reward[i]) << '\n';
    }
  }
}

}  // namespace relbandit
