// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Every experiment uses fixed seeds.

#include "relbandit/datagen.hpp"
#include "relbandit/environment.hpp"
#include "relbandit/linalg.hpp"
#include "relbandit/simulation.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>

using namespace relbandit;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

constexpr std::uint64_t kDataSeed = 2024;
constexpr std::uint64_t kRunSeed = 7;
constexpr std::size_t kRuns = 10;

SyntheticConfig desk_catalog() {
  SyntheticConfig cfg;
  cfg.num_users = 20;
  cfg.num_arms = 500;
  cfg.num_keyterms = 100;
  cfg.d = 20;
  cfg.seed = kDataSeed;
  return cfg;
}

SimulationConfig desk_sim(std::vector<AgentConfig> agents) {
  SimulationConfig sim;
  sim.iterations_per_user = 400;
  sim.num_runs = kRuns;
  sim.base_seed = kRunSeed;
  sim.agents = std::move(agents);
  return sim;
}

AgentConfig shared(Variant v) {
  auto cfg = AgentConfig::defaults(v);
  cfg.sharing = true;
  return cfg;
}

/// Final value per run, keyed by agent label.
std::map<std::string, std::vector<double>> finals(const ExperimentResult& r, bool reward) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& log : r.logs)
    out[log.agent].push_back(reward ? averaged_reward(log).back() : cumulative_regret(log).back());
  return out;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

std::size_t wins(const std::vector<double>& a, const std::vector<double>& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a[i] > b[i];
  return n;
}

// P1 and P2 share one experiment.
const ExperimentResult& synthetic_experiment() {
  static const ExperimentResult result = [] {
    const Dataset ds = gen_synthetic(desk_catalog());
    return run_experiment(desk_sim({AgentConfig::defaults(Variant::LinUCB), AgentConfig::defaults(Variant::ConUCB),
                                    AgentConfig::defaults(Variant::PosNeg), AgentConfig::defaults(Variant::Difference),
                                    AgentConfig::defaults(Variant::DifferenceFast)}),
                          ds);
  }();
  return result;
}

Outcome p1() {
  auto reward = finals(synthetic_experiment(), true);
  const auto& lin = reward["linucb"];
  const auto& con = reward["conucb"];
  const auto& pn = reward["posneg"];
  const auto& diff = reward["diff"];
  const std::size_t pn_wins = wins(pn, con), diff_wins = wins(diff, con);
  const double m_lin = mean(lin), m_con = mean(con), m_pn = mean(pn), m_diff = mean(diff);
  const bool lin_worst = m_lin < m_con && m_lin < m_pn && m_lin < m_diff;
  return {pn_wins >= 8 && diff_wins >= 8 && lin_worst,
          fmt("posneg>conucb in %zu/10, diff>conucb in %zu/10; mean averaged reward linucb=%.4f conucb=%.4f "
              "posneg=%.4f diff=%.4f",
              pn_wins, diff_wins, m_lin, m_con, m_pn, m_diff)};
}

Outcome p2() {
  auto regret = finals(synthetic_experiment(), false);
  const double fast = mean(regret["diff_fast"]), full = mean(regret["diff"]);
  return {fast <= 1.15 * full, fmt("mean final regret diff_fast=%.3f diff=%.3f ratio=%.4f (limit 1.15)", fast, full,
                                   fast / full)};
}

ExperimentResult group_experiment(double beta, std::vector<AgentConfig> agents) {
  GroupConfig g;
  g.base = desk_catalog();
  g.c = 0.4;
  g.beta = beta;
  return run_experiment(desk_sim(std::move(agents)), gen_group_dataset(g));
}

Outcome p3() {
  auto regret = finals(group_experiment(0.0, {shared(Variant::ConUCB), shared(Variant::DifferenceFast)}), false);
  const auto& con = regret["conucb+share"];
  const auto& fast = regret["diff_fast+share"];
  std::size_t consistent = 0;
  for (std::size_t i = 0; i < con.size(); ++i) consistent += fast[i] <= 0.75 * con[i];
  const double ratio = mean(fast) / mean(con);
  return {ratio <= 0.75 && consistent >= 8,
          fmt("mean final regret diff_fast+share=%.3f conucb+share=%.3f ratio=%.4f (limit 0.75); per-run ratio "
              "<= 0.75 in %zu/10",
              mean(fast), mean(con), ratio, consistent)};
}

Outcome p4() {
  std::vector<double> ratios;
  std::string detail;
  for (double beta : {1.0, 0.3, 0.05}) {
    auto regret = finals(group_experiment(beta, {shared(Variant::ConUCB), shared(Variant::Difference)}), false);
    ratios.push_back(mean(regret["diff+share"]) / mean(regret["conucb+share"]));
    detail += fmt("%sbeta=%.2f ratio=%.4f", detail.empty() ? "" : ", ", beta, ratios.back());
  }
  const bool ok = ratios[1] <= ratios[0] && ratios[2] <= ratios[1];
  return {ok, detail};
}

Outcome p5() {
  Rng rng(55);
  const Eigen::Index d = 50;
  auto state = ridge_init(d, 1.0);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd response = Eigen::VectorXd::Zero(d);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Eigen::VectorXd x(d);
    for (Eigen::Index j = 0; j < d; ++j) x(j) = rng.normal();
    const double r = rng.uniform();
    ridge_rank1_update(state, x);
    ridge_add_response(state, x, r);
    gram += x * x.transpose();
    response += r * x;
    worst = std::max(worst, (state.gram_inv - gram.inverse()).cwiseAbs().maxCoeff());
  }
  const Eigen::VectorXd batch = gram.ldlt().solve(response);
  const double solve_err = (ridge_solve(state, state.response) - batch).cwiseAbs().maxCoeff();
  return {worst <= 1e-8 && solve_err <= 1e-8,
          fmt("max inverse deviation %.3e, batch ridge deviation %.3e (limit 1e-8)", worst, solve_err)};
}

Outcome p6() {
  Rng rng(66);
  int instances = 0, mismatches = 0;
  for (; instances < 120; ++instances) {
    const std::size_t keyterms = 2 + rng.uniform_index(19);  // 2..20 candidates
    const auto cat = oracle::random_catalog(rng, keyterms * 3, keyterms, 2 + static_cast<Eigen::Index>(rng.uniform_index(10)));
    const auto cfg = AgentConfig::defaults(Variant::Difference);
    const auto s = oracle::random_state(rng, cat, cfg, static_cast<int>(rng.uniform_index(12)));
    const Eigen::MatrixXd x = cat.arm_features().topRows(static_cast<Eigen::Index>(1 + rng.uniform_index(keyterms * 3)));
    std::vector<KeyTermId> ks(keyterms);
    std::iota(ks.begin(), ks.end(), KeyTermId{0});
    mismatches += select_keyterm(s, x, ks, cat) !=
                  oracle::best_keyterm(s.arm_model.gram, s.keyterm_model.gram, x, ks, cat);
    mismatches += select_pair_sequential(s, x, ks, cat) != oracle::best_sequential_pair(s, x, ks, cat);
    mismatches += select_pair_difference(s, x, ks, cat, false) != oracle::best_difference_pair(s, x, ks, cat, false);
    mismatches += select_pair_difference(s, x, ks, cat, true) != oracle::best_difference_pair(s, x, ks, cat, true);
  }
  return {mismatches == 0, fmt("%d instances x 4 selectors, %d mismatches", instances, mismatches)};
}

Outcome p7() {
  Rng rng(77);
  const double sigma = 0.1;
  const SimulatedUser user{0, Eigen::Vector2d(1.0, 0.0), sigma};
  bool ok = true;
  std::string detail;
  for (double gap : {-0.2, -0.05, 0.0, 0.1, 0.25}) {
    const Eigen::Vector2d x1(0.5 + gap, 1.0), x2(0.5, 1.0);
    long hits = 0;
    for (int i = 0; i < 100000; ++i) hits += sample_relative_feedback(user, x1, x2, rng);
    const double rate = hits / 100000.0;
    const double phi = 0.5 * std::erfc(-gap / (std::sqrt(2.0) * sigma) / std::sqrt(2.0));
    ok = ok && std::abs(rate - phi) <= 0.005;
    detail += fmt("%sgap=%.2f rate=%.4f phi=%.4f", detail.empty() ? "" : ", ", gap, rate, phi);
  }
  return {ok, detail};
}

Outcome p8() {
  SyntheticConfig cfg = desk_catalog();
  cfg.num_users = 5;
  const Dataset ds = gen_synthetic(cfg);
  auto sim = desk_sim({});
  sim.iterations_per_user = 50;
  int identical = 0, total = 0;
  for (Variant v : {Variant::LinUCB, Variant::ConUCB, Variant::Pos, Variant::PosNeg, Variant::Difference,
                    Variant::DifferenceFast}) {
    std::ostringstream a, b;
    write_episode_csv(a, run_episode(sim, AgentConfig::defaults(v), ds, 3));
    write_episode_csv(b, run_episode(sim, AgentConfig::defaults(v), ds, 3));
    identical += a.str() == b.str();
    ++total;
  }
  std::int64_t sum = 0, budget_errors = 0, k = 0;
  for (std::int64_t t = 1; t <= 100000; ++t) {
    while (static_cast<long double>(t) >= std::exp(static_cast<long double>(k + 1))) ++k;
    sum += conversation_budget(t);
    budget_errors += sum != 5 * k;
  }
  return {identical == total && budget_errors == 0,
          fmt("%d/%d byte-identical episode logs; %lld budget mismatches for t <= 1e5", identical, total,
              static_cast<long long>(budget_errors))};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"P1 synthetic ordering", p1}, {"P2 fast variant fidelity", p2}, {"P3 sharing under drift", p3},
      {"P4 beta trend", p4},         {"P5 linear algebra", p5},        {"P6 selection oracles", p6},
      {"P7 feedback distribution", p7}, {"P8 determinism", p8}};
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
