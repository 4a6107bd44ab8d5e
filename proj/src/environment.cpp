#include "relbandit/environment.hpp"

#include "relbandit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace relbandit {
namespace {

double clamp_probability(double p, const char* what) {
  if (!(p >= -kProbabilityTolerance && p <= 1.0 + kProbabilityTolerance))
    throw ModelViolation(std::string(what) + ": expected value " + std::to_string(p) +
                         " outside [0, 1]; user features do not match the catalog");
  return std::clamp(p, 0.0, 1.0);
}

void check_dims(const SimulatedUser& user, Eigen::Index n) {
  if (user.theta_star.size() != n) throw std::invalid_argument("feature dimension does not match user");
}

}  // namespace

double expected_reward(const SimulatedUser& user, const Eigen::Ref<const Eigen::VectorXd>& x) {
  check_dims(user, x.size());
  return clamp_probability(x.dot(user.theta_star), "expected_reward");
}

int sample_click(const SimulatedUser& user, const Eigen::Ref<const Eigen::VectorXd>& arm_feature, Rng& rng) {
  check_dims(user, arm_feature.size());
  const double p = clamp_probability(arm_feature.dot(user.theta_star), "sample_click");
  return rng.bernoulli(p) ? 1 : 0;
}

int sample_absolute_feedback(const SimulatedUser& user,
                             const Eigen::Ref<const Eigen::VectorXd>& keyterm_feature, Rng& rng) {
  check_dims(user, keyterm_feature.size());
  const double p = clamp_probability(keyterm_feature.dot(user.theta_star), "sample_absolute_feedback");
  return rng.bernoulli(p) ? 1 : 0;
}

int sample_relative_feedback(const SimulatedUser& user, const Eigen::Ref<const Eigen::VectorXd>& x1,
                             const Eigen::Ref<const Eigen::VectorXd>& x2, Rng& rng) {
  check_dims(user, x1.size());
  check_dims(user, x2.size());
  if (!x1.allFinite() || !x2.allFinite())
    throw std::invalid_argument("sample_relative_feedback: non-finite feature");
  const double gap = (x1 - x2).dot(user.theta_star);
  const double noise = rng.normal() * std::sqrt(2.0) * user.noise_sigma;
  return gap + noise > 0.0 ? 1 : 0;
}

std::int64_t cumulative_budget(std::int64_t t, double budget_scale, double log_base) {
  if (t < 0) throw std::invalid_argument("cumulative_budget: t must be non-negative");
  if (t <= 1) return 0;
  const double base = log_base > 0.0 ? log_base : std::exp(1.0);
  if (base <= 1.0) throw std::invalid_argument("cumulative_budget: log base must exceed 1");
  const double td = static_cast<double>(t);
  auto k = static_cast<std::int64_t>(std::floor(std::log(td) / std::log(base)));
  // Correct floating rounding at exact powers of the base.
  while (std::pow(base, static_cast<double>(k + 1)) <= td) ++k;
  while (k > 0 && std::pow(base, static_cast<double>(k)) > td) --k;
  return static_cast<std::int64_t>(std::floor(budget_scale * static_cast<double>(k)));
}

std::int64_t conversation_budget(std::int64_t t, double budget_scale, double log_base) {
  if (t < 1) throw std::invalid_argument("conversation_budget: t must be >= 1");
  return std::max<std::int64_t>(0, cumulative_budget(t, budget_scale, log_base) -
                                       cumulative_budget(t - 1, budget_scale, log_base));
}

std::vector<ArmId> sample_candidates(std::size_t num_arms, std::size_t count, Rng& rng) {
  if (count < 1 || count > num_arms)
    throw std::invalid_argument("sample_candidates: need 1 <= count <= num_arms");
  std::vector<ArmId> pool(num_arms);
  std::iota(pool.begin(), pool.end(), ArmId{0});
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform_index(num_arms - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace relbandit
