#pragma once

#include "relbandit/domain.hpp"
#include "relbandit/rng.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace relbandit {

/// Tolerance for clamping expected rewards into [0, 1].
inline constexpr double kProbabilityTolerance = 1e-9;

/// Ground-truth user: feature θ*_u and the Gaussian noise level σ_g of its
/// internal key-term valuations.
struct SimulatedUser {
  UserId id = 0;
  Eigen::VectorXd theta_star;
  double noise_sigma = 0.1;
};

struct EnvironmentConfig {
  std::size_t candidate_arm_count = 50;
  double noise_sigma = 0.1;
  double budget_scale = 5.0;
  /// Base of the logarithm in b(t) = scale·⌊log t⌋. Zero selects the natural log.
  double log_base = 0.0;
};

/// Expected reward xᵀθ* clamped to [0, 1]. Throws ModelViolation when the value
/// lies outside by more than kProbabilityTolerance.
double expected_reward(const SimulatedUser& user, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Click ~ Bernoulli(xᵀθ*).
int sample_click(const SimulatedUser& user, const Eigen::Ref<const Eigen::VectorXd>& arm_feature, Rng& rng);

/// Absolute key-term feedback ~ Bernoulli(x̃ᵀθ*).
int sample_absolute_feedback(const SimulatedUser& user,
                             const Eigen::Ref<const Eigen::VectorXd>& keyterm_feature, Rng& rng);

/// 1 iff x1ᵀθ* + ε1 > x2ᵀθ* + ε2 with ε ~ N(0, σ_g²). Drawn as a single
/// Gaussian on the difference (variance 2σ_g²), so P(1) = Φ(gap / (√2 σ_g)).
/// Exact ties resolve to 0.
int sample_relative_feedback(const SimulatedUser& user, const Eigen::Ref<const Eigen::VectorXd>& x1,
                             const Eigen::Ref<const Eigen::VectorXd>& x2, Rng& rng);

/// Cumulative budget b(t) = scale·⌊log t⌋, with b(0) = 0.
std::int64_t cumulative_budget(std::int64_t t, double budget_scale = 5.0, double log_base = 0.0);

/// q_t = b(t) − b(t−1). Throws std::invalid_argument for t < 1.
std::int64_t conversation_budget(std::int64_t t, double budget_scale = 5.0, double log_base = 0.0);

/// Uniform size-`count` subset of [0, num_arms), sorted ascending (partial
/// Fisher–Yates).
std::vector<ArmId> sample_candidates(std::size_t num_arms, std::size_t count, Rng& rng);

}  // namespace relbandit
