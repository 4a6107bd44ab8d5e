#pragma once

#include "relbandit/domain.hpp"
#include "relbandit/linalg.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace relbandit {

enum class Variant {
  LinUCB,
  ConUCB,
  Pos,
  PosNeg,
  Difference,
  DifferenceFast,
  /// Test-only policy that pulls the arm with the highest true expected reward.
  Oracle,
};

/// Short names used by the CLI and in logs: linucb, conucb, pos, posneg, diff,
/// diff_fast, oracle.
std::string_view variant_name(Variant v);
/// Throws std::invalid_argument for unknown names.
Variant parse_variant(std::string_view name);

/// True for the variants that ask relative (pairwise) questions.
bool asks_relative_questions(Variant v);

struct AgentConfig {
  Variant variant = Variant::Difference;
  double lambda = 0.5;
  double lambda_tilde = 1.0;
  double alpha = 0.25;
  double alpha_tilde = 0.25;
  /// Carried for configuration fidelity only; no update or selection rule reads it.
  double sigma = 0.05;
  bool sharing = false;

  /// Default hyper-parameters for a variant. LinUCB gets λ = 1, α = 0.5.
  static AgentConfig defaults(Variant v);
};

/// One absolute key-term observation (x̃, r̃).
struct Observation {
  Eigen::VectorXd feature;
  double label;
};

/// Per-user estimator: arm-level (M, b) and key-term-level (M̃, b̃) ridge
/// states with cached θ = M⁻¹(b + (1−λ)θ̃) and θ̃ = M̃⁻¹b̃.
struct UserModelState {
  RidgeStated arm_model;
  RidgeStated keyterm_model;
  Eigen::VectorXd theta;
  Eigen::VectorXd theta_tilde;
  std::size_t rounds = 0;
};

/// M = (1−λ)I (or I when λ = 1), M̃ = λ̃I, zero responses.
UserModelState init_user_state(Eigen::Index d, const AgentConfig& cfg);

/// Recomputes θ̃ and θ from the ridge states.
void refresh_estimates(UserModelState& state, const AgentConfig& cfg);

/// ‖X M⁻¹ M̃⁻¹ x̃‖² / (1 + x̃ᵀ M̃⁻¹ x̃), the expected reduction of estimation
/// error over the candidate arms X (one row per arm) from observing x̃.
double score_keyterm(const UserModelState& state, const Eigen::MatrixXd& candidate_arms,
                     const Eigen::Ref<const Eigen::VectorXd>& x_tilde);

/// Argmax of score_keyterm over candidates; ties go to the smallest id.
KeyTermId select_keyterm(const UserModelState& state, const Eigen::MatrixXd& candidate_arms,
                         std::span<const KeyTermId> candidates, const Catalog& catalog);

/// Picks k1 by score_keyterm, pseudo-updates M̃ with x̃_{k1}, then picks k2 ≠ k1
/// under the pseudo-updated model. The state itself is not modified.
std::pair<KeyTermId, KeyTermId> select_pair_sequential(const UserModelState& state,
                                                       const Eigen::MatrixXd& candidate_arms,
                                                       std::span<const KeyTermId> candidates,
                                                       const Catalog& catalog);

/// Maximizes score_keyterm on the difference x̃_{k1} − x̃_{k2}. With fast=false
/// all unordered pairs are scanned and the smaller id is returned first; with
/// fast=true k1 comes from select_keyterm and only k2 is searched.
std::pair<KeyTermId, KeyTermId> select_pair_difference(const UserModelState& state,
                                                       const Eigen::MatrixXd& candidate_arms,
                                                       std::span<const KeyTermId> candidates,
                                                       const Catalog& catalog, bool fast);

/// Pair selection dispatched on the variant.
std::pair<KeyTermId, KeyTermId> select_pair(Variant variant, const UserModelState& state,
                                            const Eigen::MatrixXd& candidate_arms,
                                            std::span<const KeyTermId> candidates,
                                            const Catalog& catalog);

/// Observations encoding "k1 vs k2 answered r_rel" for a relative variant.
std::vector<Observation> relative_observations(Variant variant, const Eigen::Ref<const Eigen::VectorXd>& x1,
                                               const Eigen::Ref<const Eigen::VectorXd>& x2, int r_rel);

/// M̃ += x̃x̃ᵀ, b̃ += r̃x̃.
void apply_observation(RidgeStated& keyterm_model, const Observation& obs);

/// Which users receive a conversational update. An empty `group` with
/// sharing enabled means all users.
struct ShareScope {
  bool sharing = false;
  std::span<const UserId> group = {};
};

void absorb_relative_feedback(std::span<UserModelState> states, UserId active_user, const AgentConfig& cfg,
                              KeyTermId k1, KeyTermId k2, int r_rel, const Catalog& catalog,
                              ShareScope scope);

void absorb_absolute_feedback(std::span<UserModelState> states, UserId active_user, const AgentConfig& cfg,
                              KeyTermId k, int r_abs, const Catalog& catalog, ShareScope scope);

/// Per-arm upper confidence score
/// xᵀθ + λα‖x‖_{M⁻¹} + (1−λ)α̃‖M⁻¹x‖_{M̃⁻¹}, one entry per row of arms.
Eigen::VectorXd arm_scores(const UserModelState& state, const Eigen::MatrixXd& arms, const AgentConfig& cfg);

/// Argmax of arm_scores over the candidates; ties go to the smallest arm id.
ArmId select_arm(const UserModelState& state, std::span<const ArmId> candidate_arms, const Catalog& catalog,
                 const AgentConfig& cfg);

/// M += λxxᵀ, b += λrx, then refreshes the estimates.
void absorb_click(UserModelState& state, const Eigen::Ref<const Eigen::VectorXd>& arm_feature, int reward,
                  const AgentConfig& cfg);

/// All per-user models of one policy.
class Agent {
 public:
  Agent(AgentConfig cfg, const Catalog& catalog, std::size_t num_users);

  [[nodiscard]] const AgentConfig& config() const { return cfg_; }
  [[nodiscard]] std::span<UserModelState> states() { return states_; }
  [[nodiscard]] std::span<const UserModelState> states() const { return states_; }
  [[nodiscard]] const UserModelState& state(UserId u) const { return states_.at(u); }
  [[nodiscard]] UserModelState& state(UserId u) { return states_.at(u); }

  /// Restricts feedback sharing to a subset of users (empty means everyone).
  void set_share_group(std::vector<UserId> group) { share_group_ = std::move(group); }
  [[nodiscard]] ShareScope share_scope() const { return {cfg_.sharing, share_group_}; }

 private:
  AgentConfig cfg_;
  std::vector<UserModelState> states_;
  std::vector<UserId> share_group_;
};

}  // namespace relbandit
