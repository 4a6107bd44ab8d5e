#include "relbandit/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace relbandit {
namespace {

/// Evaluates the error-reduction score for many key-term directions at once.
/// proj = X M⁻¹ M̃⁻¹ is shared by every direction of one question.
class KeytermScorer {
 public:
  KeytermScorer(const RidgeStated& arm_model, const RidgeStated& keyterm_model, const Eigen::MatrixXd& arms)
      : keyterm_inv_(keyterm_model.gram_inv) {
    if (arms.rows() < 1) throw std::invalid_argument("key-term scoring needs at least one candidate arm");
    if (arms.cols() != arm_model.dim()) throw std::invalid_argument("candidate arm dimension mismatch");
    proj_.noalias() = arms * arm_model.gram_inv * keyterm_model.gram_inv;
  }

  [[nodiscard]] double operator()(const Eigen::Ref<const Eigen::VectorXd>& v) const {
    return (proj_ * v).squaredNorm() / (1.0 + v.dot(keyterm_inv_ * v));
  }

  /// Projections of a set of key-term features (rows of `feats`).
  struct Batch {
    Eigen::MatrixXd projected;  // proj · x̃ per column
    Eigen::MatrixXd whitened;   // M̃⁻¹ x̃ per column
    Eigen::MatrixXd features;   // x̃ per column
  };

  [[nodiscard]] Batch batch(const Eigen::MatrixXd& feats_by_col) const {
    Batch b;
    b.features = feats_by_col;
    b.projected.noalias() = proj_ * feats_by_col;
    b.whitened.noalias() = keyterm_inv_ * feats_by_col;
    return b;
  }

 private:
  Eigen::MatrixXd proj_;
  const Eigen::MatrixXd& keyterm_inv_;
};

Eigen::MatrixXd gather_keyterms(std::span<const KeyTermId> candidates, const Catalog& catalog) {
  Eigen::MatrixXd out(catalog.dim(), static_cast<Eigen::Index>(candidates.size()));
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i] >= catalog.num_keyterms()) throw std::invalid_argument("unknown key-term id");
    out.col(static_cast<Eigen::Index>(i)) = catalog.keyterm(candidates[i]).transpose();
  }
  return out;
}

double single_score(const KeytermScorer::Batch& b, Eigen::Index i) {
  return b.projected.col(i).squaredNorm() / (1.0 + b.features.col(i).dot(b.whitened.col(i)));
}

double pair_score(const KeytermScorer::Batch& b, Eigen::Index i, Eigen::Index j) {
  const double num = (b.projected.col(i) - b.projected.col(j)).squaredNorm();
  const double den = 1.0 + (b.features.col(i) - b.features.col(j)).dot(b.whitened.col(i) - b.whitened.col(j));
  return num / den;
}

/// Index into candidates of the best single score, skipping `exclude`.
Eigen::Index best_single(const KeytermScorer::Batch& b, std::span<const KeyTermId> candidates,
                         Eigen::Index exclude = -1) {
  Eigen::Index best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(candidates.size()); ++i) {
    if (i == exclude) continue;
    const double s = single_score(b, i);
    if (s > best_score || (s == best_score && candidates[i] < candidates[best])) {
      best = i;
      best_score = s;
    }
  }
  return best;
}

void require_distinct_pair(std::span<const KeyTermId> candidates) {
  if (candidates.size() < 2) throw std::invalid_argument("pair selection needs at least two candidate key-terms");
}

}  // namespace

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::LinUCB: return "linucb";
    case Variant::ConUCB: return "conucb";
    case Variant::Pos: return "pos";
    case Variant::PosNeg: return "posneg";
    case Variant::Difference: return "diff";
    case Variant::DifferenceFast: return "diff_fast";
    case Variant::Oracle: return "oracle";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::LinUCB, Variant::ConUCB, Variant::Pos, Variant::PosNeg, Variant::Difference,
                    Variant::DifferenceFast, Variant::Oracle})
    if (variant_name(v) == name) return v;
  throw std::invalid_argument("unknown agent '" + std::string(name) + "'");
}

bool asks_relative_questions(Variant v) {
  return v == Variant::Pos || v == Variant::PosNeg || v == Variant::Difference || v == Variant::DifferenceFast;
}

AgentConfig AgentConfig::defaults(Variant v) {
  AgentConfig cfg;
  cfg.variant = v;
  if (v == Variant::LinUCB) {
    cfg.lambda = 1.0;
    cfg.alpha = 0.5;
  }
  return cfg;
}

UserModelState init_user_state(Eigen::Index d, const AgentConfig& cfg) {
  if (d < 1) throw std::invalid_argument("init_user_state: d must be >= 1");
  if (!(cfg.lambda > 0.0 && cfg.lambda <= 1.0))
    throw std::invalid_argument("init_user_state: lambda must lie in (0, 1]");
  UserModelState s;
  // λ = 1 leaves no key-term prior; fall back to the LinUCB identity prior.
  s.arm_model = ridge_init<double>(d, cfg.lambda < 1.0 ? 1.0 - cfg.lambda : 1.0);
  s.keyterm_model = ridge_init<double>(d, cfg.lambda_tilde);
  s.theta = Eigen::VectorXd::Zero(d);
  s.theta_tilde = Eigen::VectorXd::Zero(d);
  return s;
}

void refresh_estimates(UserModelState& state, const AgentConfig& cfg) {
  state.theta_tilde = ridge_solve(state.keyterm_model, state.keyterm_model.response);
  state.theta = ridge_solve(state.arm_model, state.arm_model.response + (1.0 - cfg.lambda) * state.theta_tilde);
  if (!state.theta.allFinite() || !state.theta_tilde.allFinite())
    throw std::runtime_error("non-finite estimate in user model");
}

double score_keyterm(const UserModelState& state, const Eigen::MatrixXd& candidate_arms,
                     const Eigen::Ref<const Eigen::VectorXd>& x_tilde) {
  if (x_tilde.size() != state.keyterm_model.dim()) throw std::invalid_argument("score_keyterm: dimension mismatch");
  return KeytermScorer(state.arm_model, state.keyterm_model, candidate_arms)(x_tilde);
}

KeyTermId select_keyterm(const UserModelState& state, const Eigen::MatrixXd& candidate_arms,
                         std::span<const KeyTermId> candidates, const Catalog& catalog) {
  if (candidates.empty()) throw std::invalid_argument("select_keyterm: no candidate key-terms");
  const KeytermScorer scorer(state.arm_model, state.keyterm_model, candidate_arms);
  const auto batch = scorer.batch(gather_keyterms(candidates, catalog));
  return candidates[best_single(batch, candidates)];
}

std::pair<KeyTermId, KeyTermId> select_pair_sequential(const UserModelState& state,
                                                       const Eigen::MatrixXd& candidate_arms,
                                                       std::span<const KeyTermId> candidates,
                                                       const Catalog& catalog) {
  require_distinct_pair(candidates);
  const Eigen::MatrixXd feats = gather_keyterms(candidates, catalog);
  const KeytermScorer first(state.arm_model, state.keyterm_model, candidate_arms);
  const Eigen::Index i1 = best_single(first.batch(feats), candidates);

  // Pseudo-update on a snapshot; only the Gram side matters for the score.
  RidgeStated pseudo = state.keyterm_model;
  ridge_rank1_update(pseudo, feats.col(i1));
  const KeytermScorer second(state.arm_model, pseudo, candidate_arms);
  const Eigen::Index i2 = best_single(second.batch(feats), candidates, i1);
  return {candidates[i1], candidates[i2]};
}

std::pair<KeyTermId, KeyTermId> select_pair_difference(const UserModelState& state,
                                                       const Eigen::MatrixXd& candidate_arms,
                                                       std::span<const KeyTermId> candidates,
                                                       const Catalog& catalog, bool fast) {
  require_distinct_pair(candidates);
  const KeytermScorer scorer(state.arm_model, state.keyterm_model, candidate_arms);
  const auto batch = scorer.batch(gather_keyterms(candidates, catalog));
  const auto n = static_cast<Eigen::Index>(candidates.size());

  if (fast) {
    const Eigen::Index i1 = best_single(batch, candidates);
    Eigen::Index best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i1) continue;
      const double s = pair_score(batch, i1, j);
      if (s > best_score || (s == best_score && candidates[j] < candidates[best])) {
        best = j;
        best_score = s;
      }
    }
    return {candidates[i1], candidates[best]};
  }

  std::pair<KeyTermId, KeyTermId> best{0, 0};
  double best_score = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double s = pair_score(batch, i, j);
      const auto ids = std::minmax(candidates[i], candidates[j]);
      const std::pair<KeyTermId, KeyTermId> pair{ids.first, ids.second};
      if (pair.first == pair.second) throw std::invalid_argument("duplicate candidate key-term");
      if (s > best_score || (s == best_score && pair < best)) {
        best = pair;
        best_score = s;
      }
    }
  }
  return best;
}

std::pair<KeyTermId, KeyTermId> select_pair(Variant variant, const UserModelState& state,
                                            const Eigen::MatrixXd& candidate_arms,
                                            std::span<const KeyTermId> candidates, const Catalog& catalog) {
  switch (variant) {
    case Variant::Pos:
    case Variant::PosNeg: return select_pair_sequential(state, candidate_arms, candidates, catalog);
    case Variant::Difference: return select_pair_difference(state, candidate_arms, candidates, catalog, false);
    case Variant::DifferenceFast: return select_pair_difference(state, candidate_arms, candidates, catalog, true);
    default: throw std::invalid_argument("select_pair: variant does not ask relative questions");
  }
}

std::vector<Observation> relative_observations(Variant variant, const Eigen::Ref<const Eigen::VectorXd>& x1,
                                               const Eigen::Ref<const Eigen::VectorXd>& x2, int r_rel) {
  if (r_rel != 0 && r_rel != 1) throw std::invalid_argument("relative feedback must be 0 or 1");
  const auto& preferred = r_rel == 1 ? x1 : x2;
  const auto& other = r_rel == 1 ? x2 : x1;
  switch (variant) {
    case Variant::Pos: return {{preferred, 1.0}};
    case Variant::PosNeg: return {{preferred, 1.0}, {other, 0.0}};
    case Variant::Difference:
    case Variant::DifferenceFast: return {{preferred - other, 1.0}};
    default: throw std::invalid_argument("relative_observations: variant does not ask relative questions");
  }
}

void apply_observation(RidgeStated& keyterm_model, const Observation& obs) {
  ridge_rank1_update(keyterm_model, obs.feature);
  if (obs.label != 0.0) ridge_add_response(keyterm_model, obs.feature, obs.label);
}

namespace {

template <typename Fn>
void for_each_recipient(std::span<UserModelState> states, UserId active_user, ShareScope scope, Fn&& fn) {
  if (active_user >= states.size()) throw std::invalid_argument("active user out of range");
  if (!scope.sharing) {
    fn(states[active_user]);
    return;
  }
  if (scope.group.empty()) {
    for (auto& s : states) fn(s);
    return;
  }
  bool active_included = false;
  for (UserId u : scope.group) {
    if (u >= states.size()) throw std::invalid_argument("share group user out of range");
    active_included |= u == active_user;
    fn(states[u]);
  }
  if (!active_included) fn(states[active_user]);
}

}  // namespace

void absorb_relative_feedback(std::span<UserModelState> states, UserId active_user, const AgentConfig& cfg,
                              KeyTermId k1, KeyTermId k2, int r_rel, const Catalog& catalog, ShareScope scope) {
  if (k1 == k2) throw std::invalid_argument("absorb_relative_feedback: key-terms must differ");
  if (k1 >= catalog.num_keyterms() || k2 >= catalog.num_keyterms())
    throw std::invalid_argument("absorb_relative_feedback: unknown key-term");
  const auto obs = relative_observations(cfg.variant, catalog.keyterm(k1).transpose(),
                                         catalog.keyterm(k2).transpose(), r_rel);
  for_each_recipient(states, active_user, scope, [&](UserModelState& s) {
    for (const auto& o : obs) apply_observation(s.keyterm_model, o);
    refresh_estimates(s, cfg);
  });
}

void absorb_absolute_feedback(std::span<UserModelState> states, UserId active_user, const AgentConfig& cfg,
                              KeyTermId k, int r_abs, const Catalog& catalog, ShareScope scope) {
  if (r_abs != 0 && r_abs != 1) throw std::invalid_argument("absolute feedback must be 0 or 1");
  if (k >= catalog.num_keyterms()) throw std::invalid_argument("absorb_absolute_feedback: unknown key-term");
  const Observation obs{catalog.keyterm(k).transpose(), static_cast<double>(r_abs)};
  for_each_recipient(states, active_user, scope, [&](UserModelState& s) {
    apply_observation(s.keyterm_model, obs);
    refresh_estimates(s, cfg);
  });
}

Eigen::VectorXd arm_scores(const UserModelState& state, const Eigen::MatrixXd& arms, const AgentConfig& cfg) {
  if (arms.cols() != state.arm_model.dim()) throw std::invalid_argument("arm_scores: dimension mismatch");
  const Eigen::MatrixXd whitened = arms * state.arm_model.gram_inv;  // rows: (M⁻¹x)ᵀ
  Eigen::VectorXd scores = arms * state.theta;
  const Eigen::VectorXd arm_width = (whitened.array() * arms.array()).rowwise().sum().max(0.0).sqrt();
  scores += cfg.lambda * cfg.alpha * arm_width;
  if (cfg.lambda < 1.0) {
    const Eigen::MatrixXd through = whitened * state.keyterm_model.gram_inv;
    const Eigen::VectorXd kt_width = (through.array() * whitened.array()).rowwise().sum().max(0.0).sqrt();
    scores += (1.0 - cfg.lambda) * cfg.alpha_tilde * kt_width;
  }
  return scores;
}

ArmId select_arm(const UserModelState& state, std::span<const ArmId> candidate_arms, const Catalog& catalog,
                 const AgentConfig& cfg) {
  if (candidate_arms.empty()) throw std::invalid_argument("select_arm: no candidate arms");
  const Eigen::VectorXd scores = arm_scores(state, catalog.arm_rows(candidate_arms), cfg);
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidate_arms.size(); ++i) {
    const auto si = scores(static_cast<Eigen::Index>(i));
    const auto sb = scores(static_cast<Eigen::Index>(best));
    if (si > sb || (si == sb && candidate_arms[i] < candidate_arms[best])) best = i;
  }
  return candidate_arms[best];
}

void absorb_click(UserModelState& state, const Eigen::Ref<const Eigen::VectorXd>& arm_feature, int reward,
                  const AgentConfig& cfg) {
  if (reward != 0 && reward != 1) throw std::invalid_argument("absorb_click: reward must be 0 or 1");
  ridge_rank1_update(state.arm_model, arm_feature, cfg.lambda);
  if (reward == 1) ridge_add_response(state.arm_model, arm_feature, cfg.lambda);
  refresh_estimates(state, cfg);
}

Agent::Agent(AgentConfig cfg, const Catalog& catalog, std::size_t num_users) : cfg_(cfg) {
  states_.reserve(num_users);
  for (std::size_t u = 0; u < num_users; ++u) states_.push_back(init_user_state(catalog.dim(), cfg_));
}

}  // namespace relbandit
