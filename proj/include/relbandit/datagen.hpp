#pragma once

#include "relbandit/dataset.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>

namespace relbandit {

struct SyntheticConfig {
  std::size_t num_users = 200;
  std::size_t num_arms = 5000;
  std::size_t num_keyterms = 500;
  std::size_t d = 50;
  double sigma = 1.0;
  std::size_t max_related_arms = 10;
  std::uint64_t seed = 0;
};

struct GroupConfig {
  SyntheticConfig base;
  /// Norm of every user head, in [0, 0.5].
  double c = 0.4;
  /// Weight of the individual direction against the shared one.
  double beta = 0.0;
};

/// Random catalog plus users:
///  - each key-term relates to n_k ~ U{1..max_related_arms} arms drawn without
///    replacement; an arm left without key-terms gets one uniform key-term;
///    W_{a,k} = 1/n_a;
///  - pseudo key-term features ẋ_k ~ N(0, σ²I) in d−1 dimensions, arm features
///    ~ N(mean of ẋ_k over the arm's key-terms, σ²I), normalized, with a
///    trailing 1;
///  - users (c_u·θ/‖θ‖, b_u) with θ ~ N(0, σ²I), c_u ~ U[0, 0.5],
///    b_u ~ U[c_u, 1 − c_u].
/// Graph, arm features and users draw from separate seeded streams, so the
/// catalog depends only on the catalog fields and the seed.
Dataset gen_synthetic(const SyntheticConfig& cfg);

/// Users (c·(θ_base + βθ_u)/‖θ_base + βθ_u‖, b_u) with θ_base, θ_u ~ N(0, σ²I)
/// and b_u ~ U[c, 1 − c]. One row per user, d columns.
Eigen::MatrixXd gen_user_groups(const GroupConfig& cfg);

/// gen_synthetic's catalog with gen_user_groups' users.
Dataset gen_group_dataset(const GroupConfig& cfg);

}  // namespace relbandit
