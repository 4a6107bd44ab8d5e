#pragma once

#include "relbandit/domain.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <string>

namespace relbandit {

/// Tolerance on expected rewards x_aᵀθ*_u lying in [0, 1].
inline constexpr double kRewardRangeTolerance = 1e-9;

/// A catalog plus the ground-truth user features (one row per user).
struct Dataset {
  Catalog catalog;
  Eigen::MatrixXd users;

  [[nodiscard]] std::size_t num_users() const { return static_cast<std::size_t>(users.rows()); }
};

/// Summary statistics of a bundle.
struct BundleStats {
  std::size_t d = 0;
  std::size_t num_arms = 0;
  std::size_t num_keyterms = 0;
  std::size_t num_users = 0;
  double avg_keyterms_per_arm = 0.0;
  double avg_arms_per_keyterm = 0.0;
  double min_expected_reward = 0.0;
  double max_expected_reward = 0.0;
};

/// Checks dimensions, finiteness, and that every x_aᵀθ*_u lies in [0, 1]
/// within kRewardRangeTolerance. Throws ValidationError.
void validate_dataset(const Dataset& dataset);

BundleStats bundle_stats(const Dataset& dataset);

/// Reads meta.tsv, arms.tsv, graph.tsv and users.tsv from a bundle directory.
/// Throws IoError for missing or unreadable files, ValidationError for
/// malformed content or violated invariants.
Dataset load_bundle(const std::filesystem::path& dir);

/// Writes the four bundle files. Floats use 17 significant digits so that a
/// write/read/write cycle is byte-identical. Throws IoError.
void write_bundle(const std::filesystem::path& dir, const Dataset& dataset);

/// Shortest decimal form that round-trips ("%.17g").
std::string format_double(double v);

}  // namespace relbandit
