#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace relbandit {

// Dense indices in [0, count).
using ArmId = std::size_t;
using KeyTermId = std::size_t;
using UserId = std::size_t;

/// Tolerance on per-arm weight sums.
inline constexpr double kRowSumTolerance = 1e-9;

struct Edge {
  ArmId arm;
  KeyTermId keyterm;
  double weight;
};

/// Weighted bipartite arm/key-term graph. Immutable once built; stores both
/// arm-major and key-term-major adjacency.
class RelationGraph {
 public:
  struct Neighbor {
    std::size_t id;
    double weight;
  };

  /// Validates and builds the graph. Rows whose weights sum to a positive value
  /// other than 1 (beyond kRowSumTolerance) are rescaled. Throws InvalidGraph
  /// on out-of-range ids, non-positive weights, duplicate edges, arms without
  /// edges, or key-terms without edges.
  static RelationGraph build(std::size_t num_arms, std::size_t num_keyterms,
                             std::vector<Edge> edges);

  [[nodiscard]] std::size_t num_arms() const { return arm_offsets_.size() - 1; }
  [[nodiscard]] std::size_t num_keyterms() const { return keyterm_offsets_.size() - 1; }

  /// All edges, sorted by (arm, keyterm).
  [[nodiscard]] std::span<const Edge> edges() const { return edges_; }
  /// Key-terms of an arm with their W weights.
  [[nodiscard]] std::span<const Neighbor> keyterms_of(ArmId arm) const;
  /// Arms of a key-term with their W weights.
  [[nodiscard]] std::span<const Neighbor> arms_of(KeyTermId keyterm) const;

 private:
  std::vector<Edge> edges_;
  std::vector<Neighbor> by_arm_;
  std::vector<std::size_t> arm_offsets_;
  std::vector<Neighbor> by_keyterm_;
  std::vector<std::size_t> keyterm_offsets_;
};

/// x̃_k = Σ_a (W_{a,k} / Σ_{a'} W_{a',k}) x_a. Rows of arm_features are arms;
/// rows of the result are key-terms.
Eigen::MatrixXd compute_keyterm_features(const RelationGraph& graph,
                                         const Eigen::MatrixXd& arm_features);

/// Key-terms related to at least one candidate arm, sorted by id.
std::vector<KeyTermId> candidate_keyterms(const RelationGraph& graph,
                                          std::span<const ArmId> candidate_arms);

/// Arms, key-terms and their contextual vectors.
class Catalog {
 public:
  Catalog(RelationGraph graph, Eigen::MatrixXd arm_features);

  [[nodiscard]] const RelationGraph& graph() const { return graph_; }
  [[nodiscard]] const Eigen::MatrixXd& arm_features() const { return arm_features_; }
  [[nodiscard]] const Eigen::MatrixXd& keyterm_features() const { return keyterm_features_; }

  [[nodiscard]] Eigen::Index dim() const { return arm_features_.cols(); }
  [[nodiscard]] std::size_t num_arms() const { return graph_.num_arms(); }
  [[nodiscard]] std::size_t num_keyterms() const { return graph_.num_keyterms(); }

  [[nodiscard]] auto arm(ArmId a) const { return arm_features_.row(static_cast<Eigen::Index>(a)); }
  [[nodiscard]] auto keyterm(KeyTermId k) const {
    return keyterm_features_.row(static_cast<Eigen::Index>(k));
  }

  /// Stacks the rows of the given arms.
  [[nodiscard]] Eigen::MatrixXd arm_rows(std::span<const ArmId> arms) const;

 private:
  RelationGraph graph_;
  Eigen::MatrixXd arm_features_;
  Eigen::MatrixXd keyterm_features_;
};

}  // namespace relbandit
