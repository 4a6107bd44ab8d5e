#include "relbandit/domain.hpp"

#include "relbandit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace relbandit {

RelationGraph RelationGraph::build(std::size_t num_arms, std::size_t num_keyterms,
                                   std::vector<Edge> edges) {
  if (num_arms == 0 || num_keyterms == 0)
    throw InvalidGraph("relation graph needs at least one arm and one key-term");

  for (const auto& e : edges) {
    if (e.arm >= num_arms || e.keyterm >= num_keyterms)
      throw InvalidGraph("edge (" + std::to_string(e.arm) + ", " + std::to_string(e.keyterm) +
                         ") is out of range");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw InvalidGraph("edge (" + std::to_string(e.arm) + ", " + std::to_string(e.keyterm) +
                         ") has a non-positive weight");
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.arm != b.arm ? a.arm < b.arm : a.keyterm < b.keyterm;
  });
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i].arm == edges[i - 1].arm && edges[i].keyterm == edges[i - 1].keyterm)
      throw InvalidGraph("duplicate edge (" + std::to_string(edges[i].arm) + ", " +
                         std::to_string(edges[i].keyterm) + ")");
  }

  RelationGraph g;
  g.arm_offsets_.assign(num_arms + 1, 0);
  g.keyterm_offsets_.assign(num_keyterms + 1, 0);
  for (const auto& e : edges) {
    ++g.arm_offsets_[e.arm + 1];
    ++g.keyterm_offsets_[e.keyterm + 1];
  }
  for (std::size_t a = 0; a < num_arms; ++a) {
    if (g.arm_offsets_[a + 1] == 0)
      throw InvalidGraph("arm " + std::to_string(a) + " has no related key-term");
    g.arm_offsets_[a + 1] += g.arm_offsets_[a];
  }
  for (std::size_t k = 0; k < num_keyterms; ++k) {
    if (g.keyterm_offsets_[k + 1] == 0)
      throw InvalidGraph("key-term " + std::to_string(k) + " has no related arm");
    g.keyterm_offsets_[k + 1] += g.keyterm_offsets_[k];
  }

  // Row normalization.
  for (std::size_t a = 0; a < num_arms; ++a) {
    double sum = 0.0;
    for (std::size_t i = g.arm_offsets_[a]; i < g.arm_offsets_[a + 1]; ++i) sum += edges[i].weight;
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      for (std::size_t i = g.arm_offsets_[a]; i < g.arm_offsets_[a + 1]; ++i)
        edges[i].weight /= sum;
    }
  }

  g.by_arm_.reserve(edges.size());
  for (const auto& e : edges) g.by_arm_.push_back({e.keyterm, e.weight});
  g.by_keyterm_.resize(edges.size());
  std::vector<std::size_t> cursor(g.keyterm_offsets_.begin(), g.keyterm_offsets_.end() - 1);
  for (const auto& e : edges) g.by_keyterm_[cursor[e.keyterm]++] = {e.arm, e.weight};
  g.edges_ = std::move(edges);
  return g;
}

std::span<const RelationGraph::Neighbor> RelationGraph::keyterms_of(ArmId arm) const {
  if (arm >= num_arms()) throw std::invalid_argument("keyterms_of: arm out of range");
  return std::span(by_arm_).subspan(arm_offsets_[arm], arm_offsets_[arm + 1] - arm_offsets_[arm]);
}

std::span<const RelationGraph::Neighbor> RelationGraph::arms_of(KeyTermId keyterm) const {
  if (keyterm >= num_keyterms()) throw std::invalid_argument("arms_of: key-term out of range");
  return std::span(by_keyterm_)
      .subspan(keyterm_offsets_[keyterm], keyterm_offsets_[keyterm + 1] - keyterm_offsets_[keyterm]);
}

Eigen::MatrixXd compute_keyterm_features(const RelationGraph& graph,
                                         const Eigen::MatrixXd& arm_features) {
  if (static_cast<std::size_t>(arm_features.rows()) != graph.num_arms())
    throw std::invalid_argument("compute_keyterm_features: one feature row per arm expected");
  if (!arm_features.allFinite())
    throw std::invalid_argument("compute_keyterm_features: non-finite arm feature");

  Eigen::MatrixXd out(static_cast<Eigen::Index>(graph.num_keyterms()), arm_features.cols());
  for (KeyTermId k = 0; k < graph.num_keyterms(); ++k) {
    const auto arms = graph.arms_of(k);
    if (arms.empty()) throw InvalidGraph("key-term " + std::to_string(k) + " has no related arm");
    double total = 0.0;
    for (const auto& n : arms) total += n.weight;
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(arm_features.cols());
    for (const auto& n : arms) acc += (n.weight / total) * arm_features.row(static_cast<Eigen::Index>(n.id));
    out.row(static_cast<Eigen::Index>(k)) = acc;
  }
  return out;
}

std::vector<KeyTermId> candidate_keyterms(const RelationGraph& graph,
                                          std::span<const ArmId> candidate_arms) {
  if (candidate_arms.empty())
    throw std::invalid_argument("candidate_keyterms: empty candidate arm set");
  std::vector<char> seen(graph.num_keyterms(), 0);
  for (ArmId a : candidate_arms)
    for (const auto& n : graph.keyterms_of(a)) seen[n.id] = 1;
  std::vector<KeyTermId> out;
  for (KeyTermId k = 0; k < seen.size(); ++k)
    if (seen[k]) out.push_back(k);
  return out;
}

Catalog::Catalog(RelationGraph graph, Eigen::MatrixXd arm_features)
    : graph_(std::move(graph)), arm_features_(std::move(arm_features)) {
  keyterm_features_ = compute_keyterm_features(graph_, arm_features_);
}

Eigen::MatrixXd Catalog::arm_rows(std::span<const ArmId> arms) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(arms.size()), dim());
  for (std::size_t i = 0; i < arms.size(); ++i) {
    if (arms[i] >= num_arms()) throw std::invalid_argument("arm_rows: arm out of range");
    out.row(static_cast<Eigen::Index>(i)) = arm(arms[i]);
  }
  return out;
}

}  // namespace relbandit
