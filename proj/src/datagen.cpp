#include "relbandit/datagen.hpp"

#include "relbandit/environment.hpp"
#include "relbandit/rng.hpp"

#include <stdexcept>
#include <vector>

namespace relbandit {
namespace {

enum Stream : std::uint64_t { kGraph = 11, kArmFeatures = 12, kUsers = 13, kGroupUsers = 14 };

void check(const SyntheticConfig& cfg) {
  if (cfg.d < 2) throw std::invalid_argument("synthetic data needs d >= 2");
  if (cfg.num_users == 0 || cfg.num_arms == 0 || cfg.num_keyterms == 0 || cfg.max_related_arms == 0)
    throw std::invalid_argument("synthetic data counts must be positive");
  if (!(cfg.sigma > 0.0)) throw std::invalid_argument("synthetic data sigma must be positive");
}

Eigen::VectorXd gaussian(Rng& rng, Eigen::Index n, double sigma) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = sigma * rng.normal();
  return v;
}

/// Gaussian draw with nonzero norm.
Eigen::VectorXd nonzero_gaussian(Rng& rng, Eigen::Index n, double sigma, const Eigen::VectorXd& mean) {
  while (true) {
    Eigen::VectorXd v = mean + gaussian(rng, n, sigma);
    if (v.norm() > 0.0) return v;
  }
}

}  // namespace

Dataset gen_synthetic(const SyntheticConfig& cfg) {
  check(cfg);
  const auto d = static_cast<Eigen::Index>(cfg.d);
  const std::size_t max_related = std::min(cfg.max_related_arms, cfg.num_arms);

  Rng graph_rng(derive_seed({cfg.seed, kGraph}));
  std::vector<std::vector<KeyTermId>> arm_keyterms(cfg.num_arms);
  for (KeyTermId k = 0; k < cfg.num_keyterms; ++k) {
    const std::size_t n_k = 1 + graph_rng.uniform_index(max_related);
    for (ArmId a : sample_candidates(cfg.num_arms, n_k, graph_rng)) arm_keyterms[a].push_back(k);
  }
  for (ArmId a = 0; a < cfg.num_arms; ++a) {
    if (arm_keyterms[a].empty()) arm_keyterms[a].push_back(graph_rng.uniform_index(cfg.num_keyterms));
  }
  std::vector<Edge> edges;
  for (ArmId a = 0; a < cfg.num_arms; ++a) {
    const double w = 1.0 / static_cast<double>(arm_keyterms[a].size());
    for (KeyTermId k : arm_keyterms[a]) edges.push_back({a, k, w});
  }
  RelationGraph graph = RelationGraph::build(cfg.num_arms, cfg.num_keyterms, std::move(edges));

  Rng feat_rng(derive_seed({cfg.seed, kArmFeatures}));
  Eigen::MatrixXd pseudo(static_cast<Eigen::Index>(cfg.num_keyterms), d - 1);
  for (Eigen::Index k = 0; k < pseudo.rows(); ++k) pseudo.row(k) = gaussian(feat_rng, d - 1, cfg.sigma).transpose();

  Eigen::MatrixXd arms(static_cast<Eigen::Index>(cfg.num_arms), d);
  for (ArmId a = 0; a < cfg.num_arms; ++a) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d - 1);
    for (KeyTermId k : arm_keyterms[a]) mean += pseudo.row(static_cast<Eigen::Index>(k)).transpose();
    mean /= static_cast<double>(arm_keyterms[a].size());
    const Eigen::VectorXd x = nonzero_gaussian(feat_rng, d - 1, cfg.sigma, mean);
    const auto row = static_cast<Eigen::Index>(a);
    arms.row(row).head(d - 1) = (x / x.norm()).transpose();
    arms(row, d - 1) = 1.0;
  }

  Rng user_rng(derive_seed({cfg.seed, kUsers}));
  Eigen::MatrixXd users(static_cast<Eigen::Index>(cfg.num_users), d);
  for (Eigen::Index u = 0; u < users.rows(); ++u) {
    const Eigen::VectorXd theta = nonzero_gaussian(user_rng, d - 1, cfg.sigma, Eigen::VectorXd::Zero(d - 1));
    const double c_u = user_rng.uniform(0.0, 0.5);
    const double b_u = user_rng.uniform(c_u, 1.0 - c_u);
    users.row(u).head(d - 1) = (c_u * theta / theta.norm()).transpose();
    users(u, d - 1) = b_u;
  }

  return Dataset{Catalog(std::move(graph), std::move(arms)), std::move(users)};
}

Eigen::MatrixXd gen_user_groups(const GroupConfig& cfg) {
  check(cfg.base);
  if (!(cfg.c >= 0.0 && cfg.c <= 0.5)) throw std::invalid_argument("group c must lie in [0, 0.5]");
  if (!(cfg.beta >= 0.0)) throw std::invalid_argument("group beta must be non-negative");
  const auto d = static_cast<Eigen::Index>(cfg.base.d);

  Rng rng(derive_seed({cfg.base.seed, kGroupUsers}));
  const Eigen::VectorXd base = nonzero_gaussian(rng, d - 1, cfg.base.sigma, Eigen::VectorXd::Zero(d - 1));
  Eigen::MatrixXd users(static_cast<Eigen::Index>(cfg.base.num_users), d);
  for (Eigen::Index u = 0; u < users.rows(); ++u) {
    Eigen::VectorXd head;
    do {
      head = base + cfg.beta * gaussian(rng, d - 1, cfg.base.sigma);
    } while (!(head.norm() > 0.0));
    const double b_u = rng.uniform(cfg.c, 1.0 - cfg.c);
    users.row(u).head(d - 1) = (cfg.c * head / head.norm()).transpose();
    users(u, d - 1) = b_u;
  }
  return users;
}

Dataset gen_group_dataset(const GroupConfig& cfg) {
  Dataset ds = gen_synthetic(cfg.base);
  ds.users = gen_user_groups(cfg);
  return ds;
}

}  // namespace relbandit
