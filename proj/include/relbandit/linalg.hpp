#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace relbandit {

/// Regularized ridge-regression state: Gram matrix M, its maintained inverse,
/// and the response vector b. Used for both the arm-level and key-term-level
/// models of every user.
template <typename Scalar>
struct RidgeState {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix gram;
  Matrix gram_inv;
  Vector response;
  std::size_t update_count = 0;

  [[nodiscard]] Eigen::Index dim() const { return gram.rows(); }
};

using RidgeStated = RidgeState<double>;

/// Number of rank-1 updates between full refactorizations of the inverse.
inline constexpr std::size_t kRefactorInterval = 256;

/// Residual threshold on ‖M·(M⁻¹x) − x‖∞ that triggers early refactorization.
inline constexpr double kInverseDriftTolerance = 1e-6;

template <typename Scalar>
RidgeState<Scalar> ridge_init(Eigen::Index dim, Scalar reg) {
  if (dim < 1) throw std::invalid_argument("ridge_init: dim must be >= 1");
  if (!(reg > Scalar(0)) || !std::isfinite(static_cast<double>(reg)))
    throw std::invalid_argument("ridge_init: regularizer must be positive");
  using S = RidgeState<Scalar>;
  S state;
  state.gram = S::Matrix::Identity(dim, dim) * reg;
  state.gram_inv = S::Matrix::Identity(dim, dim) / reg;
  state.response = S::Vector::Zero(dim);
  return state;
}

/// Recomputes gram_inv from gram by Cholesky factorization.
template <typename Scalar>
void ridge_refactorize(RidgeState<Scalar>& state) {
  using S = RidgeState<Scalar>;
  Eigen::LLT<typename S::Matrix> llt(state.gram);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("ridge_refactorize: Gram matrix is not positive definite");
  typename S::Matrix inv = llt.solve(S::Matrix::Identity(state.dim(), state.dim()));
  state.gram_inv = (inv + inv.transpose()) * Scalar(0.5);
}

/// M += scale·xxᵀ with a Sherman–Morrison update of the inverse. Only the Gram
/// side is touched; response updates go through ridge_add_response.
template <typename Scalar, typename Derived>
void ridge_rank1_update(RidgeState<Scalar>& state, const Eigen::MatrixBase<Derived>& x,
                        Scalar scale = Scalar(1)) {
  if (x.size() != state.dim())
    throw std::invalid_argument("ridge_rank1_update: dimension mismatch");
  if (!x.allFinite()) throw std::invalid_argument("ridge_rank1_update: non-finite vector");
  if (!(scale > Scalar(0))) throw std::invalid_argument("ridge_rank1_update: scale must be positive");

  using S = RidgeState<Scalar>;
  const typename S::Vector v = x;
  if (v.isZero(Scalar(0))) return;

  state.gram.noalias() += scale * v * v.transpose();
  const typename S::Vector inv_v = state.gram_inv * v;
  const Scalar denom = Scalar(1) + scale * v.dot(inv_v);
  state.gram_inv.noalias() -= (scale / denom) * inv_v * inv_v.transpose();
  ++state.update_count;

  bool refactor = state.update_count % kRefactorInterval == 0;
  if (!refactor) {
    const Scalar residual = (state.gram * (state.gram_inv * v) - v).cwiseAbs().maxCoeff();
    const Scalar ref = std::max(Scalar(1), v.cwiseAbs().maxCoeff());
    refactor = !(residual <= Scalar(kInverseDriftTolerance) * ref);
  }
  if (refactor) ridge_refactorize(state);
}

/// b += scale·x.
template <typename Scalar, typename Derived>
void ridge_add_response(RidgeState<Scalar>& state, const Eigen::MatrixBase<Derived>& x,
                        Scalar scale = Scalar(1)) {
  if (x.size() != state.dim())
    throw std::invalid_argument("ridge_add_response: dimension mismatch");
  if (!x.allFinite()) throw std::invalid_argument("ridge_add_response: non-finite vector");
  state.response.noalias() += scale * x;
}

/// Returns M⁻¹·rhs using the maintained inverse.
template <typename Scalar, typename Derived>
typename RidgeState<Scalar>::Vector ridge_solve(const RidgeState<Scalar>& state,
                                                const Eigen::MatrixBase<Derived>& rhs) {
  if (rhs.size() != state.dim()) throw std::invalid_argument("ridge_solve: dimension mismatch");
  return state.gram_inv * rhs;
}

/// xᵀM⁻¹x.
template <typename Scalar, typename Derived>
Scalar quad_form(const RidgeState<Scalar>& state, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != state.dim()) throw std::invalid_argument("quad_form: dimension mismatch");
  const Scalar q = x.dot(state.gram_inv * x);
  return q < Scalar(0) ? Scalar(0) : q;
}

/// max |M·M⁻¹ − I|, the drift of the maintained inverse.
template <typename Scalar>
Scalar inverse_drift(const RidgeState<Scalar>& state) {
  using S = RidgeState<Scalar>;
  return (state.gram * state.gram_inv - S::Matrix::Identity(state.dim(), state.dim()))
      .cwiseAbs()
      .maxCoeff();
}

}  // namespace relbandit
