#include "rmt/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "rmt/error.hpp"

namespace rmt {

void align_signs(ThinSvd& svd, const Eigen::MatrixXd& reference_V) {
  if (reference_V.rows() != svd.V.rows()) throw InvalidInput("align_signs: reference has the wrong dimension");
  const Eigen::Index k = std::min(reference_V.cols(), svd.V.cols());
  for (Eigen::Index i = 0; i < k; ++i) {
    if (svd.V.col(i).dot(reference_V.col(i)) < 0.0) {
      svd.V.col(i) *= -1.0;
      svd.U.col(i) *= -1.0;
    }
  }
}

ThinSvd svd_decompose(const Eigen::MatrixXd& Y, const std::optional<Eigen::MatrixXd>& reference_V) {
  if (Y.size() == 0) throw InvalidInput("svd_decompose: empty matrix");
  if (!Y.allFinite()) throw InvalidInput("svd_decompose: matrix has non-finite entries");
  Eigen::BDCSVD<Eigen::MatrixXd> solver(Y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  ThinSvd out{solver.singularValues(), solver.matrixU(), solver.matrixV()};
  if (reference_V) align_signs(out, *reference_V);
  return out;
}

namespace {

// One pass of classical Gram-Schmidt is not enough once the basis loses
// orthogonality; two passes ("twice is enough") keep it at machine precision.
void reorthogonalize(Eigen::Ref<Eigen::VectorXd> x, const Eigen::MatrixXd& basis, Eigen::Index used) {
  if (used == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    const auto Q = basis.leftCols(used);
    x.noalias() -= Q * (Q.transpose() * x);
  }
}

}  // namespace

std::optional<ThinSvd> leading_singular_triplets(const Eigen::MatrixXd& Y, int rank, const Eigen::VectorXd& start,
                                                 const LanczosOptions& options) {
  const Eigen::Index M = Y.rows();
  const Eigen::Index n = Y.cols();
  if (rank <= 0 || rank > std::min(M, n)) throw InvalidInput("leading_singular_triplets: rank out of range");
  if (start.size() != n) throw InvalidInput("leading_singular_triplets: start vector has the wrong dimension");

  const Eigen::Index max_steps = std::min<Eigen::Index>({options.max_steps, M, n});
  Eigen::MatrixXd Ub(M, max_steps);
  Eigen::MatrixXd Vb(n, max_steps + 1);
  Eigen::VectorXd alpha(max_steps), beta(max_steps);

  const double start_norm = start.norm();
  if (!(start_norm > 0.0)) return std::nullopt;
  Vb.col(0) = start / start_norm;

  Eigen::VectorXd p(M), q(n);
  double scale = 0.0;  // running estimate of ||Y||, for relative thresholds
  const Eigen::Index check_from = std::min<Eigen::Index>(max_steps, rank + 2);

  for (Eigen::Index k = 0; k < max_steps; ++k) {
    p.noalias() = Y * Vb.col(k);
    if (k > 0) p -= beta(k - 1) * Ub.col(k - 1);
    reorthogonalize(p, Ub, k);
    alpha(k) = p.norm();
    scale = std::max(scale, alpha(k));
    if (alpha(k) <= 1e-14 * scale) return std::nullopt;
    Ub.col(k) = p / alpha(k);

    q.noalias() = Y.transpose() * Ub.col(k);
    q -= alpha(k) * Vb.col(k);
    reorthogonalize(q, Vb, k + 1);
    beta(k) = q.norm();
    const Eigen::Index steps = k + 1;
    const bool invariant = beta(k) <= 1e-14 * scale;
    if (!invariant) Vb.col(k + 1) = q / beta(k);

    if (steps < check_from && !invariant) continue;

    // B = upper bidiagonal(alpha, beta); Y V_k = U_k B and
    // Y^T U_k = V_k B^T + beta_k v_{k+1} e_k^T, so the residual of Ritz
    // triplet i is beta_k |P(k-1, i)|.
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(steps, steps);
    B.diagonal() = alpha.head(steps);
    if (steps > 1) B.diagonal(1) = beta.head(steps - 1);
    Eigen::JacobiSVD<Eigen::MatrixXd> small(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = small.singularValues();
    const Eigen::Index wanted = std::min<Eigen::Index>(rank, steps);
    bool converged = wanted == rank;
    for (Eigen::Index i = 0; i < wanted && converged; ++i) {
      const double residual = invariant ? 0.0 : beta(k) * std::abs(small.matrixU()(steps - 1, i));
      converged = residual <= options.tolerance * sv(0);
    }
    if (converged) {
      ThinSvd out;
      out.singular_values = sv.head(rank);
      out.U = Ub.leftCols(steps) * small.matrixU().leftCols(rank);
      out.V = Vb.leftCols(steps) * small.matrixV().leftCols(rank);
      return out;
    }
    // An invariant subspace that does not hold all wanted triplets: the start
    // vector missed part of the dominant space.
    if (invariant) return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace rmt
