#pragma once

#include <optional>

#include <Eigen/Core>

namespace rmt {

/// Y = U diag(s) V^T with s descending; thin factors.
struct ThinSvd {
  Eigen::VectorXd singular_values;
  Eigen::MatrixXd U;
  Eigen::MatrixXd V;

  /// Squared singular values mu_i.
  Eigen::VectorXd mu() const { return singular_values.array().square(); }
};

/// Dense thin SVD. Throws InvalidInput on non-finite entries.
/// When `reference_V` is given, column i of V (and U) is flipped so that
/// <v_i, reference_i> >= 0 for every reference column.
ThinSvd svd_decompose(const Eigen::MatrixXd& Y, const std::optional<Eigen::MatrixXd>& reference_V = std::nullopt);

/// Flips column pairs (u_i, v_i) so that <v_i, reference_i> >= 0.
void align_signs(ThinSvd& svd, const Eigen::MatrixXd& reference_V);

struct LanczosOptions {
  /// Residual tolerance relative to the largest singular value.
  double tolerance = 1e-12;
  int max_steps = 300;
};

/// Leading `rank` singular triplets by Golub-Kahan-Lanczos bidiagonalization
/// with full reorthogonalization. Intended for spiked matrices whose leading
/// singular values are separated from the bulk.
/// Returns std::nullopt if the residuals did not reach the tolerance or the
/// recurrence broke down before `rank` triplets were resolved; callers then
/// fall back to svd_decompose.
std::optional<ThinSvd> leading_singular_triplets(const Eigen::MatrixXd& Y, int rank,
                                                 const Eigen::VectorXd& start,
                                                 const LanczosOptions& options = {});

}  // namespace rmt
