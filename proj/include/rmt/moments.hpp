#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Core>

namespace rmt {

inline constexpr double kUnitNormTolerance = 1e-10;
inline constexpr std::size_t kMinCumulantSamples = 10;

/// An l2-normalized vector. Construction checks the norm.
class UnitVector {
 public:
  explicit UnitVector(Eigen::VectorXd entries, double tol = kUnitNormTolerance);

  /// Rescales a nonzero vector to unit length.
  static UnitVector normalized(Eigen::VectorXd entries);

  const Eigen::VectorXd& entries() const noexcept { return w_; }
  Eigen::Index dim() const noexcept { return w_.size(); }
  double operator[](Eigen::Index i) const { return w_[i]; }
  double sup_norm() const noexcept { return w_.cwiseAbs().maxCoeff(); }

 private:
  Eigen::VectorXd w_;
};

/// Cumulants of the standardized noise entry sqrt(n) x_ij.
struct CumulantSet {
  double kappa2 = 1.0;
  double kappa3 = 0.0;
  double kappa4 = 0.0;

  static CumulantSet gaussian() noexcept { return {1.0, 0.0, 0.0}; }
  /// (1/3) delta_{sqrt 2} + (2/3) delta_{-1/sqrt 2}.
  static CumulantSet two_point() noexcept;

  /// E X^4 >= (E X^2)^2 forces kappa4 >= -2 kappa2^2.
  bool kappa4_feasible() const noexcept { return kappa4 >= -2.0 * kappa2 * kappa2; }
  bool is_gaussian(double tol = 1e-12) const noexcept;
};

/// s_l(w) = sum_i w(i)^l.
double s_l(const Eigen::Ref<const Eigen::VectorXd>& w, int l);
inline double s_l(const UnitVector& w, int l) { return s_l(w.entries(), l); }

/// s_{k,l}(w1, w2) = sum_i w1(i)^k w2(i)^l. Throws InvalidInput on a dimension mismatch.
double s_kl(const Eigen::Ref<const Eigen::VectorXd>& w1, const Eigen::Ref<const Eigen::VectorXd>& w2,
            int k, int l);

/// Unbiased k-statistics (k2, k3, k4) of i.i.d. draws.
/// Throws InvalidInput for fewer than kMinCumulantSamples draws and DegenerateSample
/// for zero sample variance. Sums use a fixed pairwise tree, so results do not
/// depend on how the caller produced the buffer.
CumulantSet sample_cumulants(std::span<const double> samples);

/// Population cumulants of a finite atomic law (weights need not be normalized).
CumulantSet distribution_cumulants(std::span<const double> atoms, std::span<const double> weights);

/// Cumulants of sqrt(n) * (Y - S_hat) entries, n = number of columns.
CumulantSet residual_cumulants(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& S_hat);

/// Fixed-order pairwise summation of f(0..count-1).
template <class F>
double pairwise_sum(std::size_t begin, std::size_t end, const F& f) {
  constexpr std::size_t kLeaf = 64;
  if (end - begin <= kLeaf) {
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += f(i);
    return acc;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  return pairwise_sum(begin, mid, f) + pairwise_sum(mid, end, f);
}

}  // namespace rmt
