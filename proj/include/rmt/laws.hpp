#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "rmt/moments.hpp"
#include "rmt/mp_core.hpp"

namespace rmt {

inline constexpr double kOrthonormalTolerance = 1e-8;
inline constexpr double kDefaultDelocalizationExponent = 0.2;

/// Rank-r signal S = U diag(d) V^T with orthonormal factors.
class SignalModel {
 public:
  /// Validates orthonormality, strictly descending strengths with the given gap and
  /// supercriticality for y = M/n. Throws InvalidInput or DomainError.
  SignalModel(std::vector<double> d, Eigen::MatrixXd U, Eigen::MatrixXd V,
              double margin = kEvaluationMargin, double min_gap = 0.0);

  std::size_t rank() const noexcept { return d_.size(); }
  Eigen::Index rows() const noexcept { return U_.rows(); }
  Eigen::Index cols() const noexcept { return V_.rows(); }
  const AspectRatio& aspect() const noexcept { return y_; }
  const std::vector<double>& strengths() const noexcept { return d_; }
  double strength(std::size_t i) const { return d_.at(i); }
  const Eigen::MatrixXd& U() const noexcept { return U_; }
  const Eigen::MatrixXd& V() const noexcept { return V_; }

  /// S = sum_i d_i u_i v_i^T.
  Eigen::MatrixXd signal() const;

 private:
  std::vector<double> d_;
  Eigen::MatrixXd U_;
  Eigen::MatrixXd V_;
  AspectRatio y_;
};

/// Limiting law of sqrt(n)(statistic - center) as  Delta + Z  where
///   Delta = mean_shift + sum_i linear_coeffs[i] * sqrt(n) u_i^T X v_i
/// and Z ~ N(0, gaussian_var) independent of Delta.
struct AsymptoticLaw {
  double center = 0.0;
  double mean_shift = 0.0;
  std::vector<double> linear_coeffs;
  double gaussian_var = 0.0;
  /// True when Delta may be replaced by its Gaussian limit (Gaussian noise, or one
  /// factor of every pair delocalized). Otherwise the law depends on realized X.
  bool delta_gaussian = true;

  /// Var of the linear part; the pairs (u_i, v_i) are orthonormal, so sum c_i^2.
  double linear_variance() const noexcept;
  double total_variance() const noexcept { return linear_variance() + gaussian_var; }
  double sd() const;
  /// Realized Delta given the standardized projections sqrt(n) u_i^T X v_i.
  double realized_delta(const std::vector<double>& projections) const;
};

enum class DeltaReduction { automatic, gaussian, general };

struct LawOptions {
  /// Vectors with |w|_inf < n^{-nu0} are treated as delocalized.
  double delocalization_exponent = kDefaultDelocalizationExponent;
  DeltaReduction reduction = DeltaReduction::automatic;
};

bool is_delocalized(const Eigen::Ref<const Eigen::VectorXd>& w, Eigen::Index n,
                    double exponent = kDefaultDelocalizationExponent);

/// Law of sqrt(n)(|<v, v_hat>|^2 - a(d)) for one pair (u, v); y = dim(u)/dim(v) and n = dim(v).
AsymptoticLaw vector_law(double d, const Eigen::Ref<const Eigen::VectorXd>& u,
                         const Eigen::Ref<const Eigen::VectorXd>& v, const CumulantSet& noise,
                         const LawOptions& options = {});

/// Vector law with every vector-dependent cumulant term dropped: N(0, 4 theta^2 + V_E).
/// Exact for Gaussian noise. Otherwise it needs delocalized u and v whose kappa3 mean
/// shift -(2 psi / d^2) kappa3 s_1(u) s_1(v) / n vanishes (e.g. u or v alternating);
/// sign-coherent vectors such as 1/sqrt(n) keep an O(1) shift.
AsymptoticLaw delocalized_vector_law(double d, const AspectRatio& y);

/// Law of the i-th right singular vector overlap (zero-based index).
AsymptoticLaw vector_law(const SignalModel& model, std::size_t index, const CumulantSet& noise,
                         const LawOptions& options = {});

/// Law of sqrt(n)(R - sum_i a(d_i)) with R = sum_{i,j} |<v_hat_i, v_j>|^2.
AsymptoticLaw subspace_law(const SignalModel& model, const CumulantSet& noise,
                           const LawOptions& options = {});

/// Law of sqrt(n)(|<u, u_hat>|^2 - a_left(d)) for the i-th left singular vector,
/// obtained from the transposed model Y^T / sqrt(y).
AsymptoticLaw left_law(const SignalModel& model, std::size_t index, const CumulantSet& noise,
                       const LawOptions& options = {});

/// Limit of |<u, u_hat>|^2: a(d / sqrt(y); 1 / y).
double a_left(double d, const AspectRatio& y);

// Closed forms for the y = 1/2 reference designs with Two-Point cumulants:
// Gaussian (u = e1, v = f1), delocalized u and v, delocalized u with v = f1,
// and u = e1, v = f1.
double special_sigma_g(double d);
double special_sigma_t(double d);
double special_sigma_s(double d);
double special_shift_dt(double d);

/// Normalizers for the rank-r subspace statistic with u_1 = 1/sqrt(M), u_2 alternating
/// and V_0 = (f_1, ..., f_r): Gaussian noise and Two-Point noise.
double special_sigma_t1g(const std::vector<double>& d, const AspectRatio& y);
double special_sigma_t1t(const std::vector<double>& d, const AspectRatio& y);

}  // namespace rmt
