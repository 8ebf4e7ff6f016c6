#pragma once

// Marchenko-Pastur spectral functionals for the signal-plus-noise model
// Y = S + X with X of size M x n, entries of variance 1/n, and y = M/n.
//
// Everything here is evaluated on the real axis to the right of the bulk,
// z > lambda_plus, which is where the outlier locations p(d) live.

namespace rmt {

inline constexpr double kDefaultAspectTolerance = 0.05;
inline constexpr double kEdgeGuard = 1e-9;
inline constexpr double kEvaluationMargin = 1e-6;
inline constexpr double kInferenceMargin = 0.05;

/// Aspect ratio y = M/n with its Marchenko-Pastur edges.
class AspectRatio {
 public:
  /// Throws DomainError unless y lies in [tau, 1/tau].
  explicit AspectRatio(double y, double tau = kDefaultAspectTolerance);

  static AspectRatio from_dims(long rows, long cols, double tau = kDefaultAspectTolerance);

  double value() const noexcept { return y_; }
  double lambda_plus() const noexcept;
  double lambda_minus() const noexcept;
  /// BBP threshold y^{1/4}.
  double critical_strength() const noexcept;

 private:
  double y_;
};

/// A supercritical signal singular value d > y^{1/4} + margin.
class SignalStrength {
 public:
  /// Throws DomainError when d is not supercritical for `y`.
  SignalStrength(double d, const AspectRatio& y, double margin = kEvaluationMargin);

  double value() const noexcept { return d_; }

 private:
  double d_;
};

bool is_supercritical(double d, const AspectRatio& y, double margin = kEvaluationMargin) noexcept;

// Stieltjes transforms of the limiting spectral laws of XX* (m1) and X*X (m2),
// evaluated at real z > lambda_plus + kEdgeGuard. Throw DomainError otherwise.
double m1(double z, const AspectRatio& y);
double m2(double z, const AspectRatio& y);
double m1_prime(double z, const AspectRatio& y);
double m2_prime(double z, const AspectRatio& y);

/// T(t) = t m1(t) m2(t) and its derivative.
double calT(double t, const AspectRatio& y);
double calT_prime(double t, const AspectRatio& y);

/// Outlier location (d^2+1)(d^2+y)/d^2 of the squared singular value.
double p(double d, const AspectRatio& y);

// Extended-precision overloads. Near the edge the transforms are ill-conditioned
// in z (their derivatives grow like (z - lambda_plus)^{-1/2}), so merely rounding
// z = p(d) to double costs digits there; composing these overloads keeps them.
long double m1(long double z, const AspectRatio& y);
long double m2(long double z, const AspectRatio& y);
long double m1_prime(long double z, const AspectRatio& y);
long double m2_prime(long double z, const AspectRatio& y);
long double calT(long double t, const AspectRatio& y);
long double calT_prime(long double t, const AspectRatio& y);
long double p(long double d, const AspectRatio& y);

/// Supercritical preimage of p. Throws DomainError when x <= lambda_plus.
double p_inv(double x, const AspectRatio& y);

/// Limit of |<v, v_hat>|^2 for a right singular vector.
double a(double d, const AspectRatio& y);
double theta(double d, const AspectRatio& y);
double psi(double d, const AspectRatio& y);

/// Variance contribution of the Gaussian part under Gaussian noise.
/// Throws DomainError when d^4 <= y.
double v_E(double d, const AspectRatio& y);

}  // namespace rmt
