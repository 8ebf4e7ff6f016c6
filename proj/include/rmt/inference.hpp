#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rmt/laws.hpp"
#include "rmt/linalg.hpp"
#include "rmt/moments.hpp"

namespace rmt {

/// Outlier gate: tests refuse to run unless mu_i > (1 + kOutlierBuffer) lambda_plus.
inline constexpr double kOutlierBuffer = 0.02;

/// Y = S + X together with whatever nuisance parameters are known.
struct Observation {
  Eigen::MatrixXd Y;
  std::optional<Eigen::MatrixXd> known_U;
  std::optional<std::vector<double>> known_D;
  std::optional<CumulantSet> noise;

  /// Aspect ratio of Y; throws DomainError when outside the supported range.
  AspectRatio aspect() const { return AspectRatio::from_dims(Y.rows(), Y.cols()); }
};

enum class Provenance { given, estimated };
std::string to_string(Provenance p);

/// Where the nuisance parameters of a test came from, and their values.
struct NuisanceRecord {
  Provenance strengths = Provenance::given;
  Provenance cumulants = Provenance::given;
  std::vector<double> d;
  CumulantSet noise;
};

enum class SubspaceVariant { S1, S1d };
std::string to_string(SubspaceVariant v);

struct TestOutcome {
  std::string test;  // "S0", "S1" or "S1d"
  double statistic = 0.0;
  double z = 0.0;
  double p_value = 1.0;
  bool reject = false;
  double alpha = 0.05;
  AsymptoticLaw law;
  NuisanceRecord nuisance;
};

/// d_hat_i = p_inv(mu_i) for the leading r squared singular values.
/// Throws NoOutlierError naming the first index with mu_i <= lambda_plus.
std::vector<double> estimate_strengths(const Eigen::Ref<const Eigen::VectorXd>& mu, const AspectRatio& y,
                                       std::size_t r);
std::vector<double> estimate_strengths(const Eigen::MatrixXd& Y, std::size_t r);

/// Test of H0: v_i = v0 (zero-based i) with S0 = sqrt(n)(|<v_hat_i, v0>|^2 - a(d_i)).
/// Requires obs.known_U. Missing strengths or cumulants are estimated from Y.
/// Throws RegimeError when the null law is not Gaussian (localized u_i and v0
/// with non-Gaussian noise) or when the outlier gate fails.
TestOutcome test_vector(const Observation& obs, std::size_t i, const UnitVector& v0, double alpha,
                        const LawOptions& options = {});
/// As above, reusing a precomputed leading spectrum of obs.Y (at least i+1 triplets,
/// and r triplets when strengths must be estimated).
TestOutcome test_vector(const Observation& obs, const ThinSvd& spectrum, std::size_t i, const UnitVector& v0,
                        double alpha, const LawOptions& options = {});

/// Test of H0: V = V0. S1 sums |<v_hat_i, v0_j>|^2 over all i, j; S1d only over i = j.
TestOutcome test_subspace(const Observation& obs, const Eigen::MatrixXd& V0, double alpha, SubspaceVariant variant,
                          const LawOptions& options = {});
TestOutcome test_subspace(const Observation& obs, const ThinSvd& spectrum, const Eigen::MatrixXd& V0, double alpha,
                          SubspaceVariant variant, const LawOptions& options = {});

/// Fills statistic/z/p/reject from a law; shared by the tests and the simulator.
TestOutcome decide(std::string test, double statistic, AsymptoticLaw law, double alpha);

}  // namespace rmt
