#include "rmt/inference.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "rmt/error.hpp"
#include "rmt/normal.hpp"

namespace rmt {

std::string to_string(Provenance p) { return p == Provenance::given ? "given" : "estimated"; }

std::string to_string(SubspaceVariant v) { return v == SubspaceVariant::S1 ? "S1" : "S1d"; }

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    std::ostringstream msg;
    msg << "alpha must lie in (0, 1], got " << alpha;
    throw InvalidInput(msg.str());
  }
}

const Eigen::MatrixXd& require_U(const Observation& obs) {
  if (!obs.known_U) throw InvalidInput("the left singular vectors U must be supplied");
  const auto& U = *obs.known_U;
  if (U.rows() != obs.Y.rows() || U.cols() == 0) {
    std::ostringstream msg;
    msg << "U is " << U.rows() << "x" << U.cols() << " but Y has " << obs.Y.rows() << " rows";
    throw InvalidInput(msg.str());
  }
  return U;
}

void outlier_gate(const ThinSvd& spectrum, const AspectRatio& y, std::size_t count) {
  if (static_cast<std::size_t>(spectrum.singular_values.size()) < count) {
    throw InvalidInput("spectrum holds fewer singular values than the test needs");
  }
  const double edge = (1.0 + kOutlierBuffer) * y.lambda_plus();
  for (std::size_t i = 0; i < count; ++i) {
    const double mu = spectrum.singular_values(static_cast<Eigen::Index>(i));
    if (!(mu * mu > edge)) {
      std::ostringstream msg;
      msg << "component " << i << ": squared singular value " << mu * mu << " is not above "
          << edge << " (lambda_plus + 2%); the outlier laws do not apply";
      throw NoOutlierError(i, msg.str());
    }
  }
}

/// Strengths and cumulants in force for a test, with provenance.
/// `V_null` supplies the right factor of S_hat when cumulants are estimated.
NuisanceRecord resolve_nuisance(const Observation& obs, const ThinSvd& spectrum, const AspectRatio& y,
                                const Eigen::MatrixXd& U, const Eigen::MatrixXd& V_null) {
  const auto r = static_cast<std::size_t>(U.cols());
  NuisanceRecord out;
  if (obs.known_D) {
    if (obs.known_D->size() != r) {
      std::ostringstream msg;
      msg << obs.known_D->size() << " strengths supplied for rank " << r;
      throw InvalidInput(msg.str());
    }
    out.d = *obs.known_D;
    for (std::size_t i = 0; i < r; ++i) {
      if (!is_supercritical(out.d[i], y, kInferenceMargin)) {
        std::ostringstream msg;
        msg << "d[" << i << "]=" << out.d[i] << " is not supercritical (needs d > y^{1/4} + "
            << kInferenceMargin << ")";
        throw DomainError(msg.str());
      }
    }
  } else {
    out.strengths = Provenance::estimated;
    out.d = estimate_strengths(spectrum.mu().head(static_cast<Eigen::Index>(r)), y, r);
    for (std::size_t i = 0; i < r; ++i) {
      if (!is_supercritical(out.d[i], y, kInferenceMargin)) {
        std::ostringstream msg;
        msg << "estimated d[" << i << "]=" << out.d[i] << " is too close to the critical value "
            << y.critical_strength();
        throw NoOutlierError(i, msg.str());
      }
    }
  }
  if (obs.noise) {
    out.noise = *obs.noise;
  } else {
    out.cumulants = Provenance::estimated;
    const Eigen::VectorXd dv = Eigen::Map<const Eigen::VectorXd>(out.d.data(), static_cast<Eigen::Index>(r));
    out.noise = residual_cumulants(obs.Y, U * dv.asDiagonal() * V_null.transpose());
  }
  return out;
}

}  // namespace

std::vector<double> estimate_strengths(const Eigen::Ref<const Eigen::VectorXd>& mu, const AspectRatio& y,
                                       std::size_t r) {
  if (static_cast<std::size_t>(mu.size()) < r) {
    throw InvalidInput("estimate_strengths: fewer eigenvalues than the requested rank");
  }
  std::vector<double> d(r);
  for (std::size_t i = 0; i < r; ++i) {
    const double m = mu(static_cast<Eigen::Index>(i));
    if (!(m > y.lambda_plus())) {
      std::ostringstream msg;
      msg << "no outlier at index " << i << ": mu=" << m << " <= lambda_plus=" << y.lambda_plus();
      throw NoOutlierError(i, msg.str());
    }
    d[i] = p_inv(m, y);
  }
  return d;
}

std::vector<double> estimate_strengths(const Eigen::MatrixXd& Y, std::size_t r) {
  const AspectRatio y = AspectRatio::from_dims(Y.rows(), Y.cols());
  return estimate_strengths(svd_decompose(Y).mu(), y, r);
}

TestOutcome decide(std::string test, double statistic, AsymptoticLaw law, double alpha) {
  check_alpha(alpha);
  TestOutcome out;
  out.test = std::move(test);
  out.statistic = statistic;
  out.z = (statistic - law.mean_shift) / law.sd();
  out.p_value = two_sided_p_value(out.z);
  out.reject = out.p_value < alpha;
  out.alpha = alpha;
  out.law = std::move(law);
  return out;
}

TestOutcome test_vector(const Observation& obs, std::size_t i, const UnitVector& v0, double alpha,
                        const LawOptions& options) {
  require_U(obs);
  return test_vector(obs, svd_decompose(obs.Y), i, v0, alpha, options);
}

TestOutcome test_vector(const Observation& obs, const ThinSvd& spectrum, std::size_t i, const UnitVector& v0,
                        double alpha, const LawOptions& options) {
  check_alpha(alpha);
  const AspectRatio y = obs.aspect();
  const auto& U = require_U(obs);
  const auto r = static_cast<std::size_t>(U.cols());
  if (i >= r) {
    std::ostringstream msg;
    msg << "component " << i << " out of range for rank " << r;
    throw InvalidInput(msg.str());
  }
  if (v0.dim() != obs.Y.cols()) throw InvalidInput("v0 dimension does not match the columns of Y");
  const bool needs_all = !obs.known_D || !obs.noise;
  outlier_gate(spectrum, y, needs_all ? r : i + 1);

  const auto ci = static_cast<Eigen::Index>(i);
  Eigen::MatrixXd V_null;
  if (!obs.noise) {
    V_null = spectrum.V.leftCols(static_cast<Eigen::Index>(r));
    V_null.col(ci) = v0.entries();
  }
  NuisanceRecord nuisance = resolve_nuisance(obs, spectrum, y, U, V_null);

  AsymptoticLaw law = vector_law(nuisance.d[i], U.col(ci), v0.entries(), nuisance.noise, options);
  if (!law.delta_gaussian) {
    throw RegimeError(
        "the null law is not Gaussian: u_i and v0 are both localized and the noise is non-Gaussian");
  }
  const double overlap = spectrum.V.col(ci).dot(v0.entries());
  const double statistic = std::sqrt(static_cast<double>(obs.Y.cols())) * (overlap * overlap - law.center);
  TestOutcome out = decide("S0", statistic, std::move(law), alpha);
  out.nuisance = std::move(nuisance);
  return out;
}

TestOutcome test_subspace(const Observation& obs, const Eigen::MatrixXd& V0, double alpha, SubspaceVariant variant,
                          const LawOptions& options) {
  require_U(obs);
  return test_subspace(obs, svd_decompose(obs.Y), V0, alpha, variant, options);
}

TestOutcome test_subspace(const Observation& obs, const ThinSvd& spectrum, const Eigen::MatrixXd& V0, double alpha,
                          SubspaceVariant variant, const LawOptions& options) {
  check_alpha(alpha);
  const AspectRatio y = obs.aspect();
  const auto& U = require_U(obs);
  const auto r = static_cast<std::size_t>(U.cols());
  if (V0.rows() != obs.Y.cols() || static_cast<std::size_t>(V0.cols()) != r) {
    std::ostringstream msg;
    msg << "V0 is " << V0.rows() << "x" << V0.cols() << "; expected " << obs.Y.cols() << "x" << r;
    throw InvalidInput(msg.str());
  }
  outlier_gate(spectrum, y, r);
  NuisanceRecord nuisance = resolve_nuisance(obs, spectrum, y, U, V0);

  const SignalModel null_model(nuisance.d, U, V0, kInferenceMargin);
  AsymptoticLaw law = subspace_law(null_model, nuisance.noise, options);
  if (!law.delta_gaussian) {
    throw RegimeError("the null law is not Gaussian: some (u_i, v0_i) pair is localized on both sides "
                      "and the noise is non-Gaussian");
  }
  const Eigen::MatrixXd overlaps = spectrum.V.leftCols(static_cast<Eigen::Index>(r)).transpose() * V0;
  const double total =
      variant == SubspaceVariant::S1 ? overlaps.squaredNorm() : overlaps.diagonal().squaredNorm();
  const double statistic = std::sqrt(static_cast<double>(obs.Y.cols())) * (total - law.center);
  TestOutcome out = decide(to_string(variant), statistic, std::move(law), alpha);
  out.nuisance = std::move(nuisance);
  return out;
}

}  // namespace rmt
