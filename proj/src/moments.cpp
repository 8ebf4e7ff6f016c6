#include "rmt/moments.hpp"

#include <cmath>
#include <sstream>

#include "rmt/error.hpp"

namespace rmt {

UnitVector::UnitVector(Eigen::VectorXd entries, double tol) : w_(std::move(entries)) {
  if (w_.size() == 0) throw InvalidInput("unit vector must be non-empty");
  if (!w_.allFinite()) throw InvalidInput("unit vector has non-finite entries");
  const double norm = w_.norm();
  if (std::abs(norm - 1.0) > tol) {
    std::ostringstream msg;
    msg << "vector is not l2-normalized: |w| = " << norm;
    throw InvalidInput(msg.str());
  }
}

UnitVector UnitVector::normalized(Eigen::VectorXd entries) {
  const double norm = entries.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw InvalidInput("cannot normalize a zero vector");
  entries /= norm;
  return UnitVector(std::move(entries));
}

CumulantSet CumulantSet::two_point() noexcept { return {1.0, 1.0 / std::sqrt(2.0), -1.5}; }

bool CumulantSet::is_gaussian(double tol) const noexcept {
  return std::abs(kappa3) <= tol && std::abs(kappa4) <= tol;
}

double s_l(const Eigen::Ref<const Eigen::VectorXd>& w, int l) {
  if (l < 1) throw InvalidInput("s_l requires l >= 1");
  return pairwise_sum(0, static_cast<std::size_t>(w.size()),
                      [&](std::size_t i) { return std::pow(w[static_cast<Eigen::Index>(i)], l); });
}

double s_kl(const Eigen::Ref<const Eigen::VectorXd>& w1, const Eigen::Ref<const Eigen::VectorXd>& w2,
            int k, int l) {
  if (w1.size() != w2.size()) {
    std::ostringstream msg;
    msg << "s_kl: dimension mismatch (" << w1.size() << " vs " << w2.size() << ")";
    throw InvalidInput(msg.str());
  }
  if (k < 0 || l < 0) throw InvalidInput("s_kl requires non-negative powers");
  return pairwise_sum(0, static_cast<std::size_t>(w1.size()), [&](std::size_t i) {
    const auto j = static_cast<Eigen::Index>(i);
    return std::pow(w1[j], k) * std::pow(w2[j], l);
  });
}

CumulantSet sample_cumulants(std::span<const double> samples) {
  const std::size_t count = samples.size();
  if (count < kMinCumulantSamples) {
    std::ostringstream msg;
    msg << "sample_cumulants needs at least " << kMinCumulantSamples << " samples, got " << count;
    throw InvalidInput(msg.str());
  }
  const double n = static_cast<double>(count);
  const double mean = pairwise_sum(0, count, [&](std::size_t i) { return samples[i]; }) / n;
  const double m2 = pairwise_sum(0, count, [&](std::size_t i) {
                      const double c = samples[i] - mean;
                      return c * c;
                    }) / n;
  const double scale = pairwise_sum(0, count, [&](std::size_t i) { return std::abs(samples[i]); }) / n;
  if (!(m2 > 1e-24 * std::max(1.0, scale * scale))) {
    throw DegenerateSample("sample has zero variance; cumulants are undefined");
  }
  const double m3 = pairwise_sum(0, count, [&](std::size_t i) {
                      const double c = samples[i] - mean;
                      return c * c * c;
                    }) / n;
  const double m4 = pairwise_sum(0, count, [&](std::size_t i) {
                      const double c = samples[i] - mean;
                      const double c2 = c * c;
                      return c2 * c2;
                    }) / n;
  CumulantSet out;
  out.kappa2 = n / (n - 1.0) * m2;
  out.kappa3 = n * n / ((n - 1.0) * (n - 2.0)) * m3;
  out.kappa4 = n * n * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2) / ((n - 1.0) * (n - 2.0) * (n - 3.0));
  return out;
}

CumulantSet distribution_cumulants(std::span<const double> atoms, std::span<const double> weights) {
  if (atoms.empty() || atoms.size() != weights.size()) {
    throw InvalidInput("atoms and weights must be non-empty and of equal length");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidInput("atom weights must be non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw InvalidInput("atom weights sum to zero");
  double mean = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) mean += weights[i] / total * atoms[i];
  double mu2 = 0.0, mu3 = 0.0, mu4 = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double c = atoms[i] - mean;
    const double w = weights[i] / total;
    mu2 += w * c * c;
    mu3 += w * c * c * c;
    mu4 += w * c * c * c * c;
  }
  if (!(mu2 > 0.0)) throw DegenerateSample("atomic law has zero variance");
  return {mu2, mu3, mu4 - 3.0 * mu2 * mu2};
}

CumulantSet residual_cumulants(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& S_hat) {
  if (Y.rows() != S_hat.rows() || Y.cols() != S_hat.cols()) {
    std::ostringstream msg;
    msg << "residual_cumulants: shape mismatch " << Y.rows() << "x" << Y.cols() << " vs "
        << S_hat.rows() << "x" << S_hat.cols();
    throw InvalidInput(msg.str());
  }
  const double root_n = std::sqrt(static_cast<double>(Y.cols()));
  const Eigen::MatrixXd residual = (Y - S_hat) * root_n;
  return sample_cumulants(std::span<const double>(residual.data(), static_cast<std::size_t>(residual.size())));
}

}  // namespace rmt
