#include "rmt/laws.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "rmt/error.hpp"

namespace rmt {

namespace {

double sq(double x) { return x * x; }

const AspectRatio& half_aspect() {
  static const AspectRatio y(0.5);
  return y;
}

void require_supercritical_half(double d, const char* what) {
  if (!is_supercritical(d, half_aspect())) {
    std::ostringstream msg;
    msg << what << ": d=" << d << " is not supercritical at y=0.5";
    throw DomainError(msg.str());
  }
}

void check_orthonormal(const Eigen::MatrixXd& F, const char* name) {
  const Eigen::MatrixXd gram = F.transpose() * F;
  const double err = (gram - Eigen::MatrixXd::Identity(F.cols(), F.cols())).cwiseAbs().maxCoeff();
  if (!(err <= kOrthonormalTolerance)) {
    std::ostringstream msg;
    msg << name << " does not have orthonormal columns (max |F^T F - I| = " << err << ")";
    throw InvalidInput(msg.str());
  }
}

void check_gaussian_var(double var, const char* what) {
  if (!std::isfinite(var) || var < 0.0) {
    std::ostringstream msg;
    msg << what << ": limiting Gaussian variance is " << var
        << "; this cumulant/vector combination is outside the validated regime";
    throw RegimeError(msg.str());
  }
}

bool delta_is_gaussian(const CumulantSet& noise, const Eigen::Ref<const Eigen::VectorXd>& u,
                       const Eigen::Ref<const Eigen::VectorXd>& v, Eigen::Index n,
                       const LawOptions& options) {
  switch (options.reduction) {
    case DeltaReduction::gaussian:
      return true;
    case DeltaReduction::general:
      return noise.is_gaussian();
    case DeltaReduction::automatic:
      break;
  }
  return noise.is_gaussian() || is_delocalized(u, n, options.delocalization_exponent) ||
         is_delocalized(v, n, options.delocalization_exponent);
}

}  // namespace

SignalModel::SignalModel(std::vector<double> d, Eigen::MatrixXd U, Eigen::MatrixXd V,
                         double margin, double min_gap)
    : d_(std::move(d)),
      U_(std::move(U)),
      V_(std::move(V)),
      y_(AspectRatio::from_dims(U_.rows(), V_.rows())) {
  if (d_.empty()) throw InvalidInput("signal model needs rank >= 1");
  if (U_.cols() != static_cast<Eigen::Index>(d_.size()) ||
      V_.cols() != static_cast<Eigen::Index>(d_.size())) {
    std::ostringstream msg;
    msg << "rank mismatch: " << d_.size() << " strengths, U has " << U_.cols() << " columns, V has "
        << V_.cols();
    throw InvalidInput(msg.str());
  }
  check_orthonormal(U_, "U");
  check_orthonormal(V_, "V");
  for (std::size_t i = 0; i < d_.size(); ++i) {
    SignalStrength(d_[i], y_, margin);
    if (i > 0 && !(d_[i - 1] - d_[i] > min_gap && d_[i - 1] > d_[i])) {
      std::ostringstream msg;
      msg << "signal strengths must be strictly descending with gap > " << min_gap << " (d["
          << i - 1 << "]=" << d_[i - 1] << ", d[" << i << "]=" << d_[i] << ")";
      throw InvalidInput(msg.str());
    }
  }
}

Eigen::MatrixXd SignalModel::signal() const {
  const Eigen::VectorXd dv = Eigen::Map<const Eigen::VectorXd>(d_.data(), static_cast<Eigen::Index>(d_.size()));
  return U_ * dv.asDiagonal() * V_.transpose();
}

double AsymptoticLaw::linear_variance() const noexcept {
  return std::accumulate(linear_coeffs.begin(), linear_coeffs.end(), 0.0,
                         [](double acc, double c) { return acc + c * c; });
}

double AsymptoticLaw::sd() const {
  const double var = total_variance();
  if (!(var > 0.0)) throw RegimeError("asymptotic law has non-positive total variance");
  return std::sqrt(var);
}

double AsymptoticLaw::realized_delta(const std::vector<double>& projections) const {
  if (projections.size() != linear_coeffs.size()) {
    throw InvalidInput("realized_delta: one projection per linear coefficient is required");
  }
  double out = mean_shift;
  for (std::size_t i = 0; i < projections.size(); ++i) out += linear_coeffs[i] * projections[i];
  return out;
}

bool is_delocalized(const Eigen::Ref<const Eigen::VectorXd>& w, Eigen::Index n, double exponent) {
  return w.cwiseAbs().maxCoeff() < std::pow(static_cast<double>(n), -exponent);
}

AsymptoticLaw vector_law(double d, const Eigen::Ref<const Eigen::VectorXd>& u,
                         const Eigen::Ref<const Eigen::VectorXd>& v, const CumulantSet& noise,
                         const LawOptions& options) {
  const AspectRatio y = AspectRatio::from_dims(u.size(), v.size());
  SignalStrength(d, y);
  const double n = static_cast<double>(v.size());
  const double root_n = std::sqrt(n);
  const double th = theta(d, y);
  const double ps = psi(d, y);
  const double k3 = noise.kappa3;
  const double k4 = noise.kappa4;

  AsymptoticLaw law;
  law.center = a(d, y);
  law.linear_coeffs = {2.0 * th};
  law.mean_shift = -(2.0 * ps / (d * d)) * (k3 / n) * s_l(u, 1) * s_l(v, 1);
  law.gaussian_var = v_E(d, y) - 4.0 / d * th * ps * (k3 / root_n) * s_l(u, 3) * s_l(v, 1) +
                     4.0 / d * th * th * (k3 / root_n) * s_l(u, 1) * s_l(v, 3) +
                     ps * ps / (d * d) * k4 * s_l(u, 4) + y.value() * th * th / (d * d) * k4 * s_l(v, 4);
  law.delta_gaussian = delta_is_gaussian(noise, u, v, v.size(), options);
  check_gaussian_var(law.gaussian_var, "vector_law");
  return law;
}

AsymptoticLaw delocalized_vector_law(double d, const AspectRatio& y) {
  SignalStrength(d, y);
  AsymptoticLaw law;
  law.center = a(d, y);
  law.linear_coeffs = {2.0 * theta(d, y)};
  law.gaussian_var = v_E(d, y);
  return law;
}

AsymptoticLaw vector_law(const SignalModel& model, std::size_t index, const CumulantSet& noise,
                         const LawOptions& options) {
  if (index >= model.rank()) {
    std::ostringstream msg;
    msg << "vector_law: index " << index << " out of range for rank " << model.rank();
    throw InvalidInput(msg.str());
  }
  const auto i = static_cast<Eigen::Index>(index);
  return vector_law(model.strength(index), model.U().col(i), model.V().col(i), noise, options);
}

AsymptoticLaw subspace_law(const SignalModel& model, const CumulantSet& noise,
                           const LawOptions& options) {
  const AspectRatio& y = model.aspect();
  const std::size_t r = model.rank();
  const double n = static_cast<double>(model.cols());
  const double root_n = std::sqrt(n);
  const double k3 = noise.kappa3;
  const double k4 = noise.kappa4;

  std::vector<double> th(r), ps(r);
  for (std::size_t i = 0; i < r; ++i) {
    th[i] = theta(model.strength(i), y);
    ps[i] = psi(model.strength(i), y);
  }

  AsymptoticLaw law;
  law.delta_gaussian = true;
  for (std::size_t i = 0; i < r; ++i) {
    const double d = model.strength(i);
    const auto ci = static_cast<Eigen::Index>(i);
    const auto u = model.U().col(ci);
    const auto v = model.V().col(ci);
    law.center += a(d, y);
    law.linear_coeffs.push_back(2.0 * th[i]);
    law.mean_shift += -(2.0 * ps[i] / (d * d)) * (k3 / n) * s_l(u, 1) * s_l(v, 1);
    law.gaussian_var += v_E(d, y);
    law.delta_gaussian = law.delta_gaussian && delta_is_gaussian(noise, u, v, model.cols(), options);
  }
  for (std::size_t i = 0; i < r; ++i) {
    const auto ci = static_cast<Eigen::Index>(i);
    const double di = model.strength(i);
    for (std::size_t j = 0; j < r; ++j) {
      const auto cj = static_cast<Eigen::Index>(j);
      const double dj = model.strength(j);
      const auto ui = model.U().col(ci);
      const auto uj = model.U().col(cj);
      const auto vi = model.V().col(ci);
      const auto vj = model.V().col(cj);
      law.gaussian_var += k4 * (ps[i] * ps[j] / (di * dj) * s_kl(ui, uj, 2, 2) +
                                y.value() * th[i] * th[j] / (di * dj) * s_kl(vi, vj, 2, 2));
      law.gaussian_var += k3 / root_n * 4.0 / di * th[j] *
                          (th[i] * s_kl(vi, vj, 2, 1) * s_l(uj, 1) - ps[i] * s_kl(ui, uj, 2, 1) * s_l(vj, 1));
    }
  }
  check_gaussian_var(law.gaussian_var, "subspace_law");
  return law;
}

double a_left(double d, const AspectRatio& y) {
  const AspectRatio dual(1.0 / y.value());
  return a(d / std::sqrt(y.value()), dual);
}

AsymptoticLaw left_law(const SignalModel& model, std::size_t index, const CumulantSet& noise,
                       const LawOptions& options) {
  if (index >= model.rank()) {
    std::ostringstream msg;
    msg << "left_law: index " << index << " out of range for rank " << model.rank();
    throw InvalidInput(msg.str());
  }
  const auto i = static_cast<Eigen::Index>(index);
  const double root_y = std::sqrt(model.aspect().value());
  // In Y^T / sqrt(y) the roles of u and v swap, d -> d / sqrt(y) and the
  // normalization becomes sqrt(M) = sqrt(n) sqrt(y).
  AsymptoticLaw law = vector_law(model.strength(index) / root_y, model.V().col(i), model.U().col(i), noise, options);
  law.mean_shift /= root_y;
  for (double& c : law.linear_coeffs) c /= root_y;
  law.gaussian_var /= model.aspect().value();
  return law;
}

double special_sigma_g(double d) {
  require_supercritical_half(d, "special_sigma_g");
  const double d2 = d * d, d4 = d2 * d2, d6 = d4 * d2, d8 = d4 * d4, d10 = d8 * d2, d12 = d6 * d6;
  const double num = 8 * d12 + 24 * d10 + 26 * d8 + 20 * d6 + 15 * d4 + 8 * d2 + 2;
  const double den = 2 * d4 * (2 * d4 - 1) * std::pow(d2 + 1, 4);
  return std::sqrt(num / den);
}

double special_sigma_t(double d) {
  require_supercritical_half(d, "special_sigma_t");
  const double d2 = d * d, d4 = d2 * d2;
  const double q = sq(d4 + d2 + 0.5);
  const double w4 = std::pow(d2 + 1, 4);
  const double var = sq(special_sigma_g(d)) + 2.0 * q / (std::pow(d, 7) * w4) - 0.75 * q / (std::pow(d, 8) * w4);
  return std::sqrt(var);
}

double special_sigma_s(double d) {
  require_supercritical_half(d, "special_sigma_s");
  const double d2 = d * d, d4 = d2 * d2, d6 = d4 * d2, d8 = d4 * d4;
  const double d10 = d8 * d2, d12 = d6 * d6, d14 = d12 * d2, d16 = d8 * d8;
  const double num = d16 + 4 * d14 + 6 * d12 + d10 - 6 * d8 - 2 * d6 + 6.5 * d4 + 6.25 * d2 + 1.6875;
  const double den = d8 * std::pow(d2 + 1, 4) * (2 * d4 - 1);
  return std::sqrt(num / den);
}

double special_shift_dt(double d) {
  require_supercritical_half(d, "special_shift_dt");
  const double d2 = d * d;
  return (d2 * d2 * d2 - 1.5 * d2 - 1.0) / (std::pow(d, 5) * sq(d2 + 1.0));
}

double special_sigma_t1g(const std::vector<double>& d, const AspectRatio& y) {
  if (d.empty()) throw InvalidInput("special_sigma_t1g needs at least one strength");
  double var = 0.0;
  for (double di : d) {
    SignalStrength(di, y);
    var += 4.0 * sq(theta(di, y)) + v_E(di, y);
  }
  return std::sqrt(var);
}

double special_sigma_t1t(const std::vector<double>& d, const AspectRatio& y) {
  double var = sq(special_sigma_t1g(d, y));
  const double yv = y.value();
  for (double di : d) var -= 1.5 * yv * sq(theta(di, y)) / (di * di);
  var += 4.0 * std::sqrt(yv) / std::sqrt(2.0) * sq(theta(d.front(), y)) / d.front();
  if (!(var > 0.0)) throw RegimeError("special_sigma_t1t: non-positive variance");
  return std::sqrt(var);
}

}  // namespace rmt
