#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/SVD>

#include "rmt/error.hpp"
#include "rmt/moments.hpp"
#include "rmt/mp_core.hpp"
#include "rmt/noise.hpp"
#include "rmt/philox.hpp"

using namespace rmt;

namespace {

Eigen::VectorXd random_unit(Eigen::Index dim, PhiloxEngine& rng) {
  Eigen::VectorXd w(dim);
  for (Eigen::Index i = 0; i < dim; ++i) w[i] = rng.normal();
  return w.normalized();
}

std::vector<double> draws(const NoiseProfile& noise, std::size_t count, std::uint64_t seed) {
  std::vector<double> out(count);
  noise.fill(out, CounterStream(seed, 0, StreamTag::noise));
  return out;
}

// k-statistics from central moments (textbook form, independent of the
// library's power-sum implementation).
CumulantSet k_statistics(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double m2 = 0, m3 = 0, m4 = 0;
  for (double v : x) {
    const double c = v - mean;
    m2 += c * c;
    m3 += c * c * c;
    m4 += c * c * c * c;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  return {n / (n - 1) * m2, n * n / ((n - 1) * (n - 2)) * m3,
          n * n * ((n + 1) * m4 - 3 * (n - 1) * m2 * m2) / ((n - 1) * (n - 2) * (n - 3))};
}

}  // namespace

TEST_CASE("unit vectors") {
  CHECK_NOTHROW(UnitVector(Eigen::VectorXd::Unit(4, 1)));
  CHECK_THROWS_AS(UnitVector(Eigen::VectorXd::Ones(4)), InvalidInput);
  const UnitVector w = UnitVector::normalized(Eigen::VectorXd::Ones(4));
  CHECK(w[2] == doctest::Approx(0.5));
  CHECK(w.sup_norm() == doctest::Approx(0.5));
  CHECK_THROWS_AS(UnitVector::normalized(Eigen::VectorXd::Zero(3)), InvalidInput);
}

TEST_CASE("power sums of the standard vectors") {
  const Eigen::Index M = 64;
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(M, 1.0 / std::sqrt(double(M)));
  Eigen::VectorXd alternating = uniform;
  alternating.tail(M / 2) *= -1.0;
  const Eigen::VectorXd e1 = Eigen::VectorXd::Unit(M, 0);
  const Eigen::VectorXd e2 = Eigen::VectorXd::Unit(M, 1);

  CHECK(s_l(uniform, 3) == doctest::Approx(1.0 / std::sqrt(double(M))).epsilon(1e-13));
  CHECK(s_l(e1, 4) == 1.0);
  CHECK(std::abs(s_l(alternating, 1)) < 1e-14);
  CHECK(s_kl(e1, e2, 2, 2) == 0.0);
  CHECK(s_kl(uniform, e1, 2, 1) == doctest::Approx(1.0 / double(M)).epsilon(1e-13));
  CHECK_THROWS_AS(s_kl(uniform, Eigen::VectorXd::Unit(M + 1, 0), 1, 1), InvalidInput);
}

TEST_CASE("power sums agree with direct summation") {
  PhiloxEngine rng(11);
  for (Eigen::Index dim : {1, 7, 100, 1000}) {
    const Eigen::VectorXd w1 = random_unit(dim, rng), w2 = random_unit(dim, rng);
    for (int l = 1; l <= 4; ++l) {
      double direct = 0.0;
      for (Eigen::Index i = 0; i < dim; ++i) direct += std::pow(w1[i], l);
      CHECK(std::abs(s_l(w1, l) - direct) < 1e-12);
    }
    for (int k = 1; k <= 3; ++k) {
      for (int l = 1; l <= 3; ++l) {
        double direct = 0.0;
        for (Eigen::Index i = 0; i < dim; ++i) direct += std::pow(w1[i], k) * std::pow(w2[i], l);
        CHECK(std::abs(s_kl(w1, w2, k, l) - direct) < 1e-12);
      }
    }
  }
}

TEST_CASE("k-statistics on a small sample") {
  const std::vector<double> x{0.3, -1.2, 2.5, 0.0, 0.7, -0.4, 1.9, -2.2, 0.05, 3.1, -0.8, 1.1};
  const CumulantSet ref = k_statistics(x);
  const CumulantSet got = sample_cumulants(x);
  CHECK(got.kappa2 == doctest::Approx(ref.kappa2).epsilon(1e-12));
  CHECK(got.kappa3 == doctest::Approx(ref.kappa3).epsilon(1e-12));
  CHECK(got.kappa4 == doctest::Approx(ref.kappa4).epsilon(1e-12));
}

TEST_CASE("degenerate and undersized samples") {
  CHECK_THROWS_AS(sample_cumulants(std::vector<double>(100, 0.0)), DegenerateSample);
  CHECK_THROWS_AS(sample_cumulants(std::vector<double>(100, 3.5)), DegenerateSample);
  CHECK_THROWS_AS(sample_cumulants(std::vector<double>{1, 2, 3}), InvalidInput);
}

TEST_CASE("exact Two-Point cumulants from the two atoms") {
  const std::vector<double> atoms{std::sqrt(2.0), -1.0 / std::sqrt(2.0)};
  const std::vector<double> weights{1.0 / 3.0, 2.0 / 3.0};
  const CumulantSet k = distribution_cumulants(atoms, weights);
  CHECK(k.kappa2 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(k.kappa3 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(k.kappa4 == doctest::Approx(-1.5).epsilon(1e-15));
  const CumulantSet tp = CumulantSet::two_point();
  CHECK(tp.kappa3 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(tp.kappa4 == doctest::Approx(-1.5).epsilon(1e-15));
  CHECK(tp.kappa4_feasible());
  CHECK_FALSE(CumulantSet{1.0, 0.0, -2.5}.kappa4_feasible());
}

TEST_CASE("sampled cumulants of a million draws") {
  const CumulantSet tp = sample_cumulants(draws(NoiseProfile::two_point(), 1000000, 3));
  CHECK(tp.kappa2 == doctest::Approx(1.0).epsilon(0.01));
  CHECK(std::abs(tp.kappa3 - 1.0 / std::sqrt(2.0)) < 0.01);
  CHECK(std::abs(tp.kappa4 + 1.5) < 0.02);

  const CumulantSet g = sample_cumulants(draws(NoiseProfile::gaussian(), 1000000, 4));
  CHECK(g.kappa2 == doctest::Approx(1.0).epsilon(0.01));
  CHECK(std::abs(g.kappa3) < 0.02);
  CHECK(std::abs(g.kappa4) < 0.02);
}

TEST_CASE("residual cumulants with the true signal") {
  const Eigen::Index M = 250, n = 500;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(M, n);
  S(0, 0) = 3.0;
  double total = 0.0;
  for (std::uint64_t rep = 0; rep < 50; ++rep) {
    const Eigen::MatrixXd Y = S + sample_noise(NoiseProfile::gaussian(), M, n, CounterStream(21, rep, StreamTag::noise));
    const CumulantSet k = residual_cumulants(Y, S);
    CHECK(std::abs(k.kappa2 - 1.0) < 0.05);
    total += k.kappa2;
  }
  CHECK(std::abs(total / 50.0 - 1.0) < 0.01);
}

TEST_CASE("residual cumulants from a plug-in signal estimate") {
  // S_hat = U diag(d_hat) V_hat^T with d_hat = p_inv(mu) from the leading SVD.
  const Eigen::Index M = 250, n = 500;
  const AspectRatio y(0.5);
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(M, 2), V = Eigen::MatrixXd::Zero(n, 2);
  U.col(0).setConstant(1.0 / std::sqrt(double(M)));
  U.col(1).head(M / 2).setConstant(1.0 / std::sqrt(double(M)));
  U.col(1).tail(M / 2).setConstant(-1.0 / std::sqrt(double(M)));
  V(0, 0) = V(1, 1) = 1.0;
  const Eigen::MatrixXd S = U * Eigen::Vector2d(5.0, 3.0).asDiagonal() * V.transpose();
  for (std::uint64_t rep = 0; rep < 5; ++rep) {
    const Eigen::MatrixXd Y = S + sample_noise(NoiseProfile::two_point(), M, n, CounterStream(5, rep, StreamTag::noise));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Y, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::Vector2d d_hat;
    for (int i = 0; i < 2; ++i) d_hat[i] = p_inv(std::pow(svd.singularValues()[i], 2), y);
    const Eigen::MatrixXd S_hat = U * d_hat.asDiagonal() * V.transpose();
    const CumulantSet k = residual_cumulants(Y, S_hat);
    CHECK(std::abs(k.kappa3 - 1.0 / std::sqrt(2.0)) < 0.05);
    CHECK(std::abs(k.kappa4 + 1.5) < 0.1);
  }
}

TEST_CASE("residual cumulants: zero residual and permutation invariance") {
  Eigen::MatrixXd Y = Eigen::MatrixXd::Random(20, 30);
  CHECK_THROWS_AS(residual_cumulants(Y, Y), DegenerateSample);
  CHECK_THROWS_AS(residual_cumulants(Y, Eigen::MatrixXd::Zero(20, 29)), InvalidInput);

  // Same residual entries in a different arrangement: identical cumulants.
  const Eigen::MatrixXd R = sample_noise(NoiseProfile::two_point(), 20, 30, CounterStream(9, 0, StreamTag::noise));
  Eigen::MatrixXd P = R.reverse();
  P.col(3).swap(P.col(17));
  const CumulantSet a = residual_cumulants(R, Eigen::MatrixXd::Zero(20, 30));
  const CumulantSet b = residual_cumulants(P, Eigen::MatrixXd::Zero(20, 30));
  CHECK(a.kappa2 == doctest::Approx(b.kappa2).epsilon(1e-12));
  CHECK(a.kappa3 == doctest::Approx(b.kappa3).epsilon(1e-12));
  CHECK(a.kappa4 == doctest::Approx(b.kappa4).epsilon(1e-12));
}
