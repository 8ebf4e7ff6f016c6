#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/QR>

#include "rmt/error.hpp"
#include "rmt/laws.hpp"
#include "rmt/philox.hpp"

using namespace rmt;

namespace {

constexpr double kHalf = 0.5;

Eigen::VectorXd uniform(Eigen::Index dim) { return Eigen::VectorXd::Constant(dim, 1.0 / std::sqrt(double(dim))); }

Eigen::VectorXd alternating(Eigen::Index dim) {
  Eigen::VectorXd w = uniform(dim);
  w.tail(dim / 2) *= -1.0;
  return w;
}

Eigen::VectorXd basis(Eigen::Index dim, Eigen::Index i) { return Eigen::VectorXd::Unit(dim, i); }

Eigen::MatrixXd columns(std::initializer_list<Eigen::VectorXd> cols) {
  Eigen::MatrixXd out(cols.begin()->size(), static_cast<Eigen::Index>(cols.size()));
  Eigen::Index j = 0;
  for (const auto& c : cols) out.col(j++) = c;
  return out;
}

// Polynomial closed forms for the y = 1/2 designs, typed in from their rational expressions.
double sigma_g2(double d) {
  return (8 * std::pow(d, 12) + 24 * std::pow(d, 10) + 26 * std::pow(d, 8) + 20 * std::pow(d, 6) +
          15 * std::pow(d, 4) + 8 * d * d + 2) /
         (2 * std::pow(d, 4) * (2 * std::pow(d, 4) - 1) * std::pow(d * d + 1, 4));
}

void check_same_law(const AsymptoticLaw& a, const AsymptoticLaw& b, double tol) {
  CHECK(std::abs(a.center - b.center) < tol);
  CHECK(std::abs(a.mean_shift - b.mean_shift) < tol);
  REQUIRE(a.linear_coeffs.size() == b.linear_coeffs.size());
  for (std::size_t i = 0; i < a.linear_coeffs.size(); ++i) CHECK(std::abs(a.linear_coeffs[i] - b.linear_coeffs[i]) < tol);
  CHECK(std::abs(a.gaussian_var - b.gaussian_var) < tol);
  CHECK(a.delta_gaussian == b.delta_gaussian);
}

}  // namespace

TEST_CASE("signal model validation") {
  const Eigen::MatrixXd U = columns({basis(10, 0), basis(10, 1)});
  const Eigen::MatrixXd V = columns({basis(20, 0), basis(20, 1)});
  CHECK_NOTHROW(SignalModel({3.0, 2.0}, U, V));
  CHECK_THROWS_AS(SignalModel({2.0, 3.0}, U, V), InvalidInput);
  CHECK_THROWS_AS(SignalModel({3.0}, U, V), InvalidInput);
  CHECK_THROWS_AS(SignalModel({3.0, 0.5}, U, V), DomainError);
  Eigen::MatrixXd bad = U;
  bad(0, 1) = 0.1;
  CHECK_THROWS_AS(SignalModel({3.0, 2.0}, bad, V), InvalidInput);
  CHECK_THROWS_AS(SignalModel({3.0, 2.9}, U, V, kEvaluationMargin, 0.2), InvalidInput);
  const SignalModel model({3.0, 2.0}, U, V);
  CHECK(model.signal()(1, 1) == 2.0);
  CHECK(model.aspect().value() == 0.5);
}

TEST_CASE("Gaussian noise: the vector law does not depend on the vectors") {
  const AspectRatio y(kHalf);
  for (const auto& [u, v] : {std::pair{basis(250, 0), basis(500, 0)}, std::pair{uniform(250), uniform(500)},
                             std::pair{alternating(250), basis(500, 3)}}) {
    const AsymptoticLaw law = vector_law(2.0, u, v, CumulantSet::gaussian());
    CHECK(law.mean_shift == 0.0);
    CHECK(law.gaussian_var == doctest::Approx(v_E(2.0, y)).epsilon(1e-14));
    CHECK(law.total_variance() == doctest::Approx(0.1057322).epsilon(1e-6));
    CHECK(law.total_variance() == doctest::Approx(65554.0 / 620000.0).epsilon(1e-12));
    CHECK(law.delta_gaussian);
  }
  check_same_law(vector_law(2.0, uniform(250), uniform(500), CumulantSet::gaussian()), delocalized_vector_law(2.0, y),
                 1e-15);
}

TEST_CASE("closed forms of the y = 1/2 designs") {
  const AspectRatio y(kHalf);
  CHECK(std::pow(special_sigma_g(2.0), 2) == doctest::Approx(65554.0 / 620000.0).epsilon(1e-13));
  CHECK(special_shift_dt(2.0) == doctest::Approx(57.0 / 800.0).epsilon(1e-14));
  const double k4 = -1.5, k3 = 1.0 / std::sqrt(2.0);
  for (double d : {2.0, 3.0, 5.0, 10.0}) {
    CAPTURE(d);
    const double th = theta(d, y), ps = psi(d, y), ve = v_E(d, y);
    CHECK(std::abs(std::pow(special_sigma_g(d), 2) - sigma_g2(d)) < 1e-12 * sigma_g2(d));
    CHECK(std::abs(4 * th * th + ve - sigma_g2(d)) < 1e-10 * sigma_g2(d));
    // Case u = 1/sqrt(M), v = f1: the kappa3 s1(u)s3(v) and kappa4 s4(v) corrections.
    CHECK(std::pow(special_sigma_t(d), 2) ==
          doctest::Approx(4 * th * th + ve + 4.0 / d * th * th * k3 * std::sqrt(kHalf) + kHalf * th * th / (d * d) * k4)
              .epsilon(1e-12));
    // Case u = e1, v = f1: sigma_s^2 is the variance of the Gaussian part Z alone.
    CHECK(std::pow(special_sigma_s(d), 2) ==
          doctest::Approx(ve + k4 * (ps * ps + kHalf * th * th) / (d * d)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(special_sigma_g(0.5), DomainError);
}

TEST_CASE("Two-Point noise with delocalized vectors shifts the mean") {
  const AspectRatio y(kHalf);
  for (double d : {2.0, 3.0, 5.0, 10.0}) {
    const AsymptoticLaw law = vector_law(d, uniform(250), uniform(500), CumulantSet::two_point());
    const double shift = (std::pow(d, 6) - 1.5 * d * d - 1.0) / (std::pow(d, 5) * std::pow(d * d + 1, 2));
    CHECK(law.mean_shift == doctest::Approx(-shift).epsilon(1e-12));
    CHECK(law.mean_shift == doctest::Approx(-special_shift_dt(d)).epsilon(1e-12));
    CHECK(law.delta_gaussian);
  }
}

TEST_CASE("Two-Point noise with localized vectors is not Gaussian") {
  const AspectRatio y(kHalf);
  const double d = 2.0;
  const AsymptoticLaw law = vector_law(d, basis(250, 0), basis(500, 0), CumulantSet::two_point());
  const double th = theta(d, y), ps = psi(d, y);
  // kappa4 terms survive; the kappa3 terms are O(n^{-1/2}) for basis vectors.
  const double k3_terms = 4.0 / d * (th * th - th * ps) * (1.0 / std::sqrt(2.0)) / std::sqrt(500.0);
  const double expected = v_E(d, y) - 1.5 * (ps * ps + kHalf * th * th) / (d * d) + k3_terms;
  CHECK(law.gaussian_var == doctest::Approx(expected).epsilon(1e-12));
  CHECK_FALSE(law.delta_gaussian);
  REQUIRE(law.linear_coeffs.size() == 1);
  CHECK(law.linear_coeffs[0] == doctest::Approx(2.0 * theta(d, y)));
  LawOptions forced;
  forced.reduction = DeltaReduction::gaussian;
  CHECK(vector_law(d, basis(250, 0), basis(500, 0), CumulantSet::two_point(), forced).delta_gaussian);
}

TEST_CASE("negative limiting variance is a regime error") {
  CHECK_THROWS_AS(vector_law(2.0, basis(250, 0), uniform(500), CumulantSet{1.0, 10.0, 0.0}), RegimeError);
}

TEST_CASE("delocalization collapse of the variance corrections") {
  // u = 1/sqrt(M) and v alternating: the kappa corrections to the variance shrink like n^{-1/2}.
  std::vector<double> excess;
  for (Eigen::Index n : {500, 2000, 8000}) {
    const AsymptoticLaw law = vector_law(3.0, uniform(n / 2), alternating(n), CumulantSet::two_point());
    excess.push_back(std::abs(law.gaussian_var - v_E(3.0, AspectRatio(kHalf))) / v_E(3.0, AspectRatio(kHalf)));
  }
  CHECK(excess[0] < 0.2);
  CHECK(excess[1] < excess[0] * 0.6);
  CHECK(excess[2] < excess[1] * 0.6);
}

TEST_CASE("rank-one subspace law equals the vector law") {
  for (const auto& noise : {CumulantSet::gaussian(), CumulantSet::two_point()}) {
    for (const auto& [u, v] : {std::pair{basis(100, 0), basis(200, 0)}, std::pair{uniform(100), basis(200, 5)},
                               std::pair{alternating(100), uniform(200)}}) {
      const SignalModel model({4.0}, u, v);
      check_same_law(subspace_law(model, noise), vector_law(model, 0, noise), 1e-12);
    }
  }
}

TEST_CASE("rank-two Gaussian subspace law") {
  const AspectRatio y(kHalf);
  const SignalModel model({5.0, 3.0}, columns({uniform(250), alternating(250)}), columns({basis(500, 0), basis(500, 1)}));
  const AsymptoticLaw law = subspace_law(model, CumulantSet::gaussian());
  CHECK(law.center == doctest::Approx(a(5.0, y) + a(3.0, y)).epsilon(1e-14));
  CHECK(law.gaussian_var == doctest::Approx(v_E(5.0, y) + v_E(3.0, y)).epsilon(1e-13));
  CHECK(law.total_variance() == doctest::Approx(std::pow(special_sigma_t1g({5.0, 3.0}, y), 2)).epsilon(1e-13));
}

TEST_CASE("rank-two Two-Point subspace law matches the T_1t normalizer") {
  // The normalizer drops the kappa4 s4(u) terms, which are O(1/M).
  const Eigen::Index n = 20000, M = n / 2;
  const AspectRatio y(kHalf);
  const SignalModel model({5.0, 3.0}, columns({uniform(M), alternating(M)}), columns({basis(n, 0), basis(n, 1)}));
  const AsymptoticLaw law = subspace_law(model, CumulantSet::two_point());
  CHECK(std::abs(law.total_variance() - std::pow(special_sigma_t1t({5.0, 3.0}, y), 2)) < 1e-5);
  const double th1 = theta(5.0, y), th2 = theta(3.0, y);
  const double by_hand = 4 * th1 * th1 + v_E(5.0, y) + 4 * th2 * th2 + v_E(3.0, y) -
                         1.5 * kHalf * (th1 * th1 / 25.0 + th2 * th2 / 9.0) + 4 * std::sqrt(kHalf) / std::sqrt(2.0) * th1 * th1 / 5.0;
  CHECK(std::pow(special_sigma_t1t({5.0, 3.0}, y), 2) == doctest::Approx(by_hand).epsilon(1e-13));
}

TEST_CASE("Gaussian subspace law is invariant under rotations of V") {
  PhiloxEngine rng(5);
  const Eigen::MatrixXd U = columns({uniform(100), alternating(100)});
  const Eigen::MatrixXd V = columns({basis(200, 0), basis(200, 1)});
  Eigen::Matrix2d G;
  for (int i = 0; i < 4; ++i) G.data()[i] = rng.normal();
  const Eigen::Matrix2d O = Eigen::HouseholderQR<Eigen::Matrix2d>(G).householderQ();
  const AsymptoticLaw a0 = subspace_law(SignalModel({5.0, 3.0}, U, V), CumulantSet::gaussian());
  const AsymptoticLaw a1 = subspace_law(SignalModel({5.0, 3.0}, U, V * O), CumulantSet::gaussian());
  CHECK(a0.center == doctest::Approx(a1.center).epsilon(1e-14));
  CHECK(a0.total_variance() == doctest::Approx(a1.total_variance()).epsilon(1e-13));
}

TEST_CASE("left law by the transpose map") {
  const AspectRatio y(kHalf);
  CHECK(a_left(2.0, y) == doctest::Approx(62.0 / 72.0).epsilon(1e-14));
  const double d = 2.0;
  CHECK(a_left(d, y) == doctest::Approx((std::pow(d, 4) - kHalf) / (d * d * (d * d + kHalf))).epsilon(1e-14));

  // Square aspect: left law = right law with u and v swapped.
  const SignalModel square({5.0}, uniform(300), basis(300, 2));
  const AsymptoticLaw left = left_law(square, 0, CumulantSet::two_point());
  const AsymptoticLaw swapped = vector_law(5.0, basis(300, 2), uniform(300), CumulantSet::two_point());
  check_same_law(left, swapped, 1e-12);
  CHECK_THROWS_AS(left_law(square, 1, CumulantSet::gaussian()), InvalidInput);
}

TEST_CASE("Gaussian variance decreases in d") {
  for (double yv : {0.1, 0.5, 5.0, 10.0}) {
    const AspectRatio y(yv);
    const Eigen::Index n = 1000, M = static_cast<Eigen::Index>(yv * n);
    double previous = INFINITY;
    for (double d = 3.0; d <= 13.0; d += 0.25) {
      const double var = vector_law(d, uniform(M), basis(n, 0), CumulantSet::gaussian()).gaussian_var;
      CHECK(var < previous);
      previous = var;
    }
  }
}

TEST_CASE("realized delta and total variance bookkeeping") {
  AsymptoticLaw law;
  law.mean_shift = 0.5;
  law.linear_coeffs = {2.0, -1.0};
  law.gaussian_var = 1.0;
  CHECK(law.realized_delta({1.0, 3.0}) == doctest::Approx(-0.5));
  CHECK(law.linear_variance() == doctest::Approx(5.0));
  CHECK(law.sd() == doctest::Approx(std::sqrt(6.0)));
  CHECK_THROWS_AS(law.realized_delta({1.0}), InvalidInput);
}
