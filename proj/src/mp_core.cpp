#include "rmt/mp_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rmt/error.hpp"

namespace rmt {

namespace {

template <class T>
T sq(T x) {
  return x * x;
}

void require_outside_bulk(double z, const AspectRatio& y, const char* what) {
  if (!(z > y.lambda_plus() + kEdgeGuard)) {
    std::ostringstream msg;
    msg << what << ": z=" << z << " is not to the right of the bulk edge lambda_plus="
        << y.lambda_plus() << " (edge guard " << kEdgeGuard << ")";
    throw DomainError(msg.str());
  }
}

// D(z) = (z - lambda_plus)(z - lambda_minus) = (z - 1 + y)^2 - 4yz.
template <class T>
T discriminant_root(T z, T y) {
  const T r = std::sqrt(y);
  return std::sqrt((z - (1 + r) * (1 + r)) * (z - (1 - r) * (1 - r)));
}

}  // namespace

AspectRatio::AspectRatio(double y, double tau) : y_(y) {
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("aspect tolerance tau must lie in (0,1)");
  if (!(y >= tau && y <= 1.0 / tau)) {
    std::ostringstream msg;
    msg << "aspect ratio y=" << y << " outside [" << tau << ", " << 1.0 / tau << "]";
    throw DomainError(msg.str());
  }
}

AspectRatio AspectRatio::from_dims(long rows, long cols, double tau) {
  if (rows <= 0 || cols <= 0) throw InvalidInput("matrix dimensions must be positive");
  return AspectRatio(static_cast<double>(rows) / static_cast<double>(cols), tau);
}

double AspectRatio::lambda_plus() const noexcept { return sq(1.0 + std::sqrt(y_)); }
double AspectRatio::lambda_minus() const noexcept { return sq(1.0 - std::sqrt(y_)); }
double AspectRatio::critical_strength() const noexcept { return std::pow(y_, 0.25); }

bool is_supercritical(double d, const AspectRatio& y, double margin) noexcept {
  return d > y.critical_strength() + margin;
}

SignalStrength::SignalStrength(double d, const AspectRatio& y, double margin) : d_(d) {
  if (!is_supercritical(d, y, margin)) {
    std::ostringstream msg;
    msg << "signal strength d=" << d << " is not supercritical for y=" << y.value()
        << " (need d > y^{1/4} + " << margin << " = " << y.critical_strength() + margin << ")";
    throw DomainError(msg.str());
  }
}

namespace {

// On the real axis right of the bulk the Stieltjes transforms are
//   m1 = (1 - y - z + sqrt(D)) / (2zy),   m2 = (y - 1 - z + sqrt(D)) / (2z),
// rewritten without the cancellation between -z and sqrt(D).
template <class T>
T m1_impl(T z, const AspectRatio& y) {
  require_outside_bulk(static_cast<double>(z), y, "m1");
  const T yv = y.value();
  return T(-2) / (discriminant_root(z, yv) + z - 1 + yv);
}

template <class T>
T m2_impl(T z, const AspectRatio& y) {
  require_outside_bulk(static_cast<double>(z), y, "m2");
  const T yv = y.value();
  return T(-2) / (discriminant_root(z, yv) + z + 1 - yv);
}

template <class T>
T m1_prime_impl(T z, const AspectRatio& y) {
  require_outside_bulk(static_cast<double>(z), y, "m1_prime");
  const T yv = y.value();
  const T root = discriminant_root(z, yv);
  const T root_prime = (z - 1 - yv) / root;
  return 2 * (root_prime + 1) / sq(root + z - 1 + yv);
}

template <class T>
T m2_prime_impl(T z, const AspectRatio& y) {
  require_outside_bulk(static_cast<double>(z), y, "m2_prime");
  const T yv = y.value();
  const T root = discriminant_root(z, yv);
  const T root_prime = (z - 1 - yv) / root;
  return 2 * (root_prime + 1) / sq(root + z + 1 - yv);
}

template <class T>
T calT_prime_impl(T t, const AspectRatio& y) {
  const T a1 = m1_impl(t, y);
  const T a2 = m2_impl(t, y);
  return a1 * a2 + t * m1_prime_impl(t, y) * a2 + t * a1 * m2_prime_impl(t, y);
}

template <class T>
T p_impl(T d, const AspectRatio& y) {
  if (!(d > 0)) throw DomainError("p(d) requires d > 0");
  const T d2 = d * d;
  return (d2 + 1) * (d2 + static_cast<T>(y.value())) / d2;
}

}  // namespace

double m1(double z, const AspectRatio& y) { return m1_impl(z, y); }
double m2(double z, const AspectRatio& y) { return m2_impl(z, y); }
double m1_prime(double z, const AspectRatio& y) { return m1_prime_impl(z, y); }
double m2_prime(double z, const AspectRatio& y) { return m2_prime_impl(z, y); }
double calT(double t, const AspectRatio& y) { return t * m1_impl(t, y) * m2_impl(t, y); }
double calT_prime(double t, const AspectRatio& y) { return calT_prime_impl(t, y); }
double p(double d, const AspectRatio& y) { return p_impl(d, y); }

long double m1(long double z, const AspectRatio& y) { return m1_impl(z, y); }
long double m2(long double z, const AspectRatio& y) { return m2_impl(z, y); }
long double m1_prime(long double z, const AspectRatio& y) { return m1_prime_impl(z, y); }
long double m2_prime(long double z, const AspectRatio& y) { return m2_prime_impl(z, y); }
long double calT(long double t, const AspectRatio& y) { return t * m1_impl(t, y) * m2_impl(t, y); }
long double calT_prime(long double t, const AspectRatio& y) { return calT_prime_impl(t, y); }
long double p(long double d, const AspectRatio& y) { return p_impl(d, y); }

double p_inv(double x, const AspectRatio& y) {
  if (!(x > y.lambda_plus())) {
    std::ostringstream msg;
    msg << "p_inv: x=" << x << " has no supercritical preimage (lambda_plus=" << y.lambda_plus()
        << ")";
    throw DomainError(msg.str());
  }
  // d^2 is the larger root of t^2 - (x - 1 - y) t + y = 0.
  const double yv = y.value();
  const double b = x - 1.0 - yv;
  const double disc = std::max(0.0, b * b - 4.0 * yv);
  const double t = 0.5 * (b + std::sqrt(disc));
  return std::sqrt(t);
}

double a(double d, const AspectRatio& y) {
  const double d2 = d * d;
  return (d2 * d2 - y.value()) / (d2 * (d2 + 1.0));
}

double theta(double d, const AspectRatio& y) {
  const double d2 = d * d;
  const double yv = y.value();
  return (d2 * d2 + 2.0 * yv * d2 + yv) / (d2 * d * sq(d2 + 1.0));
}

double psi(double d, const AspectRatio& y) {
  const double d2 = d * d;
  const double yv = y.value();
  return (d2 * d2 * d2 - 3.0 * yv * d2 - 2.0 * yv) / (d2 * d * sq(d2 + 1.0));
}

double v_E(double d, const AspectRatio& y) {
  const double d2 = d * d;
  const double yv = y.value();
  const double gap = d2 * d2 - yv;
  if (!(gap > 0.0)) {
    std::ostringstream msg;
    msg << "v_E: d^4 <= y (d=" << d << ", y=" << yv << ")";
    throw DomainError(msg.str());
  }
  const double th = theta(d, y);
  const double ps = psi(d, y);
  const double w = d2 + 1.0;
  const double bracket = 2.0 * yv * (yv + 1.0) * th * th -
                         yv * (yv - 1.0) * (5.0 * yv + 1.0) / (d * w * w) * th +
                         (d2 * d2 + yv) * sq(d2 + yv) / (d2 * d * w * w) * ps +
                         2.0 * yv * yv * sq(yv - 1.0) / (d2 * w * w * w * w);
  return 2.0 / gap * bracket;
}

}  // namespace rmt
