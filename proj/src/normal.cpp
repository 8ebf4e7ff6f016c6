#include "rmt/normal.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

#include "rmt/error.hpp"

namespace rmt {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    std::ostringstream msg;
    msg << "normal_quantile: probability " << q << " outside (0,1)";
    throw DomainError(msg.str());
  }
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
}

double two_sided_critical(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    std::ostringstream msg;
    msg << "significance level alpha=" << alpha << " outside (0,1]";
    throw DomainError(msg.str());
  }
  // -Phi^{-1}(alpha/2) without forming 1 - alpha/2.
  return std::numbers::sqrt2 * boost::math::erfc_inv(alpha);
}

double two_sided_p_value(double z) { return std::erfc(std::abs(z) / std::numbers::sqrt2); }

}  // namespace rmt
