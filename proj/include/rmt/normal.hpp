#pragma once

namespace rmt {

/// Standard normal CDF.
double normal_cdf(double x);

/// Upper tail 1 - Phi(x), accurate for large x.
double normal_sf(double x);

/// Standard normal quantile Phi^{-1}(q) for q in (0, 1); throws DomainError otherwise.
double normal_quantile(double q);

/// Two-sided critical value z_{1 - alpha/2}; alpha in (0, 1].
double two_sided_critical(double alpha);

/// 2 (1 - Phi(|z|)).
double two_sided_p_value(double z);

}  // namespace rmt
