#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rmt/montecarlo.hpp"

namespace rmt {

// Canonical simulation designs behind the reference tables, shared by the CLI
// and the acceptance suite.

enum class ReferenceTable { s1, s2, s3, s4, s5 };

std::string to_string(ReferenceTable t);
ReferenceTable reference_table_from_string(const std::string& name);

inline const std::vector<double>& reference_strengths() {
  static const std::vector<double> d{2.0, 3.0, 5.0, 10.0};
  return d;
}
inline const std::vector<double>& reference_aspects() {
  static const std::vector<double> y{0.5, 1.0, 2.0};
  return y;
}
inline const std::vector<double>& reference_alphas() {
  static const std::vector<double> a{0.05, 0.1};
  return a;
}

/// Independent stream key for cell `cell` of a table run with user seed `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t cell);
/// derive_seed keyed by a cell label such as "s1/n=500,d=2" (FNV-1a of the label).
std::uint64_t cell_seed(std::uint64_t seed, std::string_view label);

/// Rank-one designs at y = 1/2 (M = n / 2):
///   s1  R_g,  Gaussian,  u = e1,          v = f1
///   s2  R_dt, Two-Point, u = 1/sqrt(M),   v = 1/sqrt(n)
///   s3  R_pt, Two-Point, u = 1/sqrt(M),   v = f1
///   s4  R_st, Two-Point, u = e1,          v = f1
ExperimentConfig quantile_design(ReferenceTable table, double d, Eigen::Index n, std::size_t replicates,
                                 std::uint64_t seed);

/// Rank-two subspace design: d = (5, 3), u1 = 1/sqrt(M), u2 alternating, V = V0 = (f1, f2),
/// M = y n; T_1g for Gaussian noise and T_1t otherwise. alpha defaults to 0.05.
ExperimentConfig subspace_design(double y, const NoiseProfile& noise, Eigen::Index n, std::size_t replicates,
                                 std::uint64_t seed);

/// Power design: subspace_design with Two-Point noise, true V = (f1, sqrt(1 - delta^2) f2 + delta f3)
/// and null V0 = (f1, f2); pass to power_curve with the delta grid.
ExperimentConfig power_design(double y, Eigen::Index n, std::size_t replicates, std::uint64_t seed,
                              double alpha = 0.05);

/// One published reference value with its provenance.
struct ReferenceCell {
  std::string table;   // "s1" ... "s5"
  std::string row;     // quantile ("0.50") or aspect ratio ("y=0.5")
  std::string column;  // e.g. "n=500,d=2" or "gaussian,alpha=0.05,n=500"
  double value = 0.0;
  std::optional<double> se;
  long n = 0;
  double d = 0.0, q = 0.0, y = 0.0, alpha = 0.0;
  std::string noise;
  bool suspect = false;
  std::string note;
};

int reference_version();
const std::vector<ReferenceCell>& reference_cells();

/// The quantile-table cell for (table, n, d, q), if published.
const ReferenceCell* find_quantile_cell(ReferenceTable table, long n, double d, double q);
/// The type-I error cell for (y, noise name, alpha, n), if published.
const ReferenceCell* find_type_one_cell(double y, const std::string& noise, double alpha, long n);

}  // namespace rmt
