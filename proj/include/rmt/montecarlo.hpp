#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rmt/error.hpp"
#include "rmt/inference.hpp"
#include "rmt/laws.hpp"
#include "rmt/linalg.hpp"
#include "rmt/noise.hpp"

namespace rmt {

inline constexpr std::size_t kDefaultReplicates = 10000;
inline constexpr std::size_t kFastReplicates = 2000;
inline constexpr std::size_t kMinReportReplicates = 100;

/// Constructor for one column of U or V.
struct VectorSpec {
  enum class Kind { uniform, alternating, basis, rotated_basis, custom };

  Kind kind = Kind::uniform;
  Eigen::Index index = 0;   // basis: e_index; rotated_basis: first axis
  Eigen::Index second = 0;  // rotated_basis: second axis
  double delta = 0.0;       // rotated_basis: sqrt(1 - delta^2) e_index + delta e_second
  std::vector<double> values;

  static VectorSpec uniform() { return {}; }
  /// First half +1/sqrt(dim), second half -1/sqrt(dim); dim must be even.
  static VectorSpec alternating() { return {Kind::alternating, 0, 0, 0.0, {}}; }
  static VectorSpec basis(Eigen::Index i) { return {Kind::basis, i, 0, 0.0, {}}; }
  static VectorSpec rotated_basis(Eigen::Index a, Eigen::Index b, double delta) {
    return {Kind::rotated_basis, a, b, delta, {}};
  }
  static VectorSpec custom(std::vector<double> values) { return {Kind::custom, 0, 0, 0.0, std::move(values)}; }

  /// Materializes the unit vector; throws InvalidInput when it cannot be built at `dim`.
  Eigen::VectorXd build(Eigen::Index dim) const;

  friend bool operator==(const VectorSpec&, const VectorSpec&) = default;
};

std::string to_string(VectorSpec::Kind kind);
VectorSpec::Kind vector_kind_from_string(const std::string& name);

enum class Statistic { R_g, R_dt, R_pt, R_st, T_1g, T_1t, S0, S1, S1d, raw_overlap, left_overlap };

std::string to_string(Statistic s);
Statistic statistic_from_string(const std::string& name);

struct ExperimentConfig {
  Eigen::Index n = 500;
  Eigen::Index M = 250;
  std::vector<double> d{2.0};
  std::vector<VectorSpec> u{VectorSpec::basis(0)};
  std::vector<VectorSpec> v{VectorSpec::basis(0)};
  /// Null-hypothesis right factor for the test statistics; defaults to v.
  std::optional<std::vector<VectorSpec>> v0;
  NoiseProfile noise = NoiseProfile::gaussian();
  Statistic statistic = Statistic::R_g;
  std::size_t replicates = kDefaultReplicates;
  std::uint64_t seed = 0;
  std::optional<double> alpha;
  std::vector<double> delta_grid;
  /// S0/S1/S1d: plug in d_hat = p_inv(mu) and residual cumulants instead of the truth.
  bool estimate_strengths = false;
  bool estimate_cumulants = false;
  /// Component used by the single-vector statistics (zero-based).
  std::size_t component = 0;
  /// Debug hook: Y = S exactly.
  bool zero_noise = false;

  /// Throws InvalidInput describing the first problem found.
  void validate() const;
};

/// Everything one replicate produces before it is reduced to a statistic.
struct ReplicateSample {
  Eigen::VectorXd mu;              // leading r squared singular values
  Eigen::MatrixXd right_overlaps;  // <v_hat_i, v0_j>^2, r x r
  Eigen::VectorXd left_overlaps;   // <u_hat_i, u_i>^2
  Eigen::VectorXd projections;     // sqrt(n) u_i^T X v_i
  double x11 = 0.0;                // sqrt(n) X_11
  double statistic = 0.0;
};

/// A validated configuration with all replicate-independent quantities precomputed.
/// Replicates are pure functions of (config, index), so an Experiment can be
/// shared read-only between threads.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig config);

  const ExperimentConfig& config() const noexcept { return config_; }
  const SignalModel& model() const noexcept { return model_; }
  /// The null model (V replaced by V0).
  const SignalModel& null_model() const noexcept { return null_model_; }
  /// Normalizer of the configured statistic (1 for the z-score statistics).
  double scale() const noexcept { return scale_; }
  bool simulation_only() const noexcept { return config_.statistic == Statistic::R_st; }

  /// Y = S + X for replicate `index`, with X returned separately when requested.
  Eigen::MatrixXd observation(std::uint64_t index, Eigen::MatrixXd* noise_out = nullptr) const;
  /// Leading r singular triplets of Y (Lanczos, one fresh-start retry, dense fallback).
  ThinSvd spectrum(const Eigen::MatrixXd& Y, std::uint64_t index) const;

  ReplicateSample simulate(std::uint64_t index) const;
  double run_replicate(std::uint64_t index) const { return simulate(index).statistic; }

 private:
  ExperimentConfig config_;
  SignalModel model_;
  SignalModel null_model_;
  Eigen::MatrixXd S_;
  double center_ = 0.0;
  double shift_ = 0.0;
  double scale_ = 1.0;
};

double run_replicate(const ExperimentConfig& config, std::uint64_t index);

struct PowerPoint {
  double delta = 0.0;
  double power = 0.0;
  friend bool operator==(const PowerPoint&, const PowerPoint&) = default;
};

inline const std::vector<double>& report_quantiles() {
  static const std::vector<double> q{0.01, 0.05, 0.10, 0.30, 0.50, 0.70, 0.90, 0.95, 0.99};
  return q;
}

struct McReport {
  ExperimentConfig config;
  std::vector<double> ecdf;
  /// Fraction of statistics <= Phi^{-1}(q) for q in report_quantiles().
  std::vector<double> quantile_table;
  double ks_distance = 0.0;
  std::optional<double> rejection_rate;
  std::vector<PowerPoint> power_points;
  bool power_monotone = true;
  bool simulation_only = false;
  double runtime_seconds = 0.0;
  std::uint64_t seed = 0;
};

/// True when every field except the wall time agrees bit for bit.
bool same_results(const McReport& a, const McReport& b);

/// Aggregate failure of one or more replicates.
class ExperimentError : public Error {
 public:
  ExperimentError(std::vector<std::pair<std::uint64_t, std::string>> failures);
  const std::vector<std::pair<std::uint64_t, std::string>>& failures() const noexcept { return failures_; }

 private:
  std::vector<std::pair<std::uint64_t, std::string>> failures_;
};

/// Evaluates replicates 0..replicates-1 on `workers` threads (0 = one per core).
/// The statistics are stored by replicate index, so the report does not depend
/// on the worker count.
std::vector<double> run_statistics(const Experiment& experiment, unsigned workers);

/// Reduces sorted-or-not statistics to a report (ECDF, quantile table, KS, rejection rate).
McReport summarize(const ExperimentConfig& config, std::vector<double> statistics);

McReport run_experiment(const ExperimentConfig& config, unsigned workers = 1);

/// Rejection rate over delta_grid: every rotated_basis spec in u and v takes each
/// delta in turn; the null design v0 (default: v at delta = 0) is held fixed and
/// replicate streams are shared across grid points.
McReport power_curve(const ExperimentConfig& config, const std::vector<double>& delta_grid, unsigned workers = 1);

struct MeanVarRow {
  double y = 0.0;
  double d = 0.0;
  double a = 0.0;
  double sd = 0.0;
};

/// a(d) and the standard deviation of sqrt(n)(|<v, v_hat>|^2 - a(d)) for u = 1/sqrt(M), v = f_1:
/// sqrt(4 theta^2 + V_E + 4 sqrt(y) kappa3 theta^2 / d + y kappa4 theta^2 / d^2).
std::vector<MeanVarRow> meanvar_curve(const std::vector<double>& y_list, const std::vector<double>& d_grid,
                                      const CumulantSet& noise);

/// Kolmogorov-Smirnov distance between the empirical law of sorted values and N(0, 1).
double ks_distance_normal(const std::vector<double>& sorted);

/// Worker count from RMT_WORKERS, else 1.
unsigned default_workers();

}  // namespace rmt
