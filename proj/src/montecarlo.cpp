#include "rmt/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <thread>

#include "rmt/normal.hpp"

namespace rmt {

namespace {

constexpr Eigen::Index kHalfAspectRatio = 2;  // n = 2 M for the single-vector reference designs

const std::pair<Statistic, const char*> kStatisticNames[] = {
    {Statistic::R_g, "R_g"},   {Statistic::R_dt, "R_dt"}, {Statistic::R_pt, "R_pt"},
    {Statistic::R_st, "R_st"}, {Statistic::T_1g, "T_1g"}, {Statistic::T_1t, "T_1t"},
    {Statistic::S0, "S0"},     {Statistic::S1, "S1"},     {Statistic::S1d, "S1d"},
    {Statistic::raw_overlap, "raw_overlap"},             {Statistic::left_overlap, "left_overlap"},
};

const std::pair<VectorSpec::Kind, const char*> kVectorKindNames[] = {
    {VectorSpec::Kind::uniform, "uniform"},
    {VectorSpec::Kind::alternating, "alternating"},
    {VectorSpec::Kind::basis, "basis"},
    {VectorSpec::Kind::rotated_basis, "rotated_basis"},
    {VectorSpec::Kind::custom, "custom"},
};

bool is_reference_design(Statistic s) {
  return s == Statistic::R_g || s == Statistic::R_dt || s == Statistic::R_pt || s == Statistic::R_st;
}

bool is_z_statistic(Statistic s) { return s == Statistic::S0 || s == Statistic::S1 || s == Statistic::S1d; }

Eigen::MatrixXd build_factor(const std::vector<VectorSpec>& specs, Eigen::Index dim) {
  Eigen::MatrixXd F(dim, static_cast<Eigen::Index>(specs.size()));
  for (std::size_t k = 0; k < specs.size(); ++k) F.col(static_cast<Eigen::Index>(k)) = specs[k].build(dim);
  return F;
}

std::vector<VectorSpec> with_delta(std::vector<VectorSpec> specs, double delta) {
  for (auto& s : specs) {
    if (s.kind == VectorSpec::Kind::rotated_basis) s.delta = delta;
  }
  return specs;
}

}  // namespace

Eigen::VectorXd VectorSpec::build(Eigen::Index dim) const {
  if (dim <= 0) throw InvalidInput("vector dimension must be positive");
  const auto out_of_range = [dim](Eigen::Index i) { return i < 0 || i >= dim; };
  Eigen::VectorXd w = Eigen::VectorXd::Zero(dim);
  switch (kind) {
    case Kind::uniform:
      w.setConstant(1.0 / std::sqrt(static_cast<double>(dim)));
      break;
    case Kind::alternating: {
      if (dim % 2 != 0) throw InvalidInput("the alternating-sign vector needs an even dimension");
      const double h = 1.0 / std::sqrt(static_cast<double>(dim));
      w.head(dim / 2).setConstant(h);
      w.tail(dim / 2).setConstant(-h);
      break;
    }
    case Kind::basis:
      if (out_of_range(index)) throw InvalidInput("basis index out of range");
      w(index) = 1.0;
      break;
    case Kind::rotated_basis:
      if (out_of_range(index) || out_of_range(second) || index == second) {
        throw InvalidInput("rotated_basis needs two distinct indices within range");
      }
      if (!(delta >= 0.0 && delta <= 1.0)) throw InvalidInput("rotated_basis delta must lie in [0, 1]");
      w(index) = std::sqrt(1.0 - delta * delta);
      w(second) = delta;
      break;
    case Kind::custom: {
      if (static_cast<Eigen::Index>(values.size()) != dim) {
        std::ostringstream msg;
        msg << "custom vector has " << values.size() << " entries, expected " << dim;
        throw InvalidInput(msg.str());
      }
      w = Eigen::Map<const Eigen::VectorXd>(values.data(), dim);
      return UnitVector(w).entries();
    }
  }
  return w;
}

std::string to_string(VectorSpec::Kind kind) {
  for (const auto& [k, name] : kVectorKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

VectorSpec::Kind vector_kind_from_string(const std::string& name) {
  for (const auto& [k, n] : kVectorKindNames) {
    if (name == n) return k;
  }
  throw InvalidInput("unknown vector kind '" + name + "'");
}

std::string to_string(Statistic s) {
  for (const auto& [k, name] : kStatisticNames) {
    if (k == s) return name;
  }
  return "unknown";
}

Statistic statistic_from_string(const std::string& name) {
  for (const auto& [k, n] : kStatisticNames) {
    if (name == n) return k;
  }
  throw InvalidInput("unknown statistic '" + name + "'");
}

void ExperimentConfig::validate() const {
  std::ostringstream msg;
  const auto fail = [&msg]() { throw InvalidInput(msg.str()); };
  if (n <= 0 || M <= 0) {
    msg << "dimensions must be positive (M=" << M << ", n=" << n << ")";
    fail();
  }
  const std::size_t r = d.size();
  if (r == 0) {
    msg << "at least one signal strength is required";
    fail();
  }
  if (u.size() != r || v.size() != r || (v0 && v0->size() != r)) {
    msg << "need one u, v (and v0) spec per strength; got " << r << " strengths, " << u.size() << " u, "
        << v.size() << " v";
    fail();
  }
  if (replicates == 0) {
    msg << "replicates must be positive";
    fail();
  }
  if (alpha && !(*alpha > 0.0 && *alpha < 1.0)) {
    msg << "alpha must lie in (0, 1), got " << *alpha;
    fail();
  }
  for (double delta : delta_grid) {
    if (!(delta >= 0.0 && delta < 1.0)) {
      msg << "delta grid values must lie in [0, 1), got " << delta;
      fail();
    }
  }
  if (component >= r) {
    msg << "component " << component << " out of range for rank " << r;
    fail();
  }
  if (is_reference_design(statistic) && (r != 1 || n != kHalfAspectRatio * M)) {
    msg << to_string(statistic) << " is defined for rank 1 at y = 0.5 (n = 2M)";
    fail();
  }
  if ((estimate_strengths || estimate_cumulants) && !is_z_statistic(statistic)) {
    msg << "plug-in estimation applies only to S0, S1 and S1d";
    fail();
  }
}

Experiment::Experiment(ExperimentConfig config)
    : config_((config.validate(), std::move(config))),
      model_(config_.d, build_factor(config_.u, config_.M), build_factor(config_.v, config_.n)),
      null_model_(config_.d, model_.U(), build_factor(config_.v0 ? *config_.v0 : config_.v, config_.n)),
      S_(model_.signal()) {
  const AspectRatio& y = model_.aspect();
  const CumulantSet kappa = config_.noise.cumulants();
  const auto c = config_.component;
  switch (config_.statistic) {
    case Statistic::R_g:
    case Statistic::R_dt:
    case Statistic::R_pt:
    case Statistic::R_st: {
      const double d = config_.d.front();
      center_ = a(d, y);
      if (config_.statistic == Statistic::R_g || config_.statistic == Statistic::R_dt) {
        scale_ = special_sigma_g(d);
      } else if (config_.statistic == Statistic::R_pt) {
        scale_ = special_sigma_t(d);
      } else {
        scale_ = special_sigma_s(d);
      }
      if (config_.statistic == Statistic::R_dt) shift_ = -special_shift_dt(d);
      break;
    }
    case Statistic::T_1g:
    case Statistic::T_1t:
      for (double d : config_.d) center_ += a(d, y);
      scale_ = config_.statistic == Statistic::T_1g ? special_sigma_t1g(config_.d, y)
                                                    : special_sigma_t1t(config_.d, y);
      break;
    case Statistic::raw_overlap:
      center_ = a(config_.d[c], y);
      scale_ = vector_law(null_model_, c, kappa).sd();
      break;
    case Statistic::left_overlap:
      center_ = a_left(config_.d[c], y);
      scale_ = left_law(model_, c, kappa).sd();
      break;
    case Statistic::S0:
    case Statistic::S1:
    case Statistic::S1d:
      break;
  }
}

Eigen::MatrixXd Experiment::observation(std::uint64_t index, Eigen::MatrixXd* noise_out) const {
  if (config_.zero_noise) {
    if (noise_out) *noise_out = Eigen::MatrixXd::Zero(config_.M, config_.n);
    return S_;
  }
  Eigen::MatrixXd Y(config_.M, config_.n);
  config_.noise.fill(std::span<double>(Y.data(), static_cast<std::size_t>(Y.size())),
                     CounterStream(config_.seed, index, StreamTag::noise));
  Y *= 1.0 / std::sqrt(static_cast<double>(config_.n));
  if (noise_out) *noise_out = Y;
  Y += S_;
  return Y;
}

ThinSvd Experiment::spectrum(const Eigen::MatrixXd& Y, std::uint64_t index) const {
  const int r = static_cast<int>(model_.rank());
  Eigen::VectorXd start(Y.cols());
  for (std::uint32_t attempt = 0; attempt < 2; ++attempt) {
    NoiseProfile::gaussian().fill(std::span<double>(start.data(), static_cast<std::size_t>(start.size())),
                                  CounterStream(config_.seed, index, StreamTag::start_vector, attempt));
    if (auto svd = leading_singular_triplets(Y, r, start)) return std::move(*svd);
  }
  ThinSvd full = svd_decompose(Y);
  return {full.singular_values.head(r), full.U.leftCols(r), full.V.leftCols(r)};
}

ReplicateSample Experiment::simulate(std::uint64_t index) const {
  Eigen::MatrixXd Y = observation(index);
  ThinSvd svd = spectrum(Y, index);
  align_signs(svd, model_.V());

  const auto r = static_cast<Eigen::Index>(model_.rank());
  const double root_n = std::sqrt(static_cast<double>(config_.n));
  ReplicateSample out;
  out.mu = svd.mu();
  out.right_overlaps = (svd.V.transpose() * null_model_.V()).array().square();
  out.left_overlaps = (svd.U.transpose() * model_.U()).diagonal().array().square();
  out.projections.resize(r);
  // u_i^T S v_i = d_i, so the noise projections follow from Y without keeping X.
  for (Eigen::Index i = 0; i < r; ++i) {
    out.projections(i) = root_n * (model_.U().col(i).dot(Y * model_.V().col(i)) - config_.d[static_cast<std::size_t>(i)]);
  }
  out.x11 = root_n * (Y(0, 0) - S_(0, 0));

  const auto c = static_cast<Eigen::Index>(config_.component);
  switch (config_.statistic) {
    case Statistic::R_g:
    case Statistic::R_dt:
    case Statistic::R_pt:
    case Statistic::raw_overlap:
      out.statistic = (root_n * (out.right_overlaps(c, c) - center_) - shift_) / scale_;
      break;
    case Statistic::R_st: {
      const double d = config_.d.front();
      out.statistic = (root_n * (out.right_overlaps(0, 0) - center_) - 2.0 / (d * d * d) * out.x11) / scale_;
      break;
    }
    case Statistic::T_1g:
    case Statistic::T_1t:
      out.statistic = root_n * (out.right_overlaps.sum() - center_) / scale_;
      break;
    case Statistic::left_overlap:
      out.statistic = root_n * (out.left_overlaps(c) - center_) / scale_;
      break;
    case Statistic::S0:
    case Statistic::S1:
    case Statistic::S1d: {
      Observation obs;
      obs.known_U = model_.U();
      if (!config_.estimate_strengths) obs.known_D = config_.d;
      if (!config_.estimate_cumulants) obs.noise = config_.noise.cumulants();
      obs.Y = std::move(Y);
      const double level = config_.alpha.value_or(0.05);
      const TestOutcome t =
          config_.statistic == Statistic::S0
              ? test_vector(obs, svd, config_.component, UnitVector(null_model_.V().col(c)), level)
              : test_subspace(obs, svd, null_model_.V(), level,
                              config_.statistic == Statistic::S1 ? SubspaceVariant::S1 : SubspaceVariant::S1d);
      out.statistic = t.z;
      break;
    }
  }
  return out;
}

double run_replicate(const ExperimentConfig& config, std::uint64_t index) {
  return Experiment(config).run_replicate(index);
}

namespace {

std::string describe_failures(const std::vector<std::pair<std::uint64_t, std::string>>& failures) {
  std::ostringstream msg;
  msg << failures.size() << " replicate(s) failed";
  const std::size_t shown = std::min<std::size_t>(failures.size(), 5);
  for (std::size_t k = 0; k < shown; ++k) msg << "; #" << failures[k].first << ": " << failures[k].second;
  if (shown < failures.size()) msg << "; ...";
  return msg.str();
}

}  // namespace

ExperimentError::ExperimentError(std::vector<std::pair<std::uint64_t, std::string>> failures)
    : Error(describe_failures(failures)), failures_(std::move(failures)) {}

std::vector<double> run_statistics(const Experiment& experiment, unsigned workers) {
  const std::size_t count = experiment.config().replicates;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));

  std::vector<double> values(count);
  std::vector<std::pair<std::uint64_t, std::string>> failures;
  std::mutex failure_lock;
  std::atomic<std::size_t> next{0};

  const auto work = [&]() {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        values[i] = experiment.run_replicate(i);
      } catch (const std::exception& e) {
        const std::lock_guard<std::mutex> guard(failure_lock);
        failures.emplace_back(i, e.what());
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (!failures.empty()) {
    std::sort(failures.begin(), failures.end());
    throw ExperimentError(std::move(failures));
  }
  return values;
}

double ks_distance_normal(const std::vector<double>& sorted) {
  const double count = static_cast<double>(sorted.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double F = normal_cdf(sorted[i]);
    worst = std::max({worst, static_cast<double>(i + 1) / count - F, F - static_cast<double>(i) / count});
  }
  return worst;
}

McReport summarize(const ExperimentConfig& config, std::vector<double> statistics) {
  McReport report;
  report.config = config;
  report.seed = config.seed;
  report.simulation_only = config.statistic == Statistic::R_st;
  std::sort(statistics.begin(), statistics.end());
  const double count = static_cast<double>(statistics.size());
  for (double q : report_quantiles()) {
    // Closed on the right: ties with the normal quantile count as "<=".
    const auto hits = std::upper_bound(statistics.begin(), statistics.end(), normal_quantile(q)) - statistics.begin();
    report.quantile_table.push_back(static_cast<double>(hits) / count);
  }
  report.ks_distance = statistics.empty() ? 0.0 : ks_distance_normal(statistics);
  if (config.alpha) {
    const double critical = two_sided_critical(*config.alpha);
    const auto rejected =
        std::count_if(statistics.begin(), statistics.end(), [critical](double s) { return std::abs(s) > critical; });
    report.rejection_rate = static_cast<double>(rejected) / count;
  }
  report.ecdf = std::move(statistics);
  return report;
}

namespace {

void require_reporting_size(const ExperimentConfig& config) {
  if (config.replicates < kMinReportReplicates) {
    std::ostringstream msg;
    msg << "reports need at least " << kMinReportReplicates << " replicates, got " << config.replicates;
    throw InvalidInput(msg.str());
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

McReport run_experiment(const ExperimentConfig& config, unsigned workers) {
  const auto start = std::chrono::steady_clock::now();
  require_reporting_size(config);
  const Experiment experiment(config);
  McReport report = summarize(config, run_statistics(experiment, workers));
  report.runtime_seconds = seconds_since(start);
  return report;
}

McReport power_curve(const ExperimentConfig& config, const std::vector<double>& delta_grid, unsigned workers) {
  const auto start = std::chrono::steady_clock::now();
  require_reporting_size(config);
  if (!config.alpha) throw InvalidInput("a power curve needs alpha");
  if (delta_grid.empty()) throw InvalidInput("a power curve needs a non-empty delta grid");

  ExperimentConfig base = config;
  base.delta_grid = delta_grid;
  if (!base.v0) base.v0 = with_delta(config.v, 0.0);
  base.validate();

  McReport report;
  for (std::size_t k = 0; k < delta_grid.size(); ++k) {
    ExperimentConfig point = base;
    point.u = with_delta(base.u, delta_grid[k]);
    point.v = with_delta(base.v, delta_grid[k]);
    McReport one = summarize(point, run_statistics(Experiment(point), workers));
    if (k == 0) {
      // The ECDF and quantile table describe the first grid point.
      report = std::move(one);
      report.config = base;
    }
    report.power_points.push_back({delta_grid[k], k == 0 ? *report.rejection_rate : *one.rejection_rate});
  }
  report.rejection_rate.reset();
  auto sorted = report.power_points;
  std::stable_sort(sorted.begin(), sorted.end(), [](const PowerPoint& a, const PowerPoint& b) { return a.delta < b.delta; });
  report.power_monotone = std::is_sorted(sorted.begin(), sorted.end(),
                                         [](const PowerPoint& a, const PowerPoint& b) { return a.power < b.power; });
  report.runtime_seconds = seconds_since(start);
  return report;
}

bool same_results(const McReport& a, const McReport& b) {
  return a.ecdf == b.ecdf && a.quantile_table == b.quantile_table && a.ks_distance == b.ks_distance &&
         a.rejection_rate == b.rejection_rate && a.power_points == b.power_points &&
         a.power_monotone == b.power_monotone && a.simulation_only == b.simulation_only && a.seed == b.seed;
}

std::vector<MeanVarRow> meanvar_curve(const std::vector<double>& y_list, const std::vector<double>& d_grid,
                                      const CumulantSet& noise) {
  std::vector<MeanVarRow> rows;
  rows.reserve(y_list.size() * d_grid.size());
  for (double yv : y_list) {
    const AspectRatio y(yv);
    for (double d : d_grid) {
      if (!is_supercritical(d, y)) {
        std::ostringstream msg;
        msg << "d=" << d << " is not supercritical for y=" << yv;
        throw DomainError(msg.str());
      }
      const double th = theta(d, y);
      const double var = 4.0 * th * th + v_E(d, y) + 4.0 * std::sqrt(yv) * noise.kappa3 * th * th / d +
                         yv * noise.kappa4 * th * th / (d * d);
      if (!(var > 0.0)) throw RegimeError("meanvar_curve: non-positive variance");
      rows.push_back({yv, d, a(d, y), std::sqrt(var)});
    }
  }
  return rows;
}

unsigned default_workers() {
  const char* env = std::getenv("RMT_WORKERS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long value = std::strtol(env, &end, 10);
  if (*end != '\0' || value < 1 || value > 4096) {
    throw InvalidInput(std::string("RMT_WORKERS must be a positive integer, got '") + env + "'");
  }
  return static_cast<unsigned>(value);
}

}  // namespace rmt
