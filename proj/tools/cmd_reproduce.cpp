// `reproduce`: regenerate the reference tables and the plot data of the figures.

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "cli.hpp"
#include "manifest.hpp"
#include "rmt/designs.hpp"
#include "rmt/error.hpp"
#include "rmt/io.hpp"

namespace rmt::cli {

namespace {

constexpr double kQuantileTolerance = 0.03;
constexpr double kTypeOneTolerance = 0.02;

std::string fmt(double x, int digits = 6) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

std::string num(double x) {
  std::ostringstream s;
  s << x;
  return s.str();
}

/// Tolerances are stated at 10^4 replicates and widen like the Monte Carlo error.
double widen(std::size_t reps) {
  return std::sqrt(std::max(1.0, static_cast<double>(kDefaultReplicates) / static_cast<double>(reps)));
}

struct Deviation {
  std::string table, row, column;
  double produced = 0.0, reference = 0.0;
  double deviation() const { return std::abs(produced - reference); }
};

/// Comparison of produced cells against the embedded reference values.
class CheckReport {
 public:
  CheckReport(double tolerance, double factor) : tolerance_(tolerance * factor), factor_(factor) {}

  void compare(const ReferenceCell* ref, double produced) {
    if (ref == nullptr) return;
    if (ref->suspect) {
      ++skipped_;
      return;
    }
    cells_.push_back({ref->table, ref->row, ref->column, produced, ref->value});
  }

  bool passed() const {
    return std::all_of(cells_.begin(), cells_.end(), [&](const Deviation& c) { return c.deviation() <= tolerance_; });
  }

  const Deviation* worst() const {
    const auto it = std::max_element(cells_.begin(), cells_.end(),
                                     [](const Deviation& a, const Deviation& b) { return a.deviation() < b.deviation(); });
    return it == cells_.end() ? nullptr : &*it;
  }

  std::string csv() const {
    std::ostringstream s;
    s << "table,row,column,produced,reference,abs_deviation,tolerance,pass\n";
    for (const auto& c : cells_) {
      s << c.table << "," << c.row << ",\"" << c.column << "\"," << fmt(c.produced) << "," << num(c.reference) << ","
        << fmt(c.deviation()) << "," << fmt(tolerance_) << "," << (c.deviation() <= tolerance_ ? "yes" : "no")
        << "\n";
    }
    return s.str();
  }

  nlohmann::json summary() const {
    nlohmann::json j{{"cells_compared", cells_.size()},
                     {"cells_skipped_suspect", skipped_},
                     {"tolerance", tolerance_},
                     {"tolerance_widening", factor_},
                     {"passed", passed()}};
    if (const auto* w = worst()) {
      j["max_abs_deviation"] = w->deviation();
      j["worst_cell"] = {{"table", w->table}, {"row", w->row}, {"column", w->column}};
    }
    return j;
  }

  void print(std::ostream& out) const {
    out << "check: " << cells_.size() << " cells compared";
    if (skipped_ > 0) out << " (" << skipped_ << " suspect cell(s) skipped)";
    out << ", tolerance " << fmt(tolerance_, 4);
    if (factor_ > 1.0) out << " (widened x" << fmt(factor_, 3) << " for the replicate count)";
    out << "\n";
    if (const auto* w = worst()) {
      out << "check: max abs deviation " << fmt(w->deviation(), 4) << " at " << w->table << " row " << w->row
          << " column " << w->column << "\n";
    }
    out << "check: " << (passed() ? "PASS" : "FAIL") << "\n";
  }

  bool empty() const noexcept { return cells_.empty(); }

 private:
  double tolerance_;
  double factor_;
  std::vector<Deviation> cells_;
  std::size_t skipped_ = 0;
};

std::vector<long> sizes_or_default(const ReproduceOptions& o) {
  return o.n.empty() ? std::vector<long>{200, 500} : o.n;
}

std::uint64_t require_seed(const ReproduceOptions& o) {
  if (!o.seed) throw InvalidInput("this target is randomized: --seed is required");
  return *o.seed;
}

std::size_t replicates(const ReproduceOptions& o) { return o.reps == 0 ? kDefaultReplicates : o.reps; }

int finish(RunManifest& manifest, const std::filesystem::path& manifest_path, std::optional<CheckReport>& check,
           const std::filesystem::path& check_path, std::ostream& out) {
  if (check) {
    if (check->empty()) throw InvalidInput("--check: no reference values exist for the requested sizes");
    manifest.set("check", check->summary());
    manifest.stage(check_path, check->csv());
  }
  manifest.commit(manifest_path);
  for (const auto& o : manifest.document().at("outputs")) out << "wrote " << o.at("path").get<std::string>() << "\n";
  out << "wrote " << manifest_path.string() << "\n";
  if (check) {
    check->print(out);
    return check->passed() ? kOk : kReject;
  }
  return kOk;
}

int reproduce_quantile_table(const ReproduceOptions& o, ReferenceTable table, const std::string& command,
                             std::ostream& out) {
  const std::uint64_t seed = require_seed(o);
  const std::size_t reps = replicates(o);
  const auto sizes = sizes_or_default(o);
  const auto& ds = reference_strengths();
  const std::string name = to_string(table);

  RunManifest manifest(command, seed);
  std::optional<CheckReport> check;
  if (o.check) check.emplace(kQuantileTolerance, widen(reps));

  // results[k][j] = quantile_table of size k, strength j
  std::vector<std::vector<std::vector<double>>> results(sizes.size());
  bool simulation_only = false;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    for (double d : ds) {
      const std::string label = name + "/n=" + std::to_string(sizes[k]) + ",d=" + num(d);
      const ExperimentConfig config = quantile_design(table, d, sizes[k], reps, cell_seed(seed, label));
      out << "running " << label << " (" << reps << " replicates)" << std::endl;
      const McReport report = run_experiment(config, o.workers);
      simulation_only = simulation_only || report.simulation_only;
      manifest.add_config(label, to_json(config));
      results[k].push_back(report.quantile_table);
      for (std::size_t qi = 0; qi < report_quantiles().size(); ++qi) {
        if (check) check->compare(find_quantile_cell(table, sizes[k], d, report_quantiles()[qi]), report.quantile_table[qi]);
      }
    }
  }

  std::ostringstream csv;
  csv << "q";
  for (long n : sizes) {
    for (double d : ds) csv << ",n=" << n << " d=" << num(d);
    csv << ",n=" << n << " se";
  }
  csv << "\n";
  for (std::size_t qi = 0; qi < report_quantiles().size(); ++qi) {
    csv << fmt(report_quantiles()[qi], 2);
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      double se = 0.0;
      for (const auto& column : results[k]) {
        const double p = column[qi];
        csv << "," << fmt(p, 4);
        se = std::max(se, std::sqrt(p * (1.0 - p) / static_cast<double>(reps)));
      }
      csv << "," << fmt(se, 4);
    }
    csv << "\n";
  }

  manifest.set("target", "table " + name);
  manifest.set("replicates", reps);
  manifest.set("simulation_only", simulation_only);
  manifest.set("se_column", "largest binomial Monte Carlo standard error sqrt(p(1-p)/reps) over the row");
  const auto base = o.out / ("table_" + name);
  manifest.stage(base.string() + ".csv", csv.str());
  return finish(manifest, base.string() + ".manifest.json", check, base.string() + ".check.csv", out);
}

int reproduce_type_one_table(const ReproduceOptions& o, const std::string& command, std::ostream& out) {
  const std::uint64_t seed = require_seed(o);
  const std::size_t reps = replicates(o);
  const auto sizes = sizes_or_default(o);
  const std::vector<NoiseProfile> noises{NoiseProfile::gaussian(), NoiseProfile::two_point()};

  RunManifest manifest(command, seed);
  std::optional<CheckReport> check;
  if (o.check) check.emplace(kTypeOneTolerance, widen(reps));

  std::ostringstream csv;
  csv << "y";
  for (const auto& noise : noises) {
    for (double alpha : reference_alphas()) {
      for (long n : sizes) csv << "," << noise.name() << " alpha=" << num(alpha) << " n=" << n;
    }
  }
  csv << "\n";

  for (double y : reference_aspects()) {
    csv << "y=" << num(y);
    for (const auto& noise : noises) {
      std::vector<std::vector<double>> rates(reference_alphas().size());
      for (long n : sizes) {
        const std::string label = "s5/" + noise.name() + ",y=" + num(y) + ",n=" + std::to_string(n);
        ExperimentConfig config = subspace_design(y, noise, n, reps, cell_seed(seed, label));
        out << "running " << label << " (" << reps << " replicates)" << std::endl;
        const McReport report = run_experiment(config, o.workers);
        manifest.add_config(label, to_json(config));
        for (std::size_t ai = 0; ai < reference_alphas().size(); ++ai) {
          config.alpha = reference_alphas()[ai];
          const double rate = *summarize(config, report.ecdf).rejection_rate;
          rates[ai].push_back(rate);
          if (check) check->compare(find_type_one_cell(y, noise.name(), reference_alphas()[ai], n), rate);
        }
      }
      for (const auto& row : rates) {
        for (double rate : row) csv << "," << fmt(rate, 4);
      }
    }
    csv << "\n";
  }

  manifest.set("target", "table s5");
  manifest.set("replicates", reps);
  const auto base = o.out / "table_s5";
  manifest.stage(base.string() + ".csv", csv.str());
  return finish(manifest, base.string() + ".manifest.json", check, base.string() + ".check.csv", out);
}

int reproduce_power(const ReproduceOptions& o, const std::string& command, std::ostream& out) {
  const std::uint64_t seed = require_seed(o);
  const std::size_t reps = replicates(o);
  const auto sizes = sizes_or_default(o);
  std::vector<double> grid;
  for (int k = 0; k <= 9; ++k) grid.push_back(k / 10.0);

  RunManifest manifest(command, seed);
  std::ostringstream csv;
  csv << "y,n,delta,power\n";
  for (double y : reference_aspects()) {
    for (long n : sizes) {
      const std::string label = "power/y=" + num(y) + ",n=" + std::to_string(n);
      const ExperimentConfig config = power_design(y, n, reps, cell_seed(seed, label));
      out << "running " << label << " (" << reps << " replicates x " << grid.size() << " deltas)" << std::endl;
      const McReport report = power_curve(config, grid, o.workers);
      manifest.add_config(label, to_json(report.config));
      for (const auto& p : report.power_points) csv << num(y) << "," << n << "," << fmt(p.delta, 1) << "," << fmt(p.power, 4) << "\n";
    }
  }
  manifest.set("target", "figure power");
  manifest.set("replicates", reps);
  const auto base = o.out / "figure_power";
  manifest.stage(base.string() + ".csv", csv.str());
  std::optional<CheckReport> none;
  return finish(manifest, base.string() + ".manifest.json", none, {}, out);
}

int reproduce_meanvar(const ReproduceOptions& o, const std::string& command, std::ostream& out) {
  const std::vector<double> ys{0.1, 0.5, 5.0, 10.0};
  std::vector<double> ds;
  for (int k = 0; k <= 40; ++k) ds.push_back(3.0 + 0.25 * k);
  const auto gaussian = meanvar_curve(ys, ds, CumulantSet::gaussian());
  const auto two_point = meanvar_curve(ys, ds, CumulantSet::two_point());

  std::ostringstream csv;
  csv << std::setprecision(17);
  csv << "y,d,a,sd_gaussian,sd_two_point\n";
  for (std::size_t k = 0; k < gaussian.size(); ++k) {
    csv << num(gaussian[k].y) << "," << num(gaussian[k].d) << "," << gaussian[k].a << "," << gaussian[k].sd << ","
        << two_point[k].sd << "\n";
  }

  RunManifest manifest(command, std::nullopt);
  manifest.set("target", "figure meanvar");
  manifest.set("aspect_ratios", ys);
  manifest.set("strengths", ds);
  const auto base = o.out / "figure_meanvar";
  manifest.stage(base.string() + ".csv", csv.str());
  std::optional<CheckReport> none;
  return finish(manifest, base.string() + ".manifest.json", none, {}, out);
}

}  // namespace

int cmd_reproduce(const ReproduceOptions& o, const std::string& command, std::ostream& out) {
  if (o.table.has_value() == o.figure.has_value()) throw InvalidInput("give exactly one of --table or --figure");
  if (o.reps != 0 && o.reps < kMinReportReplicates) {
    throw InvalidInput("--reps must be at least " + std::to_string(kMinReportReplicates));
  }
  if (o.figure) {
    if (o.check) throw InvalidInput("--check applies to tables only");
    if (*o.figure == "power") return reproduce_power(o, command, out);
    if (*o.figure == "meanvar") return reproduce_meanvar(o, command, out);
    throw InvalidInput("unknown figure '" + *o.figure + "' (expected power or meanvar)");
  }
  const ReferenceTable table = reference_table_from_string(*o.table);
  if (table == ReferenceTable::s5) return reproduce_type_one_table(o, command, out);
  return reproduce_quantile_table(o, table, command, out);
}

}  // namespace rmt::cli
