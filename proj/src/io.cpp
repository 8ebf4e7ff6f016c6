#include "rmt/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "rmt/error.hpp"

namespace rmt {

using nlohmann::json;

namespace fs = std::filesystem;

// --- CSV -------------------------------------------------------------------

namespace {

double parse_field(const std::string& field, const fs::path& path, std::size_t line) {
  const auto first = field.find_first_not_of(" \t\r");
  const auto last = field.find_last_not_of(" \t\r");
  if (first == std::string::npos) {
    std::ostringstream msg;
    msg << path.string() << ":" << line << ": empty field";
    throw InvalidInput(msg.str());
  }
  const std::string token = field.substr(first, last - first + 1);
  char* end = nullptr;
  errno = 0;
  const double value = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size() || errno == ERANGE || !std::isfinite(value)) {
    std::ostringstream msg;
    msg << path.string() << ":" << line << ": '" << token << "' is not a finite decimal number";
    throw InvalidInput(msg.str());
  }
  return value;
}

}  // namespace

Eigen::MatrixXd read_matrix_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open matrix file " + path.string());
  std::vector<double> values;
  std::size_t cols = 0, rows = 0, line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::size_t fields = 0;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      values.push_back(parse_field(field, path, line_no));
      ++fields;
    }
    if (!line.empty() && line.back() == ',') values.push_back(parse_field("", path, line_no));
    if (rows == 0) {
      cols = fields;
    } else if (fields != cols) {
      std::ostringstream msg;
      msg << path.string() << ":" << line_no << ": expected " << cols << " fields, found " << fields;
      throw InvalidInput(msg.str());
    }
    ++rows;
  }
  if (rows == 0) throw InvalidInput("matrix file " + path.string() + " is empty");
  Eigen::MatrixXd A(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * cols + j];
    }
  }
  return A;
}

std::string format_matrix_csv(const Eigen::MatrixXd& A) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (j > 0) out << ',';
      out << A(i, j);
    }
    out << '\n';
  }
  return out.str();
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      out.close();
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw InvalidInput("failed while writing " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw InvalidInput("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

// --- JSON ------------------------------------------------------------------

namespace {

void only_keys(const json& j, std::initializer_list<const char*> allowed, const char* what) {
  if (!j.is_object()) throw InvalidInput(std::string(what) + " must be a JSON object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!keys.count(key)) throw InvalidInput(std::string(what) + ": unknown key '" + key + "'");
  }
}

template <class T>
T get(const json& j, const char* key, const char* what) {
  if (!j.contains(key)) throw InvalidInput(std::string(what) + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidInput(std::string(what) + ": key '" + key + "': " + e.what());
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const char* what) {
  return j.contains(key) ? get<T>(j, key, what) : fallback;
}

std::vector<VectorSpec> specs_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw InvalidInput(std::string(what) + " must be an array of vector specs");
  std::vector<VectorSpec> out;
  for (const auto& item : j) out.push_back(vector_spec_from_json(item));
  return out;
}

json specs_to_json(const std::vector<VectorSpec>& specs) {
  json out = json::array();
  for (const auto& s : specs) out.push_back(to_json(s));
  return out;
}

}  // namespace

json to_json(const VectorSpec& spec) {
  json j{{"kind", to_string(spec.kind)}};
  switch (spec.kind) {
    case VectorSpec::Kind::basis:
      j["index"] = spec.index;
      break;
    case VectorSpec::Kind::rotated_basis:
      j["index"] = spec.index;
      j["second"] = spec.second;
      j["delta"] = spec.delta;
      break;
    case VectorSpec::Kind::custom:
      j["values"] = spec.values;
      break;
    default:
      break;
  }
  return j;
}

VectorSpec vector_spec_from_json(const json& j) {
  only_keys(j, {"kind", "index", "second", "delta", "values"}, "vector spec");
  const auto kind = vector_kind_from_string(get<std::string>(j, "kind", "vector spec"));
  switch (kind) {
    case VectorSpec::Kind::uniform:
      return VectorSpec::uniform();
    case VectorSpec::Kind::alternating:
      return VectorSpec::alternating();
    case VectorSpec::Kind::basis:
      return VectorSpec::basis(get<Eigen::Index>(j, "index", "basis spec"));
    case VectorSpec::Kind::rotated_basis:
      return VectorSpec::rotated_basis(get<Eigen::Index>(j, "index", "rotated_basis spec"),
                                       get<Eigen::Index>(j, "second", "rotated_basis spec"),
                                       get<double>(j, "delta", "rotated_basis spec"));
    case VectorSpec::Kind::custom:
      return VectorSpec::custom(get<std::vector<double>>(j, "values", "custom spec"));
  }
  throw InvalidInput("unreachable vector kind");
}

json to_json(const NoiseProfile& noise) {
  json j{{"kind", noise.name()}};
  if (noise.kind() == NoiseKind::custom) {
    j["atoms"] = noise.atoms();
    j["weights"] = noise.weights();
  }
  return j;
}

NoiseProfile noise_from_json(const json& j) {
  only_keys(j, {"kind", "atoms", "weights"}, "noise");
  const auto kind = get<std::string>(j, "kind", "noise");
  if (kind == "gaussian") return NoiseProfile::gaussian();
  if (kind == "two_point") return NoiseProfile::two_point();
  if (kind == "custom") {
    return NoiseProfile::custom(get<std::vector<double>>(j, "atoms", "noise"),
                                get<std::vector<double>>(j, "weights", "noise"));
  }
  throw InvalidInput("unknown noise kind '" + kind + "'");
}

json to_json(const ExperimentConfig& c) {
  json j{{"n", c.n},
         {"M", c.M},
         {"d", c.d},
         {"u", specs_to_json(c.u)},
         {"v", specs_to_json(c.v)},
         {"noise", to_json(c.noise)},
         {"statistic", to_string(c.statistic)},
         {"replicates", c.replicates},
         {"seed", c.seed},
         {"delta_grid", c.delta_grid},
         {"estimate_strengths", c.estimate_strengths},
         {"estimate_cumulants", c.estimate_cumulants},
         {"component", c.component},
         {"zero_noise", c.zero_noise}};
  if (c.v0) j["v0"] = specs_to_json(*c.v0);
  if (c.alpha) j["alpha"] = *c.alpha;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  constexpr const char* what = "experiment config";
  only_keys(j,
            {"n", "M", "d", "u", "v", "v0", "noise", "statistic", "replicates", "seed", "alpha", "delta_grid",
             "estimate_strengths", "estimate_cumulants", "component", "zero_noise"},
            what);
  ExperimentConfig c;
  c.n = get<Eigen::Index>(j, "n", what);
  c.M = get<Eigen::Index>(j, "M", what);
  c.d = get<std::vector<double>>(j, "d", what);
  if (!j.contains("u") || !j.contains("v")) throw InvalidInput("experiment config: u and v are required");
  c.u = specs_from_json(j.at("u"), "u");
  c.v = specs_from_json(j.at("v"), "v");
  if (j.contains("v0")) c.v0 = specs_from_json(j.at("v0"), "v0");
  c.noise = j.contains("noise") ? noise_from_json(j.at("noise")) : NoiseProfile::gaussian();
  c.statistic = statistic_from_string(get<std::string>(j, "statistic", what));
  c.replicates = get_or<std::size_t>(j, "replicates", kDefaultReplicates, what);
  c.seed = get<std::uint64_t>(j, "seed", what);
  if (j.contains("alpha")) c.alpha = get<double>(j, "alpha", what);
  c.delta_grid = get_or<std::vector<double>>(j, "delta_grid", {}, what);
  c.estimate_strengths = get_or<bool>(j, "estimate_strengths", false, what);
  c.estimate_cumulants = get_or<bool>(j, "estimate_cumulants", false, what);
  c.component = get_or<std::size_t>(j, "component", 0, what);
  c.zero_noise = get_or<bool>(j, "zero_noise", false, what);
  c.validate();
  return c;
}

json to_json(const McReport& r) {
  json quantiles = json::array();
  for (std::size_t k = 0; k < r.quantile_table.size(); ++k) {
    quantiles.push_back({{"q", report_quantiles().at(k)}, {"p", r.quantile_table[k]}});
  }
  json power = json::array();
  for (const auto& pt : r.power_points) power.push_back({{"delta", pt.delta}, {"power", pt.power}});
  json j{{"config", to_json(r.config)},
         {"ecdf", r.ecdf},
         {"quantile_table", quantiles},
         {"ks_distance", r.ks_distance},
         {"power_points", power},
         {"power_monotone", r.power_monotone},
         {"simulation_only", r.simulation_only},
         {"runtime_seconds", r.runtime_seconds},
         {"seed", r.seed}};
  j["rejection_rate"] = r.rejection_rate ? json(*r.rejection_rate) : json(nullptr);
  return j;
}

McReport report_from_json(const json& j) {
  constexpr const char* what = "report";
  only_keys(j,
            {"config", "ecdf", "quantile_table", "ks_distance", "rejection_rate", "power_points", "power_monotone",
             "simulation_only", "runtime_seconds", "seed"},
            what);
  McReport r;
  if (!j.contains("config")) throw InvalidInput("report: missing key 'config'");
  r.config = config_from_json(j.at("config"));
  r.ecdf = get<std::vector<double>>(j, "ecdf", what);
  for (const auto& row : get<json>(j, "quantile_table", what)) r.quantile_table.push_back(get<double>(row, "p", what));
  r.ks_distance = get<double>(j, "ks_distance", what);
  if (j.contains("rejection_rate") && !j.at("rejection_rate").is_null()) {
    r.rejection_rate = get<double>(j, "rejection_rate", what);
  }
  for (const auto& pt : get<json>(j, "power_points", what)) {
    r.power_points.push_back({get<double>(pt, "delta", what), get<double>(pt, "power", what)});
  }
  r.power_monotone = get<bool>(j, "power_monotone", what);
  r.simulation_only = get<bool>(j, "simulation_only", what);
  r.runtime_seconds = get<double>(j, "runtime_seconds", what);
  r.seed = get<std::uint64_t>(j, "seed", what);
  return r;
}

json to_json(const CumulantSet& k) {
  return {{"kappa2", k.kappa2}, {"kappa3", k.kappa3}, {"kappa4", k.kappa4}};
}

json to_json(const AsymptoticLaw& law) {
  return {{"center", law.center},
          {"mean_shift", law.mean_shift},
          {"linear_coeffs", law.linear_coeffs},
          {"linear_variance", law.linear_variance()},
          {"gaussian_var", law.gaussian_var},
          {"total_variance", law.total_variance()},
          {"delta_gaussian", law.delta_gaussian}};
}

json to_json(const TestOutcome& t) {
  return {{"test", t.test},
          {"statistic", t.statistic},
          {"z", t.z},
          {"p_value", t.p_value},
          {"reject", t.reject},
          {"alpha", t.alpha},
          {"law", to_json(t.law)},
          {"nuisance",
           {{"strengths", to_string(t.nuisance.strengths)},
            {"d", t.nuisance.d},
            {"cumulants", to_string(t.nuisance.cumulants)},
            {"noise", to_json(t.nuisance.noise)}}}};
}

}  // namespace rmt
