#include "rmt/designs.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "rmt/error.hpp"
#include "rmt_reference_json.hpp"

namespace rmt {

namespace {

bool close(double a, double b) { return std::abs(a - b) < 1e-9; }

Eigen::Index rows_for(double y, Eigen::Index n) {
  const double M = y * static_cast<double>(n);
  const auto rounded = static_cast<Eigen::Index>(std::llround(M));
  if (std::abs(M - static_cast<double>(rounded)) > 1e-9 || rounded <= 0) {
    std::ostringstream msg;
    msg << "y=" << y << " and n=" << n << " do not give an integer row count";
    throw InvalidInput(msg.str());
  }
  return rounded;
}

struct ReferenceData {
  int version = 0;
  std::vector<ReferenceCell> cells;
};

const ReferenceData& reference_data() {
  static const ReferenceData data = [] {
    const auto doc = nlohmann::json::parse(kReferenceTablesJson);
    ReferenceData out;
    out.version = doc.at("version").get<int>();
    for (const auto& j : doc.at("cells")) {
      ReferenceCell c;
      c.table = j.at("table").get<std::string>();
      c.row = j.at("row").get<std::string>();
      c.column = j.at("column").get<std::string>();
      c.value = j.at("value").get<double>();
      if (j.contains("se")) c.se = j.at("se").get<double>();
      c.n = j.at("n").get<long>();
      c.d = j.value("d", 0.0);
      c.q = j.value("q", 0.0);
      c.y = j.value("y", 0.0);
      c.alpha = j.value("alpha", 0.0);
      c.noise = j.value("noise", std::string{});
      c.suspect = j.value("suspect", false);
      c.note = j.value("note", std::string{});
      out.cells.push_back(std::move(c));
    }
    return out;
  }();
  return data;
}

}  // namespace

std::string to_string(ReferenceTable t) {
  switch (t) {
    case ReferenceTable::s1:
      return "s1";
    case ReferenceTable::s2:
      return "s2";
    case ReferenceTable::s3:
      return "s3";
    case ReferenceTable::s4:
      return "s4";
    case ReferenceTable::s5:
      return "s5";
  }
  return "unknown";
}

ReferenceTable reference_table_from_string(const std::string& name) {
  for (auto t : {ReferenceTable::s1, ReferenceTable::s2, ReferenceTable::s3, ReferenceTable::s4, ReferenceTable::s5}) {
    if (to_string(t) == name) return t;
  }
  throw InvalidInput("unknown table '" + name + "' (expected s1, s2, s3, s4 or s5)");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t cell) {
  // SplitMix64 finalizer over the pair; distinct cells get unrelated keys.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (cell + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t cell_seed(std::uint64_t seed, std::string_view label) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return derive_seed(seed, h);
}

ExperimentConfig quantile_design(ReferenceTable table, double d, Eigen::Index n, std::size_t replicates,
                                 std::uint64_t seed) {
  if (n % 2 != 0) throw InvalidInput("the quantile designs need an even n (M = n / 2)");
  ExperimentConfig c;
  c.n = n;
  c.M = n / 2;
  c.d = {d};
  c.replicates = replicates;
  c.seed = seed;
  switch (table) {
    case ReferenceTable::s1:
      c.statistic = Statistic::R_g;
      c.noise = NoiseProfile::gaussian();
      c.u = {VectorSpec::basis(0)};
      c.v = {VectorSpec::basis(0)};
      break;
    case ReferenceTable::s2:
      c.statistic = Statistic::R_dt;
      c.noise = NoiseProfile::two_point();
      c.u = {VectorSpec::uniform()};
      c.v = {VectorSpec::uniform()};
      break;
    case ReferenceTable::s3:
      c.statistic = Statistic::R_pt;
      c.noise = NoiseProfile::two_point();
      c.u = {VectorSpec::uniform()};
      c.v = {VectorSpec::basis(0)};
      break;
    case ReferenceTable::s4:
      c.statistic = Statistic::R_st;
      c.noise = NoiseProfile::two_point();
      c.u = {VectorSpec::basis(0)};
      c.v = {VectorSpec::basis(0)};
      break;
    case ReferenceTable::s5:
      throw InvalidInput("table s5 is a type-I error table; use subspace_design");
  }
  c.validate();
  return c;
}

ExperimentConfig subspace_design(double y, const NoiseProfile& noise, Eigen::Index n, std::size_t replicates,
                                 std::uint64_t seed) {
  ExperimentConfig c;
  c.n = n;
  c.M = rows_for(y, n);
  c.d = {5.0, 3.0};
  c.u = {VectorSpec::uniform(), VectorSpec::alternating()};
  c.v = {VectorSpec::basis(0), VectorSpec::basis(1)};
  c.noise = noise;
  c.statistic = noise.kind() == NoiseKind::gaussian ? Statistic::T_1g : Statistic::T_1t;
  c.replicates = replicates;
  c.seed = seed;
  c.alpha = 0.05;
  c.validate();
  return c;
}

ExperimentConfig power_design(double y, Eigen::Index n, std::size_t replicates, std::uint64_t seed, double alpha) {
  ExperimentConfig c = subspace_design(y, NoiseProfile::two_point(), n, replicates, seed);
  c.v = {VectorSpec::basis(0), VectorSpec::rotated_basis(1, 2, 0.0)};
  c.v0 = std::vector<VectorSpec>{VectorSpec::basis(0), VectorSpec::basis(1)};
  c.alpha = alpha;
  c.validate();
  return c;
}

int reference_version() { return reference_data().version; }

const std::vector<ReferenceCell>& reference_cells() { return reference_data().cells; }

const ReferenceCell* find_quantile_cell(ReferenceTable table, long n, double d, double q) {
  const std::string name = to_string(table);
  for (const auto& c : reference_cells()) {
    if (c.table == name && c.n == n && close(c.d, d) && close(c.q, q)) return &c;
  }
  return nullptr;
}

const ReferenceCell* find_type_one_cell(double y, const std::string& noise, double alpha, long n) {
  for (const auto& c : reference_cells()) {
    if (c.table == "s5" && c.n == n && close(c.y, y) && close(c.alpha, alpha) && c.noise == noise) return &c;
  }
  return nullptr;
}

}  // namespace rmt
