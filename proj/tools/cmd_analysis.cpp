// `laws` and `test`: analyses of user-supplied parameters and matrices.

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "cli.hpp"
#include "rmt/error.hpp"
#include "rmt/inference.hpp"
#include "rmt/io.hpp"
#include "rmt/laws.hpp"

namespace rmt::cli {

namespace {

Eigen::VectorXd read_vector(const std::filesystem::path& path) {
  const Eigen::MatrixXd A = read_matrix_csv(path);
  if (A.cols() == 1) return A.col(0);
  if (A.rows() == 1) return A.row(0).transpose();
  std::ostringstream msg;
  msg << path.string() << ": expected a single row or column, found " << A.rows() << "x" << A.cols();
  throw InvalidInput(msg.str());
}

void print_law(std::ostream& out, const AsymptoticLaw& law) {
  out << std::setprecision(10);
  out << "center a(d)          " << law.center << "\n";
  out << "mean shift           " << law.mean_shift << "\n";
  out << "linear coefficient   ";
  for (std::size_t i = 0; i < law.linear_coeffs.size(); ++i) out << (i ? ", " : "") << law.linear_coeffs[i];
  out << "\n";
  out << "linear variance      " << law.linear_variance() << "\n";
  out << "gaussian variance    " << law.gaussian_var << "\n";
  out << "total variance       " << law.total_variance() << "\n";
  out << "delta gaussian       " << (law.delta_gaussian ? "yes" : "no") << "\n";
}

}  // namespace

int cmd_laws(const LawsOptions& o, std::ostream& out) {
  const CumulantSet noise{1.0, o.kappa3, o.kappa4};
  if (!noise.kappa4_feasible()) throw InvalidInput("kappa4 must be >= -2");

  AsymptoticLaw law;
  double y_value = 0.0;
  std::string reduction;
  if (o.u_file || o.v_file) {
    if (!(o.u_file && o.v_file)) throw InvalidInput("--u-file and --v-file must be given together");
    const UnitVector u(read_vector(*o.u_file));
    const UnitVector v(read_vector(*o.v_file));
    y_value = static_cast<double>(u.dim()) / static_cast<double>(v.dim());
    if (o.y && std::abs(*o.y - y_value) > 1e-12) {
      std::ostringstream msg;
      msg << "--y " << *o.y << " contradicts the vector dimensions (M/n = " << y_value << ")";
      throw InvalidInput(msg.str());
    }
    law = vector_law(o.d, u.entries(), v.entries(), noise);
    reduction = "vectors";
  } else {
    if (!o.y) throw InvalidInput("--y is required unless --u-file and --v-file are given");
    y_value = *o.y;
    law = delocalized_vector_law(o.d, AspectRatio(y_value));
    reduction = "delocalized";
  }

  if (o.json) {
    nlohmann::json j = to_json(law);
    j["d"] = o.d;
    j["y"] = y_value;
    j["noise"] = to_json(noise);
    j["reduction"] = reduction;
    out << j.dump(2) << "\n";
  } else {
    out << "d = " << o.d << ", y = " << y_value << ", kappa3 = " << o.kappa3 << ", kappa4 = " << o.kappa4 << "\n";
    print_law(out, law);
    if (reduction == "delocalized" && o.kappa3 != 0.0) {
      out << "note: no vectors given; the kappa3 mean shift depends on s1(u) s1(v) and is omitted\n";
    }
  }
  return kOk;
}

int cmd_test(const TestOptions& o, std::ostream& out) {
  Observation obs;
  obs.Y = read_matrix_csv(o.y_file);
  obs.known_U = read_matrix_csv(o.u_file);
  Eigen::MatrixXd V0 = read_matrix_csv(o.v0_file);
  if (V0.rows() == 1 && V0.cols() == obs.Y.cols() && obs.Y.cols() > 1) V0.transposeInPlace();
  if (!o.estimate_d) obs.known_D = o.d;
  if (!o.estimate_cumulants) {
    if (o.cumulants.size() != 2) throw InvalidInput("--cumulants expects two values: kappa3,kappa4");
    obs.noise = CumulantSet{1.0, o.cumulants[0], o.cumulants[1]};
  }

  TestOutcome outcome;
  if (o.variant == "S0") {
    Eigen::Index column = 0;
    if (V0.cols() > 1) {
      if (static_cast<Eigen::Index>(o.index) >= V0.cols()) throw InvalidInput("--index exceeds the columns of V0");
      column = static_cast<Eigen::Index>(o.index);
    }
    outcome = test_vector(obs, o.index, UnitVector(V0.col(column)), o.alpha);
  } else if (o.variant == "S1" || o.variant == "S1d") {
    outcome = test_subspace(obs, V0, o.alpha, o.variant == "S1" ? SubspaceVariant::S1 : SubspaceVariant::S1d);
  } else {
    throw InvalidInput("unknown variant '" + o.variant + "' (expected S0, S1 or S1d)");
  }

  if (o.json) {
    out << to_json(outcome).dump(2) << "\n";
  } else {
    out << std::setprecision(8);
    out << "test        " << outcome.test << "\n";
    out << "statistic   " << outcome.statistic << "\n";
    out << "z           " << outcome.z << "\n";
    out << "p-value     " << outcome.p_value << "\n";
    out << "alpha       " << outcome.alpha << "\n";
    out << "decision    " << (outcome.reject ? "reject H0" : "accept H0") << "\n";
    out << "null law    center " << outcome.law.center << ", shift " << outcome.law.mean_shift << ", sd "
        << std::sqrt(outcome.law.total_variance()) << "\n";
    out << "strengths   " << to_string(outcome.nuisance.strengths) << ":";
    for (double d : outcome.nuisance.d) out << " " << d;
    out << "\n";
    out << "cumulants   " << to_string(outcome.nuisance.cumulants) << ": kappa3 " << outcome.nuisance.noise.kappa3
        << ", kappa4 " << outcome.nuisance.noise.kappa4 << "\n";
  }
  return outcome.reject ? kReject : kOk;
}

}  // namespace rmt::cli
