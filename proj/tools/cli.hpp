#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rmt::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,   // bad flags, unreadable or invalid data, out-of-domain input
  kReject = 3,  // test rejected H0, or reproduce --check exceeded its tolerance
  kRegime = 4,  // asymptotics do not apply (outlier gate, non-Gaussian null, failed replicates)
};

/// Parses argv and runs one subcommand, mapping library errors to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct LawsOptions {
  double d = 0.0;
  std::optional<double> y;
  double kappa3 = 0.0;
  double kappa4 = 0.0;
  std::optional<std::filesystem::path> u_file;
  std::optional<std::filesystem::path> v_file;
  bool json = false;
};

struct TestOptions {
  std::filesystem::path y_file, u_file, v0_file;
  std::vector<double> d;
  bool estimate_d = false;
  std::vector<double> cumulants;
  bool estimate_cumulants = false;
  double alpha = 0.05;
  std::string variant = "S1";
  std::size_t index = 0;
  bool json = false;
};

struct ReproduceOptions {
  std::optional<std::string> table;
  std::optional<std::string> figure;
  std::vector<long> n;
  std::size_t reps = 0;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = ".";
  bool check = false;
  unsigned workers = 1;
};

struct SimulateOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::string> fixture;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out;
  unsigned workers = 1;
};

/// Each returns the process exit code; errors propagate as exceptions.
int cmd_laws(const LawsOptions& o, std::ostream& out);
int cmd_test(const TestOptions& o, std::ostream& out);
int cmd_reproduce(const ReproduceOptions& o, const std::string& command, std::ostream& out);
int cmd_simulate(const SimulateOptions& o, const std::string& command, std::ostream& out);

}  // namespace rmt::cli
