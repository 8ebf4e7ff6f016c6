#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rmt/moments.hpp"
#include "rmt/philox.hpp"

namespace rmt {

enum class NoiseKind { gaussian, two_point, custom };

/// Distribution of the standardized entry sqrt(n) x_ij.
class NoiseProfile {
 public:
  static NoiseProfile gaussian();
  /// (1/3) delta_{sqrt 2} + (2/3) delta_{-1/sqrt 2}.
  static NoiseProfile two_point();
  /// Finite atomic law; must already have mean 0 and variance 1 (to 1e-10).
  static NoiseProfile custom(std::vector<double> atoms, std::vector<double> weights);

  NoiseKind kind() const noexcept { return kind_; }
  const std::vector<double>& atoms() const noexcept { return atoms_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::string name() const;

  /// Exact cumulants of the law (analytic, not sampled).
  CumulantSet cumulants() const;

  /// Writes standardized draws for entries [0, out.size()) of the stream,
  /// entry e depending only on (stream, e).
  void fill(std::span<double> out, const CounterStream& stream) const;

 private:
  NoiseProfile(NoiseKind kind, std::vector<double> atoms, std::vector<double> weights);

  NoiseKind kind_;
  std::vector<double> atoms_;
  std::vector<double> weights_;
  std::vector<std::uint64_t> thresholds_;
};

/// M x n noise matrix with entries of variance 1/n, column-major entry order.
Eigen::MatrixXd sample_noise(const NoiseProfile& noise, Eigen::Index M, Eigen::Index n,
                             const CounterStream& stream);

}  // namespace rmt
