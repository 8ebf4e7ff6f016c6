#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rmt {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A functional was evaluated outside its supported domain (bulk/edge,
/// subcritical signal, non-positive argument).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed input: shape mismatch, non-orthonormal factors, bad config.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Sample with (numerically) zero variance; cumulants are undefined.
class DegenerateSample : public Error {
 public:
  using Error::Error;
};

/// The asymptotic laws do not apply to this observation or parameter set
/// (near-critical outlier, negative limiting variance, non-Gaussian null).
class RegimeError : public Error {
 public:
  using Error::Error;
};

/// A requested singular value is not an outlier of the bulk.
class NoOutlierError : public RegimeError {
 public:
  NoOutlierError(std::size_t index, const std::string& what)
      : RegimeError(what), index_(index) {}
  /// Zero-based index of the first failing component.
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace rmt
