#include "rmt/noise.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "rmt/error.hpp"

namespace rmt {

namespace {

constexpr double kCustomMomentTolerance = 1e-10;

std::uint32_t block_index(std::size_t b) {
  if (b > std::numeric_limits<std::uint32_t>::max()) throw InvalidInput("noise matrix too large for one stream");
  return static_cast<std::uint32_t>(b);
}

// Ziggurat sampler for N(0, 1) with 128 layers (Marsaglia & Tsang 2000, in the
// variant of Doornik 2005 that takes the layer from bits disjoint from the
// uniform). Exact: rejected candidates are redrawn, not approximated.
struct ZigguratTables {
  static constexpr int kLayers = 128;
  static constexpr double kTail = 3.442619855899;
  static constexpr double kArea = 9.91256303526217e-3;

  std::array<double, kLayers + 1> x{};
  std::array<double, kLayers> ratio{};

  ZigguratTables() {
    double f = std::exp(-0.5 * kTail * kTail);
    x[0] = kArea / f;
    x[1] = kTail;
    x[kLayers] = 0.0;
    for (int i = 2; i < kLayers; ++i) {
      x[i] = std::sqrt(-2.0 * std::log(kArea / x[i - 1] + f));
      f = std::exp(-0.5 * x[i] * x[i]);
    }
    for (int i = 0; i < kLayers; ++i) ratio[i] = x[i + 1] / x[i];
  }
};

const ZigguratTables& zig() {
  static const ZigguratTables tables;
  return tables;
}

/// Uniform words for the rejection steps of one entry: word j is half j % 2 of
/// block `entry` under attempt j / 2 of the retry stream.
class RetryWords {
 public:
  RetryWords(const CounterStream& retry, std::uint32_t entry) : retry_(retry), entry_(entry) {}

  std::uint64_t next() {
    if (j_ % 2 == 0) {
      if (j_ / 2 > 0xFFFFu) throw InvalidInput("ziggurat: retry budget exhausted");
      words_ = retry_.retagged(StreamTag::noise_retry, static_cast<std::uint32_t>(j_ / 2)).words64(entry_);
    }
    return words_[j_++ % 2];
  }
  double uniform() { return open_unit(next()); }

 private:
  const CounterStream& retry_;
  std::uint32_t entry_;
  std::size_t j_ = 0;
  std::array<std::uint64_t, 2> words_{};
};

double ziggurat_slow(std::uint64_t bits, RetryWords& more) {
  const auto& t = zig();
  for (;;) {
    const int i = static_cast<int>(bits & 0x7F);
    const double u = 2.0 * open_unit(bits) - 1.0;
    if (std::abs(u) < t.ratio[i]) return u * t.x[i];
    if (i == 0) {
      double x, y;
      do {
        x = std::log(more.uniform()) / ZigguratTables::kTail;
        y = std::log(more.uniform());
      } while (-2.0 * y < x * x);
      return u < 0.0 ? x - ZigguratTables::kTail : ZigguratTables::kTail - x;
    }
    const double xx = u * t.x[i];
    const double f0 = std::exp(-0.5 * (t.x[i] * t.x[i] - xx * xx));
    const double f1 = std::exp(-0.5 * (t.x[i + 1] * t.x[i + 1] - xx * xx));
    if (f1 + more.uniform() * (f0 - f1) < 1.0) return xx;
    bits = more.next();
  }
}

inline double ziggurat_normal(std::uint64_t bits, const CounterStream& retry, std::uint32_t entry) {
  const auto& t = zig();
  const int i = static_cast<int>(bits & 0x7F);
  const double u = 2.0 * open_unit(bits) - 1.0;
  if (std::abs(u) < t.ratio[i]) return u * t.x[i];
  RetryWords more(retry, entry);
  return ziggurat_slow(bits, more);
}

}  // namespace

NoiseProfile::NoiseProfile(NoiseKind kind, std::vector<double> atoms, std::vector<double> weights)
    : kind_(kind), atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (kind_ == NoiseKind::gaussian) return;
  double cumulative = 0.0;
  thresholds_.reserve(weights_.size());
  for (std::size_t k = 0; k + 1 < weights_.size(); ++k) {
    cumulative += weights_[k];
    const long double scaled = std::ldexp(static_cast<long double>(cumulative), 64);
    thresholds_.push_back(scaled >= 0x1.0p64L ? std::numeric_limits<std::uint64_t>::max()
                                              : static_cast<std::uint64_t>(scaled));
  }
  thresholds_.push_back(std::numeric_limits<std::uint64_t>::max());
}

NoiseProfile NoiseProfile::gaussian() { return NoiseProfile(NoiseKind::gaussian, {}, {}); }

NoiseProfile NoiseProfile::two_point() {
  NoiseProfile out(NoiseKind::two_point, {std::sqrt(2.0), -1.0 / std::sqrt(2.0)}, {1.0 / 3.0, 2.0 / 3.0});
  out.thresholds_ = {0x5555555555555555ull, std::numeric_limits<std::uint64_t>::max()};
  return out;
}

NoiseProfile NoiseProfile::custom(std::vector<double> atoms, std::vector<double> weights) {
  if (atoms.empty() || atoms.size() != weights.size()) {
    throw InvalidInput("custom noise needs equally many atoms and weights");
  }
  double total = 0.0, mean = 0.0, second = 0.0;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (!std::isfinite(atoms[k]) || !(weights[k] >= 0.0)) throw InvalidInput("custom noise: invalid atom or weight");
    total += weights[k];
    mean += weights[k] * atoms[k];
    second += weights[k] * atoms[k] * atoms[k];
  }
  if (std::abs(total - 1.0) > kCustomMomentTolerance || std::abs(mean) > kCustomMomentTolerance ||
      std::abs(second - 1.0) > kCustomMomentTolerance) {
    std::ostringstream msg;
    msg << "custom noise must be pre-normalized (weights sum " << total << ", mean " << mean
        << ", variance " << second - mean * mean << ")";
    throw InvalidInput(msg.str());
  }
  return NoiseProfile(NoiseKind::custom, std::move(atoms), std::move(weights));
}

std::string NoiseProfile::name() const {
  switch (kind_) {
    case NoiseKind::gaussian:
      return "gaussian";
    case NoiseKind::two_point:
      return "two_point";
    case NoiseKind::custom:
      return "custom";
  }
  return "unknown";
}

CumulantSet NoiseProfile::cumulants() const {
  switch (kind_) {
    case NoiseKind::gaussian:
      return CumulantSet::gaussian();
    case NoiseKind::two_point:
      return CumulantSet::two_point();
    case NoiseKind::custom:
      break;
  }
  return distribution_cumulants(atoms_, weights_);
}

namespace {

/// Calls emit(entry, word) for every entry; entry e reads word e % 2 of block e / 2.
template <class Emit>
void for_each_word(std::size_t count, const CounterStream& stream, Emit&& emit) {
  constexpr std::size_t kBatch = CounterStream::kBatch;
  std::uint64_t words[2 * kBatch];
  std::size_t b = 0;
  for (; 2 * (b + kBatch) <= count; b += kBatch) {
    stream.batch64(static_cast<std::uint32_t>(b), words);
    for (std::size_t k = 0; k < 2 * kBatch; ++k) emit(2 * b + k, words[k]);
  }
  for (; 2 * b < count; ++b) {
    const auto w = stream.words64(static_cast<std::uint32_t>(b));
    emit(2 * b, w[0]);
    if (2 * b + 1 < count) emit(2 * b + 1, w[1]);
  }
}

}  // namespace

void NoiseProfile::fill(std::span<double> out, const CounterStream& stream) const {
  // Batching only changes how blocks are computed, never which word feeds which entry.
  const std::size_t count = out.size();
  block_index((count + 1) / 2);
  double* dst = out.data();
  if (kind_ == NoiseKind::gaussian) {
    const CounterStream retry = stream.retagged(StreamTag::noise_retry);
    for_each_word(count, stream, [&](std::size_t e, std::uint64_t bits) {
      dst[e] = ziggurat_normal(bits, retry, static_cast<std::uint32_t>(e));
    });
  } else if (atoms_.size() == 2) {
    const std::uint64_t cut = thresholds_[0];
    const double lo = atoms_[0], hi = atoms_[1];
    for_each_word(count, stream, [&](std::size_t e, std::uint64_t bits) { dst[e] = bits < cut ? lo : hi; });
  } else {
    for_each_word(count, stream, [&](std::size_t e, std::uint64_t bits) {
      std::size_t k = 0;
      while (k + 1 < thresholds_.size() && bits >= thresholds_[k]) ++k;
      dst[e] = atoms_[k];
    });
  }
}

Eigen::MatrixXd sample_noise(const NoiseProfile& noise, Eigen::Index M, Eigen::Index n,
                             const CounterStream& stream) {
  if (M <= 0 || n <= 0) throw InvalidInput("sample_noise: dimensions must be positive");
  Eigen::MatrixXd X(M, n);
  noise.fill(std::span<double>(X.data(), static_cast<std::size_t>(X.size())), stream);
  X *= 1.0 / std::sqrt(static_cast<double>(n));
  return X;
}

}  // namespace rmt
