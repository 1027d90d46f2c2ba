#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>

namespace jumps {

// Two-sided 99.9% normal quantile.
inline constexpr double k_z999 = 3.2905;

struct Aggregate {
  std::size_t count = 0;
  double mean = 0.0;
  double ci999_halfwidth = 0.0;
};

// Sample mean with a normal-approximation 99.9% confidence half-width,
// z * s / sqrt(n) with Bessel-corrected s. Needs at least two values.
inline Aggregate aggregate(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("aggregate needs at least two values");
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (const double v : values) sum += v;
  const double mean = sum / n;
  double sq = 0.0;
  for (const double v : values) sq += (v - mean) * (v - mean);
  const double stddev = std::sqrt(sq / (n - 1.0));
  return {values.size(), mean, k_z999 * stddev / std::sqrt(n)};
}

// Percent reduction of `candidate_mean` relative to `baseline_mean`.
// Absent when the baseline is not positive.
inline std::optional<double> relative_benefit_pct(double candidate_mean, double baseline_mean) {
  if (!(baseline_mean > 0.0)) return std::nullopt;
  return 100.0 * (baseline_mean - candidate_mean) / baseline_mean;
}

// Left-closed bins [k*w, (k+1)*w), sparse over k.
class Histogram {
 public:
  Histogram() = default;
  explicit Histogram(double bin_width) : bin_width_(bin_width) {
    if (!(bin_width > 0.0)) throw std::invalid_argument("bin_width must be > 0");
  }

  void add(double sample) {
    const auto k = static_cast<std::int64_t>(std::floor(sample / bin_width_));
    ++bins_[k];
    ++total_;
  }
  void add(std::span<const double> samples) {
    for (const double s : samples) add(s);
  }

  double bin_width() const { return bin_width_; }
  const std::map<std::int64_t, std::uint64_t>& bins() const { return bins_; }
  std::uint64_t total_count() const { return total_; }
  double bin_left(std::int64_t k) const { return static_cast<double>(k) * bin_width_; }

  // Fraction of samples in bins that end at or below `limit`.
  double mass_below(double limit) const {
    if (total_ == 0) return 0.0;
    std::uint64_t below = 0;
    for (const auto& [k, count] : bins_)
      if (static_cast<double>(k + 1) * bin_width_ <= limit + 1e-9 * bin_width_) below += count;
    return static_cast<double>(below) / static_cast<double>(total_);
  }

 private:
  double bin_width_ = 0.1;
  std::map<std::int64_t, std::uint64_t> bins_;
  std::uint64_t total_ = 0;
};

}  // namespace jumps
