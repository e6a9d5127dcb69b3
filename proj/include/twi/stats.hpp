#pragma once

// Fixed-order compensated reductions. Results depend only on the order of
// the input, never on how the input was produced.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace twi::stats {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0;
  double comp_ = 0;
};

inline double sum(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of empty sample");
  return sum(xs) / static_cast<double>(xs.size());
}

/// Unbiased sample variance (two-pass).
inline double variance(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("variance needs at least two samples");
  const double m = mean(xs);
  CompensatedSum s;
  for (double x : xs) s.add((x - m) * (x - m));
  return s.value() / static_cast<double>(xs.size() - 1);
}

inline double covariance(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw std::invalid_argument("covariance needs two equal-length samples of size >= 2");
  }
  const double mx = mean(xs);
  const double my = mean(ys);
  CompensatedSum s;
  for (std::size_t i = 0; i < xs.size(); ++i) s.add((xs[i] - mx) * (ys[i] - my));
  return s.value() / static_cast<double>(xs.size() - 1);
}

inline double pearson(std::span<const double> xs, std::span<const double> ys) {
  return covariance(xs, ys) / std::sqrt(variance(xs) * variance(ys));
}

/// Standard error of the unbiased variance for a Gaussian sample.
inline double variance_standard_error(double var, std::size_t n) {
  return var * std::sqrt(2.0 / static_cast<double>(n - 1));
}

}  // namespace twi::stats
