#pragma once

// Closed-form predictions with the pump treated as a fixed classical field.

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace twi::analytics {

template <typename Scalar = double>
struct AnalyticPrediction {
  Scalar r;
  Scalar n_total;
  Scalar delta_phi_plain;
  Scalar delta_phi_recycled;
  Scalar m_plain;
  Scalar m_recycled;
  Scalar var_squeezed_combo;
  Scalar var_antisqueezed_combo;
};

template <typename Scalar = double>
Scalar sql(Scalar n_total) {
  if (!(n_total > 0)) throw std::invalid_argument("sql: n_total must be > 0");
  return Scalar(1) / std::sqrt(n_total);
}

template <typename Scalar = double>
Scalar heisenberg(Scalar n_total) {
  if (!(n_total > 0)) throw std::invalid_argument("heisenberg: n_total must be > 0");
  return Scalar(1) / n_total;
}

/// Squeezing at which the recycled signal reaches the standard quantum limit.
template <typename Scalar = double>
constexpr Scalar r_crit() {
  return std::numbers::ln2_v<Scalar> / 2;
}

template <typename Scalar = double>
AnalyticPrediction<Scalar> predict(Scalar r, Scalar n_total) {
  if (!std::isfinite(r) || r < 0) throw std::invalid_argument("predict: r must be >= 0");
  if (!(n_total > 0)) throw std::invalid_argument("predict: n_total must be > 0");
  AnalyticPrediction<Scalar> p{};
  p.r = r;
  p.n_total = n_total;
  p.m_plain = std::sqrt(std::cosh(2 * r));
  p.m_recycled = std::numbers::sqrt2_v<Scalar> * std::exp(-r);
  p.delta_phi_plain = p.m_plain / std::sqrt(n_total);
  p.delta_phi_recycled = p.m_recycled / std::sqrt(n_total);
  p.var_squeezed_combo = 2 * std::exp(-2 * r);
  p.var_antisqueezed_combo = 2 * std::exp(2 * r);
  return p;
}

}  // namespace twi::analytics
