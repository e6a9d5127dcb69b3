#pragma once

// Raman super-radiance step: three-wave c-number equations integrated with
// fixed-step RK4, plus the exact two-mode Bogoliubov map that solves them
// when the pump is held fixed.
//
// Time is rescaled so the integration variable runs over [0, r]; the
// coupling constant and sqrt(N1(0)) are absorbed:
//   d(alpha1)/ds = i beta2 alpha2 / sqrt(N1)
//   d(alpha2)/ds = i (alpha1 / sqrt(N1)) conj(beta2)
//   d(beta2)/ds  = i (alpha1 / sqrt(N1)) conj(alpha2)

#include "twi/phasespace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace twi {

/// Nominal squeezing parameter r >= 0.
template <typename Scalar = double>
class SqueezeParam {
 public:
  explicit SqueezeParam(Scalar r) : r_(r) {
    if (!std::isfinite(r) || r < 0) {
      throw std::invalid_argument("SqueezeParam: r must be finite and >= 0");
    }
  }
  Scalar value() const { return r_; }

 private:
  Scalar r_;
};

enum class IntegratorMethod { rk4 };

struct IntegratorSpec {
  int steps_per_unit_r = 400;
  IntegratorMethod method = IntegratorMethod::rk4;
  // Hold alpha1 at its sampled value and drive the pair with the classical
  // pump sqrt(N1).
  bool clamp_pump = false;
  // Replace alpha1 after evolution by an independent coherent sample of equal
  // mean occupation. Needs the ensemble mean, so it is applied by
  // build_ensemble; evolve_tw ignores it.
  bool decorrelate_pump = false;

  void validate() const {
    if (steps_per_unit_r < 1) {
      throw std::invalid_argument("IntegratorSpec: steps_per_unit_r must be >= 1");
    }
  }

  int steps_for(double r) const {
    if (r <= 0) return 0;
    return std::max(1, static_cast<int>(std::lround(r * steps_per_unit_r)));
  }
};

/// Largest drift of the two invariants over a run, relative to the initial
/// total occupation |alpha1|^2 + |alpha2|^2 + |beta2|^2. The atom-number
/// invariant is not monitored (reported as 0) when the pump is clamped.
struct ConservationReport {
  double max_rel_drift_atoms = 0;
  double max_rel_drift_manley_rowe = 0;

  void merge(const ConservationReport& other) {
    max_rel_drift_atoms = std::max(max_rel_drift_atoms, other.max_rel_drift_atoms);
    max_rel_drift_manley_rowe = std::max(max_rel_drift_manley_rowe, other.max_rel_drift_manley_rowe);
  }
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(int step, const std::string& snapshot)
      : std::runtime_error("non-finite state at RK4 step " + std::to_string(step) + ": " + snapshot),
        step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

template <typename Scalar>
struct EvolveResult {
  ModeTriple<Scalar> state;
  ConservationReport conservation;
};

namespace detail {

template <typename Scalar>
ModeVector<Scalar> three_wave_rhs(const ModeVector<Scalar>& y, Scalar inv_sqrt_n1, bool clamp) {
  using C = std::complex<Scalar>;
  const C i(0, 1);
  ModeVector<Scalar> dy;
  if (clamp) {
    dy << C(0, 0), i * std::conj(y(2)), i * std::conj(y(1));
  } else {
    const C pump = y(0) * inv_sqrt_n1;
    dy << i * y(2) * y(1) * inv_sqrt_n1, i * pump * std::conj(y(2)), i * pump * std::conj(y(1));
  }
  return dy;
}

template <typename Scalar>
std::string snapshot(const ModeVector<Scalar>& y) {
  std::ostringstream os;
  os.precision(17);
  os << "alpha1=" << y(0) << " alpha2=" << y(1) << " beta2=" << y(2);
  return os.str();
}

}  // namespace detail

/// Integrates the super-radiance step from t0 to t1. `pump_occupation` is the
/// nominal N1(0) = N_t - N_seed that defines the time scale of r.
template <typename Scalar>
EvolveResult<Scalar> evolve_tw(const ModeTriple<Scalar>& state, SqueezeParam<Scalar> r,
                               const IntegratorSpec& spec, Scalar pump_occupation) {
  if (state.time_tag != TimeTag::t0) {
    throw std::invalid_argument("evolve_tw: state must be at t0");
  }
  spec.validate();
  if (!(pump_occupation > 0)) throw std::invalid_argument("evolve_tw: pump_occupation must be > 0");

  EvolveResult<Scalar> out{state, {}};
  out.state.advance_to(TimeTag::t1);
  const int steps = spec.steps_for(static_cast<double>(r.value()));
  if (steps == 0) return out;

  const Scalar h = r.value() / static_cast<Scalar>(steps);
  const Scalar inv_sqrt_n1 = Scalar(1) / std::sqrt(pump_occupation);
  const bool clamp = spec.clamp_pump;

  auto atoms = [](const ModeVector<Scalar>& y) { return std::norm(y(0)) + std::norm(y(1)); };
  auto manley_rowe = [](const ModeVector<Scalar>& y) { return std::norm(y(1)) - std::norm(y(2)); };

  ModeVector<Scalar> y = state.amps;
  const Scalar scale = std::max<Scalar>(y.squaredNorm(), Scalar(1));
  const Scalar atoms0 = atoms(y);
  const Scalar mr0 = manley_rowe(y);
  Scalar drift_atoms = 0;
  Scalar drift_mr = 0;

  for (int step = 0; step < steps; ++step) {
    const ModeVector<Scalar> k1 = detail::three_wave_rhs(y, inv_sqrt_n1, clamp);
    const ModeVector<Scalar> k2 = detail::three_wave_rhs<Scalar>(y + (h / 2) * k1, inv_sqrt_n1, clamp);
    const ModeVector<Scalar> k3 = detail::three_wave_rhs<Scalar>(y + (h / 2) * k2, inv_sqrt_n1, clamp);
    const ModeVector<Scalar> k4 = detail::three_wave_rhs<Scalar>(y + h * k3, inv_sqrt_n1, clamp);
    y += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);

    ModeTriple<Scalar> probe;
    probe.amps = y;
    if (!probe.finite()) throw IntegrationError(step, detail::snapshot(y));

    if (!clamp) drift_atoms = std::max(drift_atoms, std::abs(atoms(y) - atoms0));
    drift_mr = std::max(drift_mr, std::abs(manley_rowe(y) - mr0));
  }

  out.state.amps = y;
  out.conservation.max_rel_drift_atoms = static_cast<double>(drift_atoms / scale);
  out.conservation.max_rel_drift_manley_rowe = static_cast<double>(drift_mr / scale);
  return out;
}

/// Coefficients (cosh r, sinh r) of the two-mode squeezing map.
template <typename Scalar>
struct BogoliubovCoefficients {
  Scalar u;
  Scalar v;
};

template <typename Scalar>
BogoliubovCoefficients<Scalar> bogoliubov_coefficients(SqueezeParam<Scalar> r) {
  return {std::cosh(r.value()), std::sinh(r.value())};
}

/// Exact solution at clamped pump:
///   alpha2 -> alpha2 cosh r + i conj(beta2) sinh r
///   beta2  -> beta2 cosh r + i conj(alpha2) sinh r
template <typename Scalar>
ModeTriple<Scalar> evolve_analytic(const ModeTriple<Scalar>& state, SqueezeParam<Scalar> r) {
  if (state.time_tag != TimeTag::t0) {
    throw std::invalid_argument("evolve_analytic: state must be at t0");
  }
  const auto [u, v] = bogoliubov_coefficients(r);
  const std::complex<Scalar> i(0, 1);
  ModeTriple<Scalar> out = state;
  out.advance_to(TimeTag::t1);
  out.alpha2() = state.alpha2() * u + i * std::conj(state.beta2()) * v;
  out.beta2() = state.beta2() * u + i * std::conj(state.alpha2()) * v;
  return out;
}

}  // namespace twi
