#pragma once

// Measurement chain after the super-radiance step: Mach-Zehnder atom
// interferometer, balanced homodyne detection of the light mode, and the
// combined signal.

#include "twi/phasespace.hpp"

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace twi {

enum class CorrectionSign { plus, minus, automatic };

inline double sign_value(CorrectionSign s) {
  switch (s) {
    case CorrectionSign::plus: return 1.0;
    case CorrectionSign::minus: return -1.0;
    case CorrectionSign::automatic: break;
  }
  throw std::logic_error("correction sign is unresolved (auto); calibrate it first");
}

struct HomodyneSpec {
  double gain_g = 100.0;
  // Classical LO amplitude beta_LO = g * sqrt(N1(t1)); see homodyne_for().
  double lo_amplitude = 0.0;
  bool lo_sampled = true;
  CorrectionSign correction_sign = CorrectionSign::automatic;

  void validate() const {
    if (!std::isfinite(gain_g) || !(gain_g > 0)) {
      throw std::invalid_argument("HomodyneSpec: gain_g must be finite and > 0");
    }
    if (!std::isfinite(lo_amplitude) || lo_amplitude < 0) {
      throw std::invalid_argument("HomodyneSpec: lo_amplitude must be finite and >= 0");
    }
  }
};

struct SignalSample {
  double s_a = 0;
  double s_b = 0;
  double s_combined = 0;
  double phi = 0;
};

template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, 2, 2> beam_splitter_matrix() {
  using C = std::complex<Scalar>;
  const Scalar k = Scalar(1) / std::sqrt(Scalar(2));
  Eigen::Matrix<C, 2, 2> m;
  m << C(k, 0), C(0, -k),
       C(0, -k), C(k, 0);
  return m;
}

/// 50/50 Raman pulse on (alpha1, alpha2); the light mode is untouched.
template <typename Scalar>
ModeTriple<Scalar> beam_splitter_half(const ModeTriple<Scalar>& state) {
  ModeTriple<Scalar> out = state;
  out.amps.template head<2>() = beam_splitter_matrix<Scalar>() * state.amps.template head<2>();
  return out;
}

template <typename Scalar>
ModeTriple<Scalar> phase_imprint(const ModeTriple<Scalar>& state, Scalar phi) {
  ModeTriple<Scalar> out = state;
  out.alpha2() *= std::polar(Scalar(1), phi);
  return out;
}

template <typename Scalar>
ModeTriple<Scalar> run_mzi(const ModeTriple<Scalar>& state, Scalar phi) {
  if (state.time_tag != TimeTag::t1) throw std::invalid_argument("run_mzi: state must be at t1");
  ModeTriple<Scalar> s = beam_splitter_half(state);
  s.advance_to(TimeTag::t2);
  s = beam_splitter_half(phase_imprint(s, phi));
  s.advance_to(TimeTag::t3);
  return s;
}

/// Number difference N2 - N1 at the output ports. The symmetric-ordering
/// offsets cancel in the difference.
template <typename Scalar>
Scalar signal_atoms(const ModeTriple<Scalar>& state) {
  if (state.time_tag != TimeTag::t3) throw std::invalid_argument("signal_atoms: state must be at t3");
  return std::norm(state.alpha2()) - std::norm(state.alpha1());
}

/// Photon-number difference |c|^2 - |d|^2 after mixing the light mode with
/// the local oscillator, c = (beta2 - i bL)/sqrt2, d = (bL - i beta2)/sqrt2.
/// Evaluated in the algebraically equal form -2 Im(beta2 conj(bL)).
template <typename Scalar>
Scalar signal_light(const ModeTriple<Scalar>& state, const HomodyneSpec& spec,
                    std::complex<Scalar> lo_noise) {
  std::complex<Scalar> lo(static_cast<Scalar>(spec.lo_amplitude), 0);
  if (spec.lo_sampled) lo += lo_noise;
  return Scalar(-2) * std::imag(state.beta2() * std::conj(lo));
}

inline double combine_signals(double s_a, double s_b, const HomodyneSpec& spec) {
  return s_a - sign_value(spec.correction_sign) * s_b / spec.gain_g;
}

/// Full per-trajectory measurement at phase phi. The light is detected at t1
/// and does not pass through the atom interferometer.
inline SignalSample measure(const ModeTriple<double>& at_t1, double phi, const HomodyneSpec& spec,
                            std::complex<double> lo_noise, bool correction_on = true) {
  SignalSample out;
  out.phi = phi;
  out.s_a = signal_atoms(run_mzi(at_t1, phi));
  out.s_b = signal_light(at_t1, spec, lo_noise);
  out.s_combined = correction_on ? combine_signals(out.s_a, out.s_b, spec) : out.s_a;
  return out;
}

}  // namespace twi
