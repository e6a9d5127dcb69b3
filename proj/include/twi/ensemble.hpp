#pragma once

// Trajectory ensembles at t1. One ensemble is built per r and reused for
// every interferometer phase (common random numbers).

#include "twi/dynamics.hpp"
#include "twi/interferometer.hpp"
#include "twi/phasespace.hpp"

#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <vector>

namespace twi {

enum class EvolutionMode { tw, analytic, clamped, decorrelated };

std::string_view to_string(EvolutionMode mode);
EvolutionMode parse_evolution_mode(std::string_view text);

struct EnsembleSpec {
  double n_total = 1e7;
  double n_seed = 1e4;
  double r = 3.0;
  // Phase of the seed amplitude relative to the condensate.
  double seed_phase = std::numbers::pi / 2;
  std::size_t trajectories = 1000;
  int steps_per_unit_r = 400;
  std::uint64_t master_seed = 20130101;
  EvolutionMode mode = EvolutionMode::tw;

  void validate() const;
};

struct EnsembleAtT1 {
  std::vector<ModeTriple<double>> states;
  // One LO vacuum draw per trajectory, shared by every phase.
  std::vector<std::complex<double>> lo_noise;
  double n_total = 0;
  double n_seed = 0;
  double r = 0;
  EvolutionMode mode = EvolutionMode::tw;
  ConservationReport conservation;

  std::size_t size() const { return states.size(); }
  bool empty() const { return states.empty(); }
};

EnsembleAtT1 build_ensemble(const EnsembleSpec& spec, unsigned threads = 1);

/// mean(|alpha2(t1)|^2) - 1/2 - n_seed
double transferred_atoms(const EnsembleAtT1& ensemble, double n_seed);

/// Symmetric-ordering estimate of the condensate occupation at t1.
double pump_occupation(const EnsembleAtT1& ensemble);

/// Mean scattered-photon number in the light mode at t1.
double scattered_photons(const EnsembleAtT1& ensemble);

/// Resolves the LO amplitude from the gain: beta_LO = g * sqrt(N1(t1)).
HomodyneSpec homodyne_for(const EnsembleAtT1& ensemble, double gain_g, bool lo_sampled,
                          CorrectionSign sign = CorrectionSign::automatic);

/// Per-trajectory signals at one phase, in trajectory order.
std::vector<SignalSample> signals_at(const EnsembleAtT1& ensemble, double phi,
                                     const HomodyneSpec& spec, bool correction_on = true);

/// Picks the correction sign with the smaller V(S) at phi_ref; ties go to plus.
CorrectionSign calibrate_correction_sign(const EnsembleAtT1& ensemble, double phi_ref,
                                         const HomodyneSpec& spec);

/// Variances of X + Y and X - Y with X = alpha2 + conj(alpha2) and
/// Y = i(beta2 - conj(beta2)). The first is the squeezed combination of the
/// two-mode map.
struct QuadratureVariances {
  double squeezed = 0;
  double antisqueezed = 0;
};
QuadratureVariances quadrature_variances(const EnsembleAtT1& ensemble);

}  // namespace twi
