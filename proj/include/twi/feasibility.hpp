#pragma once

// Order-of-magnitude checks for the single-optical-mode treatment.

namespace twi::feasibility {

struct PhysicalSetup {
  double atomic_mass = 1.443e-25;    // kg, 87Rb
  double radial_trap_freq = 1000.0;  // Hz
  double wavelength = 780e-9;        // m
  double n_seed = 1e4;
  double n_total = 1e7;

  void validate() const;
};

/// Radial harmonic-oscillator length sqrt(hbar / (m * 2 pi f)).
double condensate_width(const PhysicalSetup& setup);

/// Fraction of spontaneous emission into the super-radiant mode,
/// 3 / (4 pi (k sigma)^2).
double capture_fraction(const PhysicalSetup& setup);
double capture_fraction_for(double k_sigma);

/// Gamma_stim / Gamma_spon = F * N_seed
double rate_ratio(const PhysicalSetup& setup);

/// Rough optimum M ~ 2^(3/4) (N_seed / N_t)^(1/4)
double scaling_estimate(double n_seed, double n_total);

inline constexpr double kSingleModeRatioThreshold = 100.0;

}  // namespace twi::feasibility
