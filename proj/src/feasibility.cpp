#include "twi/feasibility.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace twi::feasibility {

namespace {
constexpr double kHbar = 1.054571817e-34;  // J s
}

void PhysicalSetup::validate() const {
  auto positive = [](double x) { return std::isfinite(x) && x > 0; };
  if (!positive(atomic_mass) || !positive(radial_trap_freq) || !positive(wavelength)) {
    throw std::invalid_argument("PhysicalSetup: mass, trap frequency and wavelength must be > 0");
  }
  if (!positive(n_total) || !std::isfinite(n_seed) || n_seed < 0) {
    throw std::invalid_argument("PhysicalSetup: need n_total > 0 and n_seed >= 0");
  }
  if (n_seed > n_total) throw std::invalid_argument("PhysicalSetup: n_seed exceeds n_total");
}

double condensate_width(const PhysicalSetup& setup) {
  setup.validate();
  const double omega = 2.0 * std::numbers::pi * setup.radial_trap_freq;
  return std::sqrt(kHbar / (setup.atomic_mass * omega));
}

double capture_fraction_for(double k_sigma) {
  if (!std::isfinite(k_sigma) || !(k_sigma > 0)) {
    throw std::invalid_argument("capture_fraction: k*sigma must be > 0");
  }
  return 3.0 / (4.0 * std::numbers::pi * k_sigma * k_sigma);
}

double capture_fraction(const PhysicalSetup& setup) {
  const double k = 2.0 * std::numbers::pi / setup.wavelength;
  return capture_fraction_for(k * condensate_width(setup));
}

double rate_ratio(const PhysicalSetup& setup) { return capture_fraction(setup) * setup.n_seed; }

double scaling_estimate(double n_seed, double n_total) {
  if (!std::isfinite(n_seed) || !std::isfinite(n_total) || !(n_seed > 0) || n_seed > n_total) {
    throw std::invalid_argument("scaling_estimate: need 0 < n_seed <= n_total");
  }
  return std::pow(2.0, 0.75) * std::pow(n_seed / n_total, 0.25);
}

}  // namespace twi::feasibility
