#include "twi/ensemble.hpp"

#include "twi/parallel.hpp"
#include "twi/stats.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace twi {

std::string_view to_string(EvolutionMode mode) {
  switch (mode) {
    case EvolutionMode::tw: return "tw";
    case EvolutionMode::analytic: return "analytic";
    case EvolutionMode::clamped: return "clamped";
    case EvolutionMode::decorrelated: return "decorrelated";
  }
  return "?";
}

EvolutionMode parse_evolution_mode(std::string_view text) {
  if (text == "tw") return EvolutionMode::tw;
  if (text == "analytic") return EvolutionMode::analytic;
  if (text == "clamped") return EvolutionMode::clamped;
  if (text == "decorrelated") return EvolutionMode::decorrelated;
  throw std::invalid_argument("unknown mode '" + std::string(text) + "'");
}

void EnsembleSpec::validate() const {
  if (!std::isfinite(n_total) || !(n_total > 0)) throw std::invalid_argument("n_total must be > 0");
  if (!std::isfinite(n_seed) || n_seed < 0 || n_seed >= n_total) {
    throw std::invalid_argument("need 0 <= n_seed < n_total");
  }
  if (!std::isfinite(r) || r < 0) throw std::invalid_argument("r must be finite and >= 0");
  if (!std::isfinite(seed_phase)) throw std::invalid_argument("seed_phase must be finite");
  if (trajectories < 2) throw std::invalid_argument("trajectories must be >= 2");
  if (steps_per_unit_r < 1) throw std::invalid_argument("steps_per_unit_r must be >= 1");
}

EnsembleAtT1 build_ensemble(const EnsembleSpec& spec, unsigned threads) {
  spec.validate();
  const std::size_t n = spec.trajectories;

  EnsembleAtT1 out;
  out.states.resize(n);
  out.lo_noise.resize(n);
  out.n_total = spec.n_total;
  out.n_seed = spec.n_seed;
  out.r = spec.r;
  out.mode = spec.mode;

  IntegratorSpec integrator;
  integrator.steps_per_unit_r = spec.steps_per_unit_r;
  integrator.clamp_pump = spec.mode == EvolutionMode::clamped;
  integrator.decorrelate_pump = spec.mode == EvolutionMode::decorrelated;
  const SqueezeParam<double> r(spec.r);
  const double pump0 = spec.n_total - spec.n_seed;

  std::vector<ConservationReport> reports(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const SeedSpec seed{spec.master_seed, i, StreamTag::atoms1, 0};
    const auto initial = sample_initial_state<double>(spec.n_total, spec.n_seed, seed, spec.seed_phase);
    if (spec.mode == EvolutionMode::analytic) {
      out.states[i] = evolve_analytic(initial, r);
    } else {
      auto evolved = evolve_tw(initial, r, integrator, pump0);
      out.states[i] = evolved.state;
      reports[i] = evolved.conservation;
    }
    out.lo_noise[i] = vacuum_noise<double>(seed.with_tag(StreamTag::local_oscillator));
  });
  for (const auto& rep : reports) out.conservation.merge(rep);

  if (integrator.decorrelate_pump) {
    const double occupation = pump_occupation(out);
    const std::complex<double> mean(std::sqrt(std::max(occupation, 0.0)), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const SeedSpec seed{spec.master_seed, i, StreamTag::atoms1, 1};
      out.states[i].alpha1() = sample_coherent<double>(mean, seed);
    }
  }
  return out;
}

namespace {

template <typename Fn>
double ensemble_mean(const EnsembleAtT1& ensemble, Fn&& fn) {
  if (ensemble.empty()) throw std::invalid_argument("ensemble is empty");
  stats::CompensatedSum s;
  for (const auto& st : ensemble.states) s.add(fn(st));
  return s.value() / static_cast<double>(ensemble.size());
}

}  // namespace

double transferred_atoms(const EnsembleAtT1& ensemble, double n_seed) {
  return ensemble_mean(ensemble, [](const auto& s) { return std::norm(s.alpha2()); }) - 0.5 - n_seed;
}

double pump_occupation(const EnsembleAtT1& ensemble) {
  return ensemble_mean(ensemble, [](const auto& s) { return std::norm(s.alpha1()); }) - 0.5;
}

double scattered_photons(const EnsembleAtT1& ensemble) {
  return ensemble_mean(ensemble, [](const auto& s) { return std::norm(s.beta2()); }) - 0.5;
}

HomodyneSpec homodyne_for(const EnsembleAtT1& ensemble, double gain_g, bool lo_sampled,
                          CorrectionSign sign) {
  HomodyneSpec spec;
  spec.gain_g = gain_g;
  spec.lo_sampled = lo_sampled;
  spec.correction_sign = sign;
  spec.lo_amplitude = gain_g * std::sqrt(std::max(pump_occupation(ensemble), 0.0));
  spec.validate();
  return spec;
}

std::vector<SignalSample> signals_at(const EnsembleAtT1& ensemble, double phi,
                                     const HomodyneSpec& spec, bool correction_on) {
  std::vector<SignalSample> out(ensemble.size());
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    out[i] = measure(ensemble.states[i], phi, spec, ensemble.lo_noise[i], correction_on);
  }
  return out;
}

CorrectionSign calibrate_correction_sign(const EnsembleAtT1& ensemble, double phi_ref,
                                         const HomodyneSpec& spec) {
  if (ensemble.size() < 2) throw std::invalid_argument("calibrate_correction_sign: ensemble too small");
  HomodyneSpec probe = spec;
  probe.correction_sign = CorrectionSign::plus;
  const auto samples = signals_at(ensemble, phi_ref, probe, false);
  std::vector<double> plus(samples.size());
  std::vector<double> minus(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double corr = samples[i].s_b / spec.gain_g;
    plus[i] = samples[i].s_a - corr;
    minus[i] = samples[i].s_a + corr;
  }
  return stats::variance(minus) < stats::variance(plus) ? CorrectionSign::minus : CorrectionSign::plus;
}

QuadratureVariances quadrature_variances(const EnsembleAtT1& ensemble) {
  std::vector<double> sq(ensemble.size());
  std::vector<double> anti(ensemble.size());
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const auto& s = ensemble.states[i];
    const double x = 2.0 * s.alpha2().real();
    const double y = -2.0 * s.beta2().imag();
    sq[i] = x + y;
    anti[i] = x - y;
  }
  return {stats::variance(sq), stats::variance(anti)};
}

}  // namespace twi
