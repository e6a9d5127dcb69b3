#include "doctest.h"

#include "twi/ensemble.hpp"
#include "twi/interferometer.hpp"
#include "twi/stats.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace twi;
using C = std::complex<double>;
constexpr double kPi = std::numbers::pi;

namespace {

ModeTriple<double> at_t1(C a1, C a2, C b2 = {0, 0}) { return ModeTriple<double>(a1, a2, b2, TimeTag::t1); }

ModeTriple<double> random_triple(std::uint64_t i) {
  const SeedSpec s{31, i, StreamTag::atoms1, 0};
  return at_t1(sample_coherent<double>({3.0, 1.0}, s) * 4.0,
               sample_coherent<double>({-1.0, 2.0}, s.with_tag(StreamTag::atoms2)) * 4.0,
               sample_coherent<double>({0.0, 0.0}, s.with_tag(StreamTag::light2)));
}

EnsembleAtT1 fig3_ensemble() {
  EnsembleSpec spec;
  spec.n_total = 1e7;
  spec.n_seed = 1e4;
  spec.r = 3.0;
  spec.trajectories = 1000;
  spec.master_seed = 5;
  return build_ensemble(spec);
}

std::vector<double> column(const std::vector<SignalSample>& xs, double SignalSample::*field) {
  std::vector<double> out;
  for (const auto& x : xs) out.push_back(x.*field);
  return out;
}

}  // namespace

TEST_CASE("half beam splitter") {
  const auto out = beam_splitter_half(at_t1({1, 0}, {0, 0}, {0.3, 0.4}));
  CHECK(out.alpha1().real() == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(out.alpha1().imag() == doctest::Approx(0.0));
  CHECK(out.alpha2().real() == doctest::Approx(0.0));
  CHECK(out.alpha2().imag() == doctest::Approx(-1 / std::sqrt(2.0)));
  CHECK(out.beta2() == C(0.3, 0.4));

  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto in = random_triple(i);
    const auto o = beam_splitter_half(in);
    CHECK(std::norm(o.alpha1()) + std::norm(o.alpha2()) ==
          doctest::Approx(std::norm(in.alpha1()) + std::norm(in.alpha2())).epsilon(1e-13));
  }

  // Two pulses compose to -i * swap: [[1,-i],[-i,1]]^2 / 2 = [[0,-i],[-i,0]].
  const auto in = random_triple(3);
  const auto twice = beam_splitter_half(beam_splitter_half(in));
  CHECK(std::abs(twice.alpha1() - C(0, -1) * in.alpha2()) < 1e-12);
  CHECK(std::abs(twice.alpha2() - C(0, -1) * in.alpha1()) < 1e-12);
  CHECK(std::norm(twice.alpha2()) == doctest::Approx(std::norm(in.alpha1())));
}

TEST_CASE("phase imprint") {
  const auto in = random_triple(1);
  CHECK(phase_imprint(in, 0.0).amps == in.amps);
  const auto flipped = phase_imprint(in, kPi);
  CHECK(std::abs(flipped.alpha2() + in.alpha2()) < 1e-12);
  CHECK(flipped.alpha1() == in.alpha1());
  for (double phi : {0.3, 1.0, 2.5, 5.0}) {
    CHECK(std::abs(phase_imprint(in, phi).alpha2()) == doctest::Approx(std::abs(in.alpha2())));
  }
}

TEST_CASE("Mach-Zehnder sequence") {
  const double a = 7.0;
  SUBCASE("zero phase transfers everything") {
    const auto out = run_mzi(at_t1({a, 0}, {0, 0}), 0.0);
    CHECK(out.time_tag == TimeTag::t3);
    CHECK(std::abs(out.alpha2() - C(0, -a)) < 1e-12);
    CHECK(std::abs(out.alpha1()) < 1e-12);
    CHECK(signal_atoms(out) == doctest::Approx(a * a));
  }
  SUBCASE("phase pi returns everything") {
    const auto out = run_mzi(at_t1({a, 0}, {0, 0}), kPi);
    CHECK(std::norm(out.alpha1()) == doctest::Approx(a * a));
    CHECK(std::norm(out.alpha2()) < 1e-20);
  }
  SUBCASE("atom number is conserved at every phase") {
    const auto in = random_triple(9);
    for (int k = 0; k < 16; ++k) {
      const auto out = run_mzi(in, 0.4 * k);
      CHECK(std::norm(out.alpha1()) + std::norm(out.alpha2()) ==
            doctest::Approx(std::norm(in.alpha1()) + std::norm(in.alpha2())).epsilon(1e-13));
    }
  }
  SUBCASE("requires t1") {
    CHECK_THROWS_AS(run_mzi(ModeTriple<double>({1, 0}, {0, 0}, {0, 0}, TimeTag::t0), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(signal_atoms(at_t1({1, 0}, {0, 0})), std::invalid_argument);
  }
}

TEST_CASE("atomic signal") {
  const ModeTriple<double> s({std::sqrt(1e6), 0}, {0, 0}, {0, 0}, TimeTag::t3);
  CHECK(signal_atoms(s) == doctest::Approx(-1e6));
}

TEST_CASE("fringe of an uncorrelated coherent interferometer") {
  EnsembleSpec spec;
  spec.n_total = 1e7;
  spec.n_seed = 0;
  spec.r = 0;
  spec.trajectories = 4000;
  const auto e = build_ensemble(spec);
  const auto hs = homodyne_for(e, 100.0, true, CorrectionSign::plus);
  for (int k = 0; k <= 8; ++k) {
    const double phi = k * kPi / 4;
    CAPTURE(phi);
    const auto sa = column(signals_at(e, phi, hs), &SignalSample::s_a);
    const double se = std::sqrt(stats::variance(sa) / sa.size());
    // phi = 0 transfers the condensate into mode 2, so the fringe is +N_t cos(phi).
    CHECK(std::abs(stats::mean(sa) - 1e7 * std::cos(phi)) < 3 * se);
    const auto shifted = column(signals_at(e, phi + 2 * kPi, hs), &SignalSample::s_a);
    CHECK(stats::mean(shifted) == doctest::Approx(stats::mean(sa)).epsilon(1e-9));
  }
}

TEST_CASE("homodyne signal") {
  HomodyneSpec spec;
  spec.lo_amplitude = 1e5;
  spec.lo_sampled = false;

  CHECK(signal_light(at_t1({1, 0}, {0, 0}, {0, 0}), spec, C(0.3, -0.2)) == 0.0);
  CHECK(signal_light(at_t1({1, 0}, {0, 0}, {0, 2.5}), spec, C(0, 0)) == doctest::Approx(-2 * 1e5 * 2.5));

  SUBCASE("closed form equals the port photon difference") {
    spec.lo_amplitude = 3.0;
    spec.lo_sampled = true;
    const C lo_noise(0.2, -0.7);
    const C beta(1.3, -0.4);
    const C lo = C(3.0, 0) + lo_noise;
    const C i(0, 1);
    const C c = (beta - i * lo) / std::sqrt(2.0);
    const C d = (lo - i * beta) / std::sqrt(2.0);
    CHECK(signal_light(at_t1({1, 0}, {0, 0}, beta), spec, lo_noise) ==
          doctest::Approx(std::norm(c) - std::norm(d)).epsilon(1e-13));
  }

  SUBCASE("linear in the light amplitude and in the classical LO") {
    const auto s = at_t1({1, 0}, {0, 0}, {0.7, -1.1});
    const auto s2 = at_t1({1, 0}, {0, 0}, {1.4, -2.2});
    const double base = signal_light(s, spec, C(0, 0));
    CHECK(signal_light(s2, spec, C(0, 0)) == doctest::Approx(2 * base));
    HomodyneSpec doubled = spec;
    doubled.lo_amplitude *= 2;
    CHECK(signal_light(s, doubled, C(0, 0)) == doctest::Approx(2 * base));
  }

  SUBCASE("vacuum shot noise") {
    // Var(-2 Im(beta conj(bL))) = 4 bL^2 Var(Im beta) + O(1) = bL^2 for vacuum beta.
    spec.lo_sampled = true;
    const std::size_t n = 20000;
    std::vector<double> sb(n);
    for (std::size_t k = 0; k < n; ++k) {
      const SeedSpec seed{17, k, StreamTag::light2, 0};
      const auto st = at_t1({1, 0}, {0, 0}, vacuum_noise<double>(seed));
      sb[k] = signal_light(st, spec, vacuum_noise<double>(seed.with_tag(StreamTag::local_oscillator))) / spec.lo_amplitude;
    }
    const double var = stats::variance(sb);
    CHECK(std::abs(stats::mean(sb)) < 5 * std::sqrt(var / n));
    CHECK(std::abs(var - 1.0) < 5 * stats::variance_standard_error(1.0, n));
  }
}

TEST_CASE("combined signal") {
  HomodyneSpec spec;
  spec.gain_g = 100;
  spec.correction_sign = CorrectionSign::plus;
  CHECK(combine_signals(10, 0, spec) == 10);
  CHECK(combine_signals(10, 5, spec) == doctest::Approx(9.95));
  spec.correction_sign = CorrectionSign::minus;
  CHECK(combine_signals(10, 5, spec) == doctest::Approx(10.05));
  spec.correction_sign = CorrectionSign::automatic;
  CHECK_THROWS_AS(combine_signals(10, 5, spec), std::logic_error);
}

TEST_CASE("sign calibration") {
  SUBCASE("exact tie goes to plus") {
    EnsembleAtT1 e;
    for (std::uint64_t i = 0; i < 200; ++i) {
      auto s = random_triple(i);
      s.beta2() = 0;
      e.states.push_back(s);
      e.lo_noise.emplace_back(0, 0);
    }
    HomodyneSpec spec;
    spec.lo_amplitude = 10;
    spec.lo_sampled = false;
    CHECK(calibrate_correction_sign(e, kPi / 2, spec) == CorrectionSign::plus);
  }

  SUBCASE("no squeezing leaves nothing to gain") {
    EnsembleSpec es;
    es.n_seed = 0;
    es.r = 0;
    es.trajectories = 2000;
    const auto e = build_ensemble(es);
    auto spec = homodyne_for(e, 100.0, true, CorrectionSign::plus);
    const auto plus = column(signals_at(e, kPi / 2, spec), &SignalSample::s_combined);
    spec.correction_sign = CorrectionSign::minus;
    const auto minus = column(signals_at(e, kPi / 2, spec), &SignalSample::s_combined);
    const double vp = stats::variance(plus), vm = stats::variance(minus);
    CHECK(std::abs(vp - vm) < 5 * stats::variance_standard_error(vp, plus.size()));
  }

  SUBCASE("squeezed ensemble: sign follows the fringe slope") {
    const auto e = fig3_ensemble();
    auto spec = homodyne_for(e, 100.0, true);
    const auto at_half = calibrate_correction_sign(e, kPi / 2, spec);
    const auto at_three_halves = calibrate_correction_sign(e, 1.5 * kPi, spec);
    CHECK(at_half != at_three_halves);

    spec.correction_sign = at_half;
    const auto samples = signals_at(e, kPi / 2, spec);
    CHECK(stats::variance(column(samples, &SignalSample::s_combined)) <
          stats::variance(column(samples, &SignalSample::s_a)));
  }

  EnsembleAtT1 empty;
  CHECK_THROWS_AS(calibrate_correction_sign(empty, kPi / 2, HomodyneSpec{}), std::invalid_argument);
}

TEST_CASE("correlation between the atomic and optical signals") {
  const auto e = fig3_ensemble();
  auto spec = homodyne_for(e, 100.0, true);
  spec.correction_sign = calibrate_correction_sign(e, kPi / 2, spec);
  const double sign = sign_value(spec.correction_sign);
  auto corr = [&](double phi) {
    const auto samples = signals_at(e, phi, spec);
    std::vector<double> sa, sb;
    for (const auto& s : samples) {
      sa.push_back(s.s_a);
      sb.push_back(sign * s.s_b / spec.gain_g);
    }
    return stats::pearson(sa, sb);
  };
  CHECK(corr(kPi / 2) > 0.9);
  CHECK(std::abs(corr(kPi)) < 0.1);
  CHECK(corr(1.5 * kPi) < -0.9);
}
