#pragma once

// Phase-space amplitudes of the three retained modes and Wigner sampling of
// Glauber coherent states.

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace twi {

template <typename Scalar>
using ComplexAmp = std::complex<Scalar>;

template <typename Scalar>
using ModeVector = Eigen::Matrix<std::complex<Scalar>, 3, 1>;

enum class TimeTag : std::uint8_t { t0 = 0, t1 = 1, t2 = 2, t3 = 3 };

inline std::string_view to_string(TimeTag tag) {
  switch (tag) {
    case TimeTag::t0: return "t0";
    case TimeTag::t1: return "t1";
    case TimeTag::t2: return "t2";
    case TimeTag::t3: return "t3";
  }
  return "?";
}

/// c-number state of the condensate mode, the transferred-atom mode and the
/// scattered-light mode. Components are stored in that order.
template <typename Scalar = double>
struct ModeTriple {
  ModeVector<Scalar> amps = ModeVector<Scalar>::Zero();
  TimeTag time_tag = TimeTag::t0;

  ModeTriple() = default;
  ModeTriple(ComplexAmp<Scalar> alpha1, ComplexAmp<Scalar> alpha2,
             ComplexAmp<Scalar> beta2, TimeTag tag = TimeTag::t0)
      : time_tag(tag) {
    amps << alpha1, alpha2, beta2;
  }

  ComplexAmp<Scalar>& alpha1() { return amps(0); }
  ComplexAmp<Scalar>& alpha2() { return amps(1); }
  ComplexAmp<Scalar>& beta2() { return amps(2); }
  const ComplexAmp<Scalar>& alpha1() const { return amps(0); }
  const ComplexAmp<Scalar>& alpha2() const { return amps(1); }
  const ComplexAmp<Scalar>& beta2() const { return amps(2); }

  bool finite() const {
    for (Eigen::Index i = 0; i < 3; ++i) {
      if (!std::isfinite(amps(i).real()) || !std::isfinite(amps(i).imag())) return false;
    }
    return true;
  }

  /// Time tags only move forward along t0 -> t1 -> t2 -> t3.
  void advance_to(TimeTag next) {
    if (static_cast<int>(next) < static_cast<int>(time_tag)) {
      throw std::logic_error("ModeTriple: time tag cannot move from " +
                             std::string(to_string(time_tag)) + " back to " +
                             std::string(to_string(next)));
    }
    time_tag = next;
  }
};

// ---------------------------------------------------------------------------
// Counter-based noise. Every draw is a pure function of
// (master_seed, trajectory_index, stream_tag, draw), so ensembles do not
// depend on how trajectories are scheduled across threads.

enum class StreamTag : std::uint8_t { atoms1 = 0, atoms2 = 1, light2 = 2, local_oscillator = 3 };

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t trajectory_index = 0;
  StreamTag stream_tag = StreamTag::atoms1;
  // Block counter inside one stream; each block yields one complex Gaussian.
  std::uint64_t draw = 0;

  SeedSpec with_tag(StreamTag tag) const {
    SeedSpec out = *this;
    out.stream_tag = tag;
    return out;
  }
  SeedSpec with_draw(std::uint64_t d) const {
    SeedSpec out = *this;
    out.draw = d;
    return out;
  }
};

namespace detail {

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t stream_key(std::uint64_t master, std::uint64_t index,
                                   std::uint64_t domain) {
  std::uint64_t k = mix64(master);
  k = mix64(k ^ (index * 0xd1b54a32d192ed03ULL));
  return mix64(k ^ (domain * 0xaef17502108ef2d9ULL + 0x632be59bd9b4e019ULL));
}

/// Uniform in the open interval (0, 1).
constexpr double counter_uniform(std::uint64_t key, std::uint64_t counter) {
  const std::uint64_t bits = mix64(key ^ mix64(counter));
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

/// Stateless generator keyed by a 64-bit value; `uniform(i)` is a pure
/// function of (key, i).
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

  constexpr double uniform(std::uint64_t counter) const {
    return detail::counter_uniform(key_, counter);
  }

  /// Pair of independent standard normals (Box-Muller) from block `block`.
  std::complex<double> normal_pair(std::uint64_t block) const {
    const double u1 = uniform(2 * block);
    const double u2 = uniform(2 * block + 1);
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    return {rad * std::cos(ang), rad * std::sin(ang)};
  }

  /// Index uniformly distributed in [0, n).
  std::uint64_t index(std::uint64_t counter, std::uint64_t n) const {
    const auto i = static_cast<std::uint64_t>(uniform(counter) * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

 private:
  std::uint64_t key_;
};

inline CounterRng rng_for(const SeedSpec& seed) {
  return CounterRng(detail::stream_key(seed.master_seed, seed.trajectory_index,
                                       static_cast<std::uint64_t>(seed.stream_tag)));
}

/// Vacuum Wigner noise: independent real and imaginary parts with variance
/// 1/4 each, so <|eta|^2> = 1/2 and the quadrature a + a* has variance 1.
template <typename Scalar = double>
ComplexAmp<Scalar> vacuum_noise(const SeedSpec& seed) {
  const auto z = rng_for(seed).normal_pair(seed.draw);
  return {static_cast<Scalar>(0.5 * z.real()), static_cast<Scalar>(0.5 * z.imag())};
}

template <typename Scalar = double>
ComplexAmp<Scalar> sample_coherent(ComplexAmp<Scalar> mean_amplitude, const SeedSpec& seed) {
  return mean_amplitude + vacuum_noise<Scalar>(seed);
}

/// Initial Wigner sample at t0: condensate with n_total - n_seed atoms,
/// seed mode with n_seed atoms at phase `seed_phase` relative to the
/// condensate, empty light mode.
template <typename Scalar = double>
ModeTriple<Scalar> sample_initial_state(Scalar n_total, Scalar n_seed, const SeedSpec& seed_base,
                                        Scalar seed_phase = std::numbers::pi_v<Scalar> / 2) {
  if (!std::isfinite(n_total) || !std::isfinite(n_seed) || !std::isfinite(seed_phase)) {
    throw std::invalid_argument("sample_initial_state: non-finite input");
  }
  if (!(n_total > 0)) throw std::invalid_argument("sample_initial_state: n_total must be > 0");
  if (n_seed < 0 || n_seed >= n_total) {
    throw std::invalid_argument("sample_initial_state: need 0 <= n_seed < n_total");
  }
  const ComplexAmp<Scalar> mean1(std::sqrt(n_total - n_seed), 0);
  const ComplexAmp<Scalar> mean2 = std::polar(std::sqrt(n_seed), seed_phase);
  return ModeTriple<Scalar>(sample_coherent<Scalar>(mean1, seed_base.with_tag(StreamTag::atoms1)),
                            sample_coherent<Scalar>(mean2, seed_base.with_tag(StreamTag::atoms2)),
                            sample_coherent<Scalar>({0, 0}, seed_base.with_tag(StreamTag::light2)),
                            TimeTag::t0);
}

}  // namespace twi
