#include "doctest.h"

#include "twi/phasespace.hpp"
#include "twi/stats.hpp"

#include <cmath>
#include <vector>

using namespace twi;

namespace {

struct Moments {
  std::vector<double> re, im, norm;
};

Moments draw(std::complex<double> mean, std::size_t n, std::uint64_t master, StreamTag tag) {
  Moments m;
  for (std::size_t i = 0; i < n; ++i) {
    const auto z = sample_coherent<double>(mean, SeedSpec{master, i, tag, 0});
    m.re.push_back(z.real());
    m.im.push_back(z.imag());
    m.norm.push_back(std::norm(z));
  }
  return m;
}

}  // namespace

TEST_CASE("vacuum samples have quadrature variance 1/4") {
  const std::size_t n = 20000;
  const auto m = draw({0, 0}, n, 7, StreamTag::light2);
  const double se_mean = std::sqrt(0.25 / n);
  const double se_var = 0.25 * std::sqrt(2.0 / (n - 1));
  CHECK(std::abs(stats::mean(m.re)) < 5 * se_mean);
  CHECK(std::abs(stats::mean(m.im)) < 5 * se_mean);
  CHECK(std::abs(stats::variance(m.re) - 0.25) < 5 * se_var);
  CHECK(std::abs(stats::variance(m.im) - 0.25) < 5 * se_var);

  // X = a + a* has unit vacuum variance.
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 2 * m.re[i];
  CHECK(std::abs(stats::variance(x) - 1.0) < 5 * 4 * se_var);
}

TEST_CASE("symmetric ordering recovers the occupation") {
  const std::size_t n = 10000;
  for (double occupation : {0.0, 1e4, 1e7}) {
    CAPTURE(occupation);
    const auto m = draw({std::sqrt(occupation), 0}, n, 11, StreamTag::atoms1);
    // Var(|a|^2) = occupation + 1/4 for a coherent Wigner sample.
    const double se = std::sqrt(stats::variance(m.norm) / n);
    CHECK(std::abs(stats::mean(m.norm) - 0.5 - occupation) < 3 * se);
  }
}

TEST_CASE("distinct stream tags are uncorrelated") {
  const std::size_t n = 20000;
  const auto a = draw({0, 0}, n, 3, StreamTag::atoms1);
  const auto b = draw({0, 0}, n, 3, StreamTag::atoms2);
  const auto c = draw({0, 0}, n, 3, StreamTag::local_oscillator);
  const double se = 0.25 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(stats::covariance(a.re, b.re)) < 5 * se);
  CHECK(std::abs(stats::covariance(a.im, c.im)) < 5 * se);
  CHECK(std::abs(stats::covariance(b.re, c.im)) < 5 * se);
  CHECK(std::abs(stats::covariance(a.re, a.im)) < 5 * se);
}

TEST_CASE("sampling is a pure function of the seed tuple") {
  const SeedSpec s{123456789, 42, StreamTag::light2, 0};
  const auto a = sample_coherent<double>({1.5, -2.0}, s);
  const auto b = sample_coherent<double>({1.5, -2.0}, s);
  CHECK(a.real() == b.real());
  CHECK(a.imag() == b.imag());
  CHECK(sample_coherent<double>({0, 0}, s.with_draw(1)) != sample_coherent<double>({0, 0}, s));
  CHECK(sample_coherent<double>({0, 0}, s.with_tag(StreamTag::atoms1)) != sample_coherent<double>({0, 0}, s));
}

TEST_CASE("initial state") {
  const SeedSpec base{99, 0, StreamTag::atoms1, 0};

  SUBCASE("unseeded condensate") {
    const auto s = sample_initial_state<double>(1e7, 0, base);
    CHECK(s.time_tag == TimeTag::t0);
    CHECK(s.alpha1().real() == doctest::Approx(3162.2777).epsilon(1e-3));
    CHECK(std::abs(s.alpha2()) < 3.0);
    CHECK(std::abs(s.beta2()) < 3.0);
    CHECK(s.finite());
  }

  SUBCASE("seed occupation") {
    const std::size_t n = 10000;
    std::vector<double> occ(n);
    for (std::size_t i = 0; i < n; ++i) {
      occ[i] = std::norm(sample_initial_state<double>(1e7, 1e4, {5, i, StreamTag::atoms1, 0}).alpha2());
    }
    const double se = std::sqrt(stats::variance(occ) / n);
    CHECK(std::abs(stats::mean(occ) - 0.5 - 1e4) < 3 * se);
  }

  SUBCASE("seed phase convention") {
    // Noise is shared between the two calls, so only the mean rotates.
    const auto quad = sample_initial_state<double>(1e7, 1e4, base);
    const auto real = sample_initial_state<double>(1e7, 1e4, base, 0.0);
    const auto diff = quad.alpha2() - real.alpha2();
    CHECK(diff.real() == doctest::Approx(-100.0));
    CHECK(diff.imag() == doctest::Approx(100.0));
  }

  SUBCASE("preconditions") {
    CHECK_THROWS_AS(sample_initial_state<double>(1, 2, base), std::invalid_argument);
    CHECK_THROWS_AS(sample_initial_state<double>(10, 10, base), std::invalid_argument);
    CHECK_THROWS_AS(sample_initial_state<double>(0, 0, base), std::invalid_argument);
    CHECK_THROWS_AS(sample_initial_state<double>(NAN, 0, base), std::invalid_argument);
    CHECK_THROWS_AS(sample_initial_state<double>(10, -1, base), std::invalid_argument);
  }
}

TEST_CASE("time tags only advance") {
  ModeTriple<double> s;
  s.advance_to(TimeTag::t1);
  s.advance_to(TimeTag::t3);
  CHECK_THROWS_AS(s.advance_to(TimeTag::t2), std::logic_error);
}

TEST_CASE("single precision instantiation") {
  const auto s = sample_initial_state<float>(1e4f, 0.f, {1, 0, StreamTag::atoms1, 0});
  CHECK(s.finite());
  CHECK(s.alpha1().real() == doctest::Approx(100.0f).epsilon(0.02));
}
