#include "ness/dyson.hpp"
#include "ness/errors.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

using namespace ness;

namespace {

constexpr double kPi = 3.14159265358979323846;

HermiteSeries random_series(std::mt19937_64 &rng) {
  std::uniform_int_distribution<int> vars(1, 2), idx(0, 5), terms(1, 6);
  std::normal_distribution<double> c(0.0, 1.0);
  const int M = vars(rng);
  HermiteSeries f(M, 5);
  const int n = terms(rng);
  for (int k = 0; k < n; ++k) {
    HermiteSeries::Index q(M);
    for (int &v : q)
      v = idx(rng);
    f.set(q, {c(rng), c(rng)});
  }
  return f;
}

JunctionSpec unit_gaussian_junction() {
  JunctionSpec s;
  s.kernel1 = RadialFormFactor::gaussian(std::pow(kPi, -1.5), 1.0);
  return s;
}

} // namespace

TEST_CASE("ground state saturates the weighted norm") {
  const HermiteSeries f = HermiteSeries::ground_state(1);
  CHECK(sobolev_norm(f) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.l2_norm() == doctest::Approx(1.0).epsilon(1e-15));
  const HermiteSeries g = HermiteSeries::ground_state(4);
  CHECK(sobolev_norm(g) == doctest::Approx(g.l2_norm()).epsilon(1e-15));
}

TEST_CASE("first excited state") {
  HermiteSeries f(1, 3);
  f.set({1}, 1.0);
  CHECK(sobolev_norm(f) == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(f.l2_norm() == 1.0);
}

TEST_CASE("saturation happens only on the ground state") {
  HermiteSeries f(2, 2);
  f.set({0, 0}, {0.0, 3.0});
  CHECK(sobolev_norm(f) == doctest::Approx(f.l2_norm()).epsilon(1e-15));
  f.set({0, 1}, 1e-3);
  CHECK(sobolev_norm(f) > f.l2_norm());
}

TEST_CASE("weighted norm is monotone under coefficient domination") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> grow(1.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    const HermiteSeries f = random_series(rng);
    HermiteSeries g = f;
    for (const auto &[q, c] : f.coefficients())
      g.set(q, c * grow(rng));
    CHECK(sobolev_norm(f) <= sobolev_norm(g));
  }
}

TEST_CASE("norm inequalities on 100 random truncated series") {
  std::mt19937_64 rng(20261017);
  for (int i = 0; i < 100; ++i) {
    const HermiteSeries f = random_series(rng);
    const double prime = sobolev_norm(f);
    const SeminormResult second = seminorm_translation_invariant(f);
    CHECK(f.l2_norm() <= prime * (1 + 1e-14));
    CHECK(second.value <= prime * (1 + 1e-14));
    CHECK(second.value >= f.l2_norm() * (1 - 1e-12));
  }
}

TEST_CASE("zero shift reproduces the weighted norm") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 10; ++i) {
    const HermiteSeries f = random_series(rng);
    const std::vector<double> zero(f.variables(), 0.0);
    CHECK(sobolev_norm_translated(f, zero) == doctest::Approx(sobolev_norm(f)).epsilon(1e-13));
  }
}

TEST_CASE("translated ground state recentres to one") {
  const HermiteSeries f = HermiteSeries::shifted_ground_state(3.0, 60);
  CHECK(f.l2_norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sobolev_norm(f) > 10.0);
  const SeminormResult r = seminorm_translation_invariant(f);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.shift.front() == doctest::Approx(3.0).epsilon(1e-5));
}

TEST_CASE("zero kernel has zero interaction norm") {
  JunctionSpec s;
  s.kernel1 = RadialFormFactor::gaussian(0.0, 1.0);
  CHECK(interaction_norm(s).total == 0.0);
}

TEST_CASE("product of standard Gaussians saturates") {
  const InteractionNorm n = interaction_norm(unit_gaussian_junction());
  REQUIRE(n.terms.size() == 1);
  CHECK(n.terms[0].per_block == doctest::Approx(1.0).epsilon(1e-12));
  // 1 * 2^(5 * 1) per block, two reservoir orderings.
  CHECK(n.terms[0].blocks == 2);
  CHECK(n.total == doctest::Approx(64.0).epsilon(1e-12));
}

TEST_CASE("interaction norm is homogeneous in the kernel and the coupling") {
  JunctionSpec s = unit_gaussian_junction();
  const double base = interaction_norm(s).total;
  s.kernel1 = s.kernel1->scaled(-2.5);
  CHECK(interaction_norm(s).total == doctest::Approx(2.5 * base).epsilon(1e-12));
  s.g = -0.1;
  CHECK(interaction_norm(s).total == doctest::Approx(0.25 * base).epsilon(1e-12));
}

TEST_CASE("separable and tensor projections agree for Gaussians") {
  InteractionNormOptions tensor;
  tensor.separable_gaussian = false;
  for (auto [a, w] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.7}, std::pair{1.0, 1.5}}) {
    const RadialFormFactor k = RadialFormFactor::gaussian(a, w);
    CHECK(radial_profile_norm(k, 3, tensor) ==
          doctest::Approx(radial_profile_norm(k, 3)).epsilon(1e-12));
  }
}

TEST_CASE("slowly decaying kernels report insufficient truncation") {
  try {
    radial_profile_norm(RadialFormFactor::lorentzian(1.0, 1.0), 3);
    FAIL("expected TruncationInsufficient");
  } catch (const TruncationInsufficient &e) {
    CHECK(e.tail() > 1e-2);
  }
}

TEST_CASE("thermal kernel adds a four-block second-order term") {
  JunctionSpec s = unit_gaussian_junction();
  s.kernel2 = PairFormFactor(*s.kernel1);
  s.xi = 0.5;
  const InteractionNorm n = interaction_norm(s);
  REQUIRE(n.terms.size() == 2);
  CHECK(n.terms[1].order == 2);
  CHECK(n.terms[1].blocks == 4);
  CHECK(n.terms[1].value == doctest::Approx(2 * std::pow(2.0, 10) * 4 * n.terms[1].per_block));
}

TEST_CASE("extra terms are summed with their weight") {
  InteractionNormOptions o;
  o.extra.push_back({3, 1, 0.5, 0.0});
  JunctionSpec s;
  s.kernel1 = RadialFormFactor::gaussian(0.0, 1.0);
  CHECK(interaction_norm(s, o).total == doctest::Approx(3 * std::pow(2.0, 15) * 0.5));
}

TEST_CASE("time decay constant") {
  CHECK(time_decay_constant(3) == doctest::Approx(24 * kPi).epsilon(1e-15));
  CHECK(time_decay_constant(4) == doctest::Approx(16 * kPi).epsilon(1e-15));
  for (int d = 3; d <= 6; ++d)
    CHECK(std::abs(time_decay_integral(d) - time_decay_constant(d)) < 1e-10 * time_decay_constant(d));
  double previous = INFINITY;
  for (int d = 3; d <= 200; ++d) {
    const double c = time_decay_constant(d);
    CHECK(c < previous);
    CHECK(c > 8 * kPi);
    previous = c;
  }
  CHECK_THROWS_AS(time_decay_constant(2), DimensionTooLow);
  CHECK_THROWS_AS(time_decay_integral(1), DimensionTooLow);
}

TEST_CASE("certificate for a vanishing interaction") {
  const Certificate c = certify(InteractionNorm{3, {}, 0.0});
  CHECK(c.x == 0.0);
  CHECK(c.converges);
  CHECK(c.tail_bound(0).value() == 0.0);
  CHECK(c.tail_bound(3).value() == 0.0);
  CHECK(c.term_bound(1) == 0.0);
}

TEST_CASE("certificate at x = 1/2") {
  const Certificate c = certify(InteractionNorm{3, {}, 1.0 / (48 * kPi)});
  CHECK(c.x == 0.5);
  CHECK(c.converges);
  CHECK(std::abs(*c.tail_bound(3) - (std::log(2.0) - 2.0 / 3.0)) < 1e-12);
  CHECK(c.term_bound(2, 3.0) == doctest::Approx(3.0 * 0.25 / 2).epsilon(1e-15));
  CHECK(theorem_bound(2, InteractionNorm{3, {}, 1.0 / (48 * kPi)}, 3.0) == c.term_bound(2, 3.0));
}

TEST_CASE("certificate outside the hypothesis") {
  const Certificate c = certify(InteractionNorm{3, {}, 1.0 / (24 * kPi)});
  CHECK(c.x == doctest::Approx(1.0));
  CHECK_FALSE(c.converges);
  CHECK_FALSE(c.tail_bound(3).has_value());
  CHECK_THROWS_AS(certify(InteractionNorm{2, {}, 0.1}), DimensionTooLow);
}

TEST_CASE("certificate x is homogeneous in the amplitude") {
  JunctionSpec s = unit_gaussian_junction();
  const double x = certify(interaction_norm(s)).x;
  s.kernel1 = s.kernel1->scaled(0.01);
  CHECK(certify(interaction_norm(s)).x == doctest::Approx(0.01 * x).epsilon(1e-12));
}

TEST_CASE("certificate serializes to JSON") {
  const Certificate c = certify(InteractionNorm{3, {}, 1.0 / (48 * kPi)});
  std::ostringstream out;
  write_certificate_json(out, c);
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j["x"] == 0.5);
  CHECK(j["converges"] == true);
  CHECK(j["bounds"].size() == 10);
  CHECK(j["tail"]["m0"] == 3);
  CHECK(j["tail"]["value"].get<double>() == doctest::Approx(std::log(2.0) - 2.0 / 3.0));

  std::ostringstream bad;
  write_certificate_json(bad, certify(InteractionNorm{3, {}, 1.0}));
  CHECK(nlohmann::json::parse(bad.str())["tail"]["value"].is_null());
}
