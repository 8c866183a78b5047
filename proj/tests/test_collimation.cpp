#include <doctest.h>

#include <cmath>

#include "qrlab/collimation.hpp"
#include "qrlab/error.hpp"
#include "support.hpp"

using namespace qrlab;
using test::bloch_state;

TEST_CASE("spread of sigma_z over a ball around |0>") {
  // s^2 = 1 - z^2 on the Bloch ball, so the maximum sits at z = 1 - r.
  const auto s = spread_summary(sigma_z(), Condition::ball(DensityState::basis(2, 0), 0.1), {});
  CHECK(s.range.lo == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(s.range.hi == doctest::Approx(std::sqrt(1 - 0.81)).epsilon(1e-6));
  CHECK(s.conservative_hi == doctest::Approx(s.range.hi));
}

TEST_CASE("spread summary bounds sampled spreads in higher dimension") {
  auto g = test::rng(21);
  for (int i = 0; i < 5; ++i) {
    const auto a = test::random_operator(3, g);
    const auto w = Condition::ball(test::random_state(3, g), 0.2);
    const auto s = spread_summary(a, w, {64, 1, 16});
    for (const auto& rho : sample_states(w, 100, 7)) {
      const double m = rho.expectation(a);
      const double v = rho.expectation(HermitianOperator(a.matrix() * a.matrix())) - m * m;
      CHECK(std::sqrt(std::max(0.0, v)) <= s.conservative_hi + 1e-9);
    }
  }
}

TEST_CASE("eps must lie in (0, 1)") {
  const auto w = Condition::ball(DensityState::basis(2, 0), 0.01);
  CHECK_THROWS_AS(is_eps_sharp(sigma_z(), {0.5, 1.5}, 0.0, w, {}), ValidationError);
  CHECK_THROWS_AS(is_eps_sharp(sigma_z(), {0.5, 1.5}, 1.0, w, {}), ValidationError);
}

TEST_CASE("sharp collimation near an eigenstate") {
  const auto w = Condition::ball(DensityState::basis(2, 0), 1e-3);
  const auto r = is_eps_sharp(sigma_z(), {0.8, 1.2}, 0.1, w, {});
  CHECK(r.mean_within);
  CHECK(r.lower_bracket);
  CHECK(r.upper_bracket);
  CHECK(r.sharp);
  CHECK(r.located);
  CHECK(r.witnesses.empty());
}

TEST_CASE("failed clauses come with witnesses") {
  const auto w = Condition::ball(DensityState::maximally_mixed(2), 0.2);
  const auto r = is_eps_sharp(sigma_z(), {0.8, 1.2}, 0.1, w, {});
  CHECK_FALSE(r.sharp);
  CHECK_FALSE(r.witnesses.empty());
  for (const auto& wt : r.witnesses) CHECK(contains(w, wt.state));
}

TEST_CASE("sharp implies located on random qubit instances") {
  auto g = test::rng(22);
  int sharp = 0;
  for (int i = 0; i < 100; ++i) {
    const auto a = test::random_operator(2, g);
    const auto ev = eigenvalues(a.matrix());
    const auto center = DensityState::pure(eig_decompose(a).eigenvectors.col(uniform01(g) < 0.5 ? 0 : 1));
    const double r = std::pow(10.0, -3.0 + 2.0 * uniform01(g));
    const double eps = 0.02 + 0.3 * uniform01(g);
    const double half = (0.1 + uniform01(g)) * (ev(1) - ev(0));
    const double mid = center.expectation(a) + (uniform01(g) - 0.5) * half;
    const auto rep = is_eps_sharp(a, {mid - half, mid + half}, eps, Condition::ball(center, r), {64, 1, 16});
    if (!rep.sharp) continue;
    ++sharp;
    CHECK(rep.located);
    CHECK(rep.projection_inf > 1 - eps);
  }
  CHECK(sharp > 10);
}

TEST_CASE("strict collimation bounds the disturbance") {
  const auto w = Condition::ball(DensityState::basis(2, 0), 1e-3);
  const auto r = is_strictly_eps_sharp(sigma_z(), {0.8, 1.2}, 0.1, w, {});
  REQUIRE(r.disturbance_sup.has_value());
  CHECK(*r.disturbance_sup < 0.1);
  CHECK(r.strict);
  const auto loose = is_strictly_eps_sharp(sigma_x(), {0.8, 1.2}, 0.1, w, {});
  CHECK_FALSE(loose.strict);
}

TEST_CASE("located is monotone in the interval") {
  const auto w = Condition::ball(bloch_state({0, 0, 0.9}), 0.05);
  CHECK(is_eps_located(sigma_z(), {0.5, 1.5}, 0.1, w, {}));
  CHECK_FALSE(is_eps_located(sigma_z(), {-1.5, -0.5}, 0.1, w, {}));
}

TEST_CASE("Heisenberg worked instance: sigma_x and sigma_y at the x+y direction") {
  // c = Tr rho (-i[sx, sy]) = 2 z vanishes on the equator, so choose a state
  // tilted toward z and intervals that make both sharp.
  const double s = 1.0 / std::sqrt(2.0);
  const auto w = Condition::ball(bloch_state({0.6 * s, 0.6 * s, 0.8}), 1e-4);
  const auto rec = heisenberg_check(sigma_x(), sigma_y(), {0.4243 - 1.5, 0.4243 + 1.5},
                                    {0.4243 - 1.5, 0.4243 + 1.5}, 0.4, w, {});
  CHECK(rec.lhs == doctest::Approx(9.0));
  CHECK(rec.rhs == doctest::Approx(8.0).epsilon(0.01));
  CHECK(rec.both_sharp);
  CHECK(rec.satisfied);
}

TEST_CASE("Heisenberg inequality on random sharp instances") {
  auto g = test::rng(23);
  int both = 0;
  for (int i = 0; i < 60; ++i) {
    const auto center = bloch_state(test::random_bloch(g));
    const auto w = Condition::ball(center, 1e-3);
    const auto a = test::random_operator(2, g);
    const auto b = test::random_operator(2, g);
    const double eps = 0.05 + 0.5 * uniform01(g);
    auto interval = [&](const HermitianOperator& op) {
      const double m = center.expectation(op);
      const double h = 0.5 + 3.0 * uniform01(g);
      return Interval{m - h, m + h};
    };
    const auto rec = heisenberg_check(a, b, interval(a), interval(b), eps, w, {64, 1, 16});
    if (!rec.both_sharp) continue;
    ++both;
    CHECK(rec.satisfied);
  }
  CHECK(both > 10);
}
