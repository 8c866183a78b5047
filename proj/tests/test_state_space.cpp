#include <doctest.h>

#include <cmath>

#include "qrlab/error.hpp"
#include "qrlab/parallel.hpp"
#include "qrlab/state_space.hpp"
#include "support.hpp"

using namespace qrlab;
using test::bloch_state;

TEST_CASE("density state validation") {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 0.5;
  CHECK_THROWS_AS(DensityState{m}, ValidationError);  // trace 1/2
  m(0, 0) = 1.5;
  m(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityState{m}, ValidationError);  // not positive
  CHECK_NOTHROW(DensityState::maximally_mixed(3));
}

TEST_CASE("trace distance is the Bloch distance on qubits") {
  auto g = test::rng(1);
  for (int i = 0; i < 50; ++i) {
    const Vec3 x = test::random_bloch(g);
    const Vec3 y = test::random_bloch(g);
    const Vec3 d{x[0] - y[0], x[1] - y[1], x[2] - y[2]};
    CHECK(trace_distance(bloch_state(x), bloch_state(y)) == doctest::Approx(test::norm3(d)).epsilon(1e-9));
  }
}

TEST_CASE("trace distance is a metric") {
  auto g = test::rng(2);
  for (int i = 0; i < 30; ++i) {
    const auto a = test::random_state(3, g);
    const auto b = test::random_state(3, g);
    const auto c = test::random_state(3, g);
    CHECK(trace_distance(a, a) < 1e-10);
    CHECK(trace_distance(a, b) == doctest::Approx(trace_distance(b, a)));
    CHECK(trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-10);
    CHECK(trace_distance(a, b) <= 2.0 + 1e-10);
  }
}

TEST_CASE("ball membership is strict") {
  const auto c = bloch_state({0, 0, 0});
  Ball b(c, 0.5);
  CHECK(contains(b, bloch_state({0.49, 0, 0})));
  CHECK_FALSE(contains(b, bloch_state({0.5, 0, 0})));
  CHECK_THROWS_AS(Ball(c, 0.0), ValidationError);
}

TEST_CASE("ball containment is sound") {
  auto g = test::rng(3);
  for (int i = 0; i < 40; ++i) {
    const Vec3 x = test::random_bloch(g, 0.5);
    const Vec3 y = test::random_bloch(g, 0.5);
    Ball outer(bloch_state(x), 0.2 + uniform01(g));
    Ball inner(bloch_state(y), 0.05 + 0.3 * uniform01(g));
    if (!ball_contains(outer, inner)) continue;
    for (const auto& rho : sample_states(Condition({inner}), 20, i)) CHECK(contains(outer, rho));
  }
}

TEST_CASE("ball intersection is exact for qubits") {
  // Centers 1.2 apart on the z axis; radii 0.7 and 0.6 overlap.
  Ball a(bloch_state({0, 0, 0.6}), 0.7);
  Ball b(bloch_state({0, 0, -0.6}), 0.6);
  const auto r = intersect_balls(a, b);
  REQUIRE(r.nonempty);
  CHECK(contains(a, *r.witness));
  CHECK(contains(b, *r.witness));
  Ball c(bloch_state({0, 0, -0.6}), 0.4);
  CHECK_FALSE(intersect_balls(a, c).nonempty);
}

TEST_CASE("intersection cover lies inside both conditions") {
  auto g = test::rng(4);
  int nonempty = 0;
  for (int i = 0; i < 30; ++i) {
    Condition w1({Ball(bloch_state(test::random_bloch(g)), 0.3 + 0.5 * uniform01(g))});
    Condition w2({Ball(bloch_state(test::random_bloch(g)), 0.3 + 0.5 * uniform01(g))});
    const auto cover = intersection_cover(w1, w2);
    CHECK(cover.empty() == !conditions_intersect(w1, w2).nonempty);
    if (cover.empty()) continue;
    ++nonempty;
    CHECK(condition_contains(w1, cover));
    CHECK(condition_contains(w2, cover));
  }
  CHECK(nonempty > 5);
}

TEST_CASE("samples lie in the condition and are deterministic") {
  Condition w({Ball(bloch_state({0.3, 0, 0}), 0.2), Ball(DensityState::maximally_mixed(2), 0.1)});
  const auto s1 = sample_states(w, 64, 9);
  const auto s2 = sample_states(w, 64, 9);
  REQUIRE(s1.size() == 64);
  for (std::size_t i = 0; i < s1.size(); ++i) {
    CHECK(contains(w, s1[i]));
    CHECK((s1[i].matrix() - s2[i].matrix()).norm() == 0.0);
  }
  const auto s3 = sample_states(w, 64, 10);
  CHECK((s1[0].matrix() - s3[0].matrix()).norm() > 0.0);
}

TEST_CASE("samples do not depend on the thread count") {
  Condition w = Condition::ball(DensityState::maximally_mixed(4), 0.3);
  setenv("QRLAB_THREADS", "1", 1);
  const auto serial = sample_states(w, 32, 5);
  setenv("QRLAB_THREADS", "4", 1);
  const auto parallel = sample_states(w, 32, 5);
  unsetenv("QRLAB_THREADS");
  for (std::size_t i = 0; i < serial.size(); ++i) CHECK((serial[i].matrix() - parallel[i].matrix()).norm() == 0.0);
}

TEST_CASE("parallel_for propagates exceptions") {
  setenv("QRLAB_THREADS", "3", 1);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                    if (i == 7) throw NumericError("boom");
                  }),
                  NumericError);
  unsetenv("QRLAB_THREADS");
}

TEST_CASE("perturb_nonzero moves the value within eps") {
  auto g = test::rng(5);
  for (int i = 0; i < 50; ++i) {
    const Eigen::Index dim = 2 + i % 3;
    const auto a = test::random_operator(dim, g);
    const auto rho = test::random_state(dim, g);
    for (double eps : {1e-1, 1e-3, 1e-6}) {
      const auto sigma = perturb_nonzero(rho, a, eps);
      CHECK(trace_distance(rho, sigma) < eps);
      CHECK(sigma.expectation(a) != rho.expectation(a));
    }
  }
}

TEST_CASE("perturb_nonzero fails only for scalar operators") {
  CHECK_THROWS_AS(perturb_nonzero(DensityState::maximally_mixed(2), HermitianOperator::identity(2), 0.1),
                  ValidationError);
}

TEST_CASE("unitary conjugation preserves trace distance") {
  auto g = test::rng(6);
  for (int i = 0; i < 20; ++i) {
    const auto u = random_unitary(3, g);
    const auto a = test::random_state(3, g);
    const auto b = test::random_state(3, g);
    CHECK(trace_distance(conjugate(a, u), conjugate(b, u)) == doctest::Approx(trace_distance(a, b)).epsilon(1e-9));
  }
}

TEST_CASE("project_to_states returns a valid state") {
  ComplexMatrix m(2, 2);
  m << 1.2, 0, 0, -0.2;
  const auto rho = project_to_states(m);
  CHECK(rho.matrix()(0, 0).real() == doctest::Approx(1.0));
  CHECK(std::abs(rho.matrix()(1, 1)) < 1e-12);
}

TEST_CASE("whole covers every state") {
  auto g = test::rng(8);
  const auto w = Condition::whole(3);
  for (int i = 0; i < 20; ++i) CHECK(contains(w, DensityState::pure(random_unit_vector(3, g))));
}

TEST_CASE("max_sampled_distance attributes samples to their ball") {
  const auto up = DensityState::basis(2, 0);
  const auto down = DensityState::basis(2, 1);
  Condition w({Ball(up, 0.3), Ball(down, 0.1)});
  const auto samples = sample_states(w, 200, 3);
  const auto reach = max_sampled_distance(w, samples);
  REQUIRE(reach.size() == 2);
  CHECK(reach[0] < 0.3);
  CHECK(reach[1] < 0.1);
  CHECK(reach[0] > 0.2);
}
