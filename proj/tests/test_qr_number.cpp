#include <doctest.h>

#include <cmath>

#include "oracles/bloch_oracle.hpp"
#include "qrlab/error.hpp"
#include "qrlab/qr_number.hpp"
#include "support.hpp"

using namespace qrlab;
using test::bloch_state;

namespace {

Condition qubit_ball(const Vec3& c, double r) { return Condition::ball(bloch_state(c), r); }

}  // namespace

TEST_CASE("locally linear evaluation") {
  const auto w = qubit_ball({0, 0, 0.5}, 0.3);
  LocallyLinearQr a(sigma_z(), w);
  CHECK(a.eval_at(bloch_state({0, 0, 0.6})) == doctest::Approx(0.6));
  CHECK_THROWS_AS(a.eval_at(bloch_state({0, 0, -0.5})), ExtentError);
  CHECK_THROWS_AS(LocallyLinearQr(sigma_z(), Condition::ball(DensityState::maximally_mixed(3), 0.1)),
                  ValidationError);
}

TEST_CASE("arithmetic evaluates pointwise") {
  const auto w = qubit_ball({0.2, 0.1, 0.3}, 0.4);
  const auto x = QrNumber::linear(sigma_x(), w);
  const auto z = QrNumber::linear(sigma_z(), w);
  const auto rho = bloch_state({0.3, 0.1, 0.4});
  CHECK(eval_at(qr_add(x, z), rho) == doctest::Approx(0.7));
  CHECK(eval_at(qr_sub(x, z), rho) == doctest::Approx(-0.1));
  CHECK(eval_at(qr_mul(x, z), rho) == doctest::Approx(0.12));
  CHECK(eval_at(qr_scale(z, -2), rho) == doctest::Approx(-0.8));
  CHECK(eval_at(qr_apply(ContinuousFunction::named("exp"), x), rho) == doctest::Approx(std::exp(0.3)));
  CHECK(eval_at(qr_apply(ContinuousFunction::polynomial({1, 0, 2}), z), rho) == doctest::Approx(1.32));
  CHECK(eval_at(QrNumber::constant(1.5, w), rho) == 1.5);
}

TEST_CASE("function whitelist") {
  CHECK_THROWS_AS(ContinuousFunction::named("tan"), ValidationError);
  CHECK_THROWS_AS(ContinuousFunction::named("sqrt+")(-1.0), DomainError);
  CHECK(ContinuousFunction::named("abs")(-2.0) == 2.0);
  CHECK(ContinuousFunction::named("cos")(0.0) == 1.0);
}

TEST_CASE("combining disjoint extents is an empty section") {
  const auto a = QrNumber::linear(sigma_z(), qubit_ball({0, 0, 0.8}, 0.1));
  const auto b = QrNumber::linear(sigma_z(), qubit_ball({0, 0, -0.8}, 0.1));
  CHECK_THROWS_AS(qr_add(a, b), EmptySectionError);
}

TEST_CASE("combined extent is inside both operands") {
  const auto a = QrNumber::linear(sigma_z(), qubit_ball({0, 0, 0.3}, 0.5));
  const auto b = QrNumber::linear(sigma_x(), qubit_ball({0.3, 0, 0}, 0.5));
  const auto s = qr_add(a, b);
  CHECK(condition_contains(a.extent(), s.extent()));
  CHECK(condition_contains(b.extent(), s.extent()));
  for (const auto& rho : sample_states(s.extent(), 20, 1))
    CHECK(s.eval_at(rho) == doctest::Approx(rho.expectation(sigma_z()) + rho.expectation(sigma_x())));
}

TEST_CASE("restriction requires a sub-condition") {
  const auto a = QrNumber::linear(sigma_z(), qubit_ball({0, 0, 0}, 0.5));
  CHECK_NOTHROW(qr_restrict(a, qubit_ball({0.1, 0, 0}, 0.2)));
  CHECK_THROWS_AS(qr_restrict(a, qubit_ball({0.4, 0, 0}, 0.3)), ExtentError);
}

TEST_CASE("sigma_z over a small ball around |0>") {
  const auto r = eval_range(QrNumber::linear(sigma_z(), Condition::ball(DensityState::basis(2, 0), 0.1)), {});
  CHECK(r.rigor == Rigor::ClosedForm);
  CHECK(r.hi == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.lo == doctest::Approx(0.9).epsilon(1e-6));
}

TEST_CASE("eval_range matches the Bloch brute-force oracle") {
  auto g = test::rng(11);
  for (int i = 0; i < 50; ++i) {
    const Vec3 c = test::random_bloch(g);
    const double r = 0.05 + 0.45 * uniform01(g);
    const auto a = test::random_operator(2, g) * (1.0 / std::max(1.0, operator_norm(test::random_operator(2, g))));
    const auto range = eval_range(QrNumber::linear(a, qubit_ball(c, r)), {64, static_cast<std::uint64_t>(i), 48});
    const auto o = oracle::bloch_grid(a, c, r);
    // The oracle only visits feasible points: it is an inner bound.
    CHECK(o.hi <= range.hi + 1e-9);
    CHECK(o.lo >= range.lo - 1e-9);
    CHECK(range.hi - o.hi <= 0.01);
    CHECK(o.lo - range.lo <= 0.01);
  }
}

TEST_CASE("qubit extremizers lie in the ball and attain the range") {
  auto g = test::rng(12);
  for (int i = 0; i < 30; ++i) {
    const auto ball = Ball(bloch_state(test::random_bloch(g)), 0.05 + uniform01(g));
    const auto a = test::random_operator(2, g);
    const auto e = linear_extrema(a, ball, {});
    CHECK(e.exact);
    CHECK(contains(ball, e.argmax));
    CHECK(contains(ball, e.argmin));
    CHECK(e.argmax.expectation(a) == doctest::Approx(e.hi).epsilon(1e-6));
    CHECK(e.argmin.expectation(a) == doctest::Approx(e.lo).epsilon(1e-6));
  }
}

TEST_CASE("general dimension range lies inside the sound enclosure") {
  auto g = test::rng(13);
  for (int i = 0; i < 10; ++i) {
    const Eigen::Index dim = 3 + i % 3;
    const auto a = test::random_operator(dim, g);
    const Ball ball(test::random_state(dim, g), 0.1 + 0.3 * uniform01(g));
    const auto outer = linear_outer_bound(a, ball);
    const auto s = summarize_linear(a, Condition({ball}), {128, 1, 48});
    CHECK(outer.lo <= s.range.lo + 1e-9);
    CHECK(s.range.hi <= outer.hi + 1e-9);
    CHECK(s.conservative.lo <= s.range.lo);
    CHECK(s.range.hi <= s.conservative.hi);
    for (const auto& rho : s.samples) CHECK(s.range.interval().contains(rho.expectation(a)));
  }
}

TEST_CASE("more samples never shrink the range") {
  const auto w = Condition::ball(DensityState::maximally_mixed(3), 0.4);
  auto g = test::rng(14);
  const auto a = test::random_operator(3, g);
  const auto q = qr_mul(QrNumber::linear(a, w), QrNumber::linear(a, w));
  const auto small = eval_range(q, {32, 3, 0});
  const auto large = eval_range(q, {256, 3, 0});
  CHECK(large.lo <= small.lo);
  CHECK(large.hi >= small.hi);
  CHECK(large.rigor == Rigor::Sampled);
}

TEST_CASE("enclosure contains sampled values of compound sections") {
  auto g = test::rng(15);
  for (int i = 0; i < 10; ++i) {
    const auto w = Condition::ball(test::random_state(2, g), 0.3);
    const auto a = QrNumber::linear(test::random_operator(2, g), w);
    const auto b = QrNumber::linear(test::random_operator(2, g), w);
    const auto q = qr_apply(ContinuousFunction::named("sin"), qr_sub(qr_mul(a, b), qr_scale(a, 0.5)));
    const auto box = enclosure(q);
    const auto r = eval_range(q, {128, static_cast<std::uint64_t>(i), 0});
    CHECK(box.lo <= r.lo + 1e-12);
    CHECK(r.hi <= box.hi + 1e-12);
  }
}

TEST_CASE("lipschitz bound holds on sampled pairs") {
  auto g = test::rng(16);
  for (int i = 0; i < 10; ++i) {
    const auto w = Condition::ball(test::random_state(3, g), 0.3);
    const auto a = QrNumber::linear(test::random_operator(3, g), w);
    const auto q = qr_add(qr_mul(a, a), qr_apply(ContinuousFunction::named("exp"), a));
    const double lip = lipschitz_bound(q);
    const auto s = sample_states(w, 40, i);
    for (std::size_t k = 0; k + 1 < s.size(); ++k)
      CHECK(std::abs(q.eval_at(s[k]) - q.eval_at(s[k + 1])) <= lip * trace_distance(s[k], s[k + 1]) + 1e-12);
  }
}

TEST_CASE("linear lipschitz constant is half the spectral spread") {
  CHECK(linear_lipschitz(sigma_z()) == doctest::Approx(1.0));
  CHECK(linear_lipschitz(HermitianOperator::identity(3)) == doctest::Approx(0.0));
}

TEST_CASE("Hausdorff separation of distinct states") {
  auto g = test::rng(17);
  for (int i = 0; i < 20; ++i) {
    const auto r1 = test::random_state(2, g);
    const auto r2 = test::random_state(2, g);
    const double d = trace_distance(r1, r2);
    const auto b1 = Ball(r1, d / 2);
    const auto b2 = Ball(r2, d / 2);
    CHECK_FALSE(intersect_balls(b1, b2).nonempty);
  }
}

TEST_CASE("order_extent yields a region where a < b") {
  const auto w = Condition::ball(DensityState::maximally_mixed(2), 0.8);
  const auto a = QrNumber::linear(sigma_z(), w);
  const auto b = QrNumber::linear(sigma_x(), w);
  const auto v = order_extent(a, b, 0.2, {128, 4, 0});
  REQUIRE_FALSE(v.empty());
  CHECK(condition_contains(w, v));
  for (const auto& rho : sample_states(v, 200, 5)) CHECK(a.eval_at(rho) < b.eval_at(rho));
  // Constant comparisons: 1 < 0 holds nowhere.
  CHECK(order_extent(QrNumber::constant(1, w), QrNumber::constant(0, w), 0.2, {}).empty());
}

TEST_CASE("extension by zero") {
  const auto w = qubit_ball({0, 0, 0.8}, 0.1);
  const auto e = extend_by_zero(QrNumber::linear(sigma_z(), w));
  CHECK(e.eval_at(bloch_state({0, 0, 0.85})) == doctest::Approx(0.85));
  CHECK(e.eval_at(bloch_state({0, 0, -0.5})) == 0.0);
  const auto r = e.range_over_state_space({});
  CHECK(r.lo == 0.0);
  CHECK(r.hi == doctest::Approx(0.9).epsilon(1e-6));
}

TEST_CASE("covariance: transformed section at the image state") {
  auto g = test::rng(18);
  for (int i = 0; i < 20; ++i) {
    const auto u = random_unitary(3, g);
    const auto rho = test::random_state(3, g);
    const LocallyLinearQr q(test::random_operator(3, g), Condition::ball(rho, 0.2));
    const auto t = covariance_transform(q, u);
    CHECK(t.eval_at(conjugate(rho, u)) == doctest::Approx(q.eval_at(rho)).epsilon(1e-10));
    // (U A U^dagger) over W equals A over U^dagger W U.
    const auto pulled = pull_back(q.extent(), u);
    const LocallyLinearQr on_w(t.op(), q.extent());
    const LocallyLinearQr on_pulled(q.op(), pulled);
    CHECK(on_w.eval_at(rho) == doctest::Approx(on_pulled.eval_at(conjugate(rho, u.adjoint()))).epsilon(1e-10));
  }
}

TEST_CASE("dyadic rational approximation") {
  const auto w = qubit_ball({0.1, 0.2, 0.3}, 0.3);
  const auto q = QrNumber::linear(sigma_z(), w);
  for (double tol : {0.5, 0.1, 0.01}) {
    const auto r = rational_approximation(q, tol, {128, 1, 0});
    CHECK(r.value == doctest::Approx(static_cast<double>(r.numerator) / r.denominator));
    CHECK((r.denominator & (r.denominator - 1)) == 0);
    REQUIRE_FALSE(r.condition.empty());
    for (const auto& rho : sample_states(r.condition, 50, 2)) CHECK(std::abs(q.eval_at(rho) - r.value) < tol);
  }
}
