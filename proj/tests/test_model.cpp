#include "doctest.h"

#include <cmath>
#include <random>

#include "envtiming/model.hpp"

using namespace envtiming;

namespace {

bool rel_close(double got, double want, double tol)
{
    return std::abs(got - want) <= tol * std::abs(want);
}

} // namespace

// Oracle values: 40-digit mpmath evaluation of the defining expressions.
TEST_CASE("derived constants match high-precision oracle at the reference calibration")
{
    const DerivedConstants dc = derive_constants(ModelParams{});
    CHECK(rel_close(dc.theta, 60.952380952380952381, 1e-12));
    CHECK(rel_close(dc.theta0, 1.1428571428571428571, 1e-12));
    CHECK(rel_close(dc.rho, 19.047619047619047619, 1e-12));
    CHECK(rel_close(dc.rho0, 2.8571428571428571429, 1e-12));
    CHECK(rel_close(dc.coef_a, -1.1428571428571428571, 1e-12));
    CHECK(rel_close(dc.coef_b, 2.8571428571428571429, 1e-12));
    CHECK(rel_close(dc.exp_ratio, 0.4, 1e-15));
    CHECK(dc.coef_a < 0.0);
}

TEST_CASE("derived constants match oracle away from the defaults")
{
    ModelParams p;
    p.sigma = 0.3; p.e_rate = 1; p.beta = 0.2; p.delta = 0.05; p.i_cost = 5; p.r = 0.07; p.alpha = 0.03;
    DerivedConstants dc = derive_constants(p);
    CHECK(rel_close(dc.theta, 211.11111111111111111, 1e-12));
    CHECK(rel_close(dc.theta0, 4.4444444444444444444, 1e-12));
    CHECK(rel_close(dc.rho, 66.666666666666666667, 1e-12));
    CHECK(rel_close(dc.rho0, 6.6666666666666666667, 1e-12));
    CHECK(rel_close(dc.exp_ratio, 1.5, 1e-14));

    p = ModelParams{};
    p.sigma = 0.15; p.e_rate = 2; p.beta = 0.1; p.delta = 0.5; p.i_cost = 20; p.r = 0.2; p.alpha = 0.19;
    dc = derive_constants(p);
    CHECK(rel_close(dc.theta, 193.19741725557984646, 1e-12));
    CHECK(rel_close(dc.theta0, 0.83718880810751266799, 1e-12));
    CHECK(rel_close(dc.rho, 2.8810141169691731489, 1e-12));
    CHECK(rel_close(dc.rho0, 1.1235955056179775281, 1e-12));
    CHECK(rel_close(dc.coef_a, -0.83718880810751266799, 1e-12));
}

TEST_CASE("coef_a = -theta0 and coef_b = rho0 for random admissible parameters")
{
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        ModelParams p;
        p.alpha = 0.01 + 0.2 * u(gen);
        p.r = p.alpha * (1.01 + 3.0 * u(gen));
        p.delta = 0.01 + u(gen);
        const DerivedConstants dc = derive_constants(p);
        CHECK(dc.coef_a < 0.0);
        CHECK(std::abs(dc.coef_a + dc.theta0) <= 1e-10 * dc.theta0);
        CHECK(std::abs(dc.coef_b - dc.rho0) <= 1e-12 * dc.rho0);
    }
}

TEST_CASE("parameter validation")
{
    ModelParams p;
    p.r = 0.04;
    p.alpha = 0.05;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    CHECK_THROWS_WITH(derive_constants(p), doctest::Contains("discount-rate assumption"));
    p = ModelParams{};
    p.r = p.alpha;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = ModelParams{};
    p.sigma = -0.1;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = ModelParams{};
    p.i_cost = std::nan("");
    CHECK_THROWS_AS(p.validate(), ValidationError);
    CHECK_NOTHROW(ModelParams{}.validate());

    ModelParams q;
    q.set("E", 0.7);
    CHECK(q.e_rate == 0.7);
    CHECK(q.get("e_rate") == 0.7);
    q.set("I", 3.0);
    CHECK(q.get("i_cost") == 3.0);
    CHECK_THROWS_AS(q.set("gamma", 1.0), ValidationError);

    CHECK_THROWS_AS((StatePoint{0.0, 1.0, 0.5}.validate()), ValidationError);
    CHECK_THROWS_AS((StatePoint{1.0, 1.0, 1.0}.validate()), ValidationError);
    CHECK_THROWS_AS((StatePoint{1.0, -1.0, 0.5}.validate()), ValidationError);
}

// Oracles: quadrature of the defining integrals with E[X_t] = x(pi e^{at} + (1-pi) e^{-at}),
// mpmath at 40 digits.
TEST_CASE("closed-form strategy values")
{
    const Model m;
    CHECK(m.value_never({1, 1, 0.5}) == doctest::Approx(13.333333333333333333).epsilon(1e-13));
    CHECK(m.value_now({1, 1, 0.5}) == doctest::Approx(13.428571428571428571).epsilon(1e-13));
    CHECK(m.value_never({2.5, 0.3, 0.8}) == doctest::Approx(36.733333333333333333).epsilon(1e-13));
    CHECK(m.value_now({2.5, 0.3, 0.8}) == doctest::Approx(12.828571428571428571).epsilon(1e-13));
    // value_never at p -> 0 equals the running-cost term
    const double be = 0.4 * 0.5;
    CHECK(m.value_never({1, 1e-300, 0.5}) == doctest::Approx(be * (60.952380952380952381 * 0.5 + 19.047619047619047619)));
}

TEST_CASE("identity suite on random states")
{
    const Model m;
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> lx(-4.0, 4.0), u(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const double x = std::exp(lx(gen));
        const double p = std::exp(lx(gen));
        const double pi = 1e-6 + (1.0 - 2e-6) * u(gen);
        const StatePoint sp{x, p, pi};
        const double g = m.reward_g(x, pi);
        const double scale = std::abs(m.value_never(sp)) + std::abs(m.value_now(sp));
        REQUIRE(std::abs(m.value_never(sp) - m.value_now(sp) - g) <= 1e-12 * scale);
        REQUIRE(std::abs(m.obstacle_f(m.to_z(x, pi)) - g) <= 1e-12 * (std::abs(g) + m.params().i_cost));
        const CostBelief back = m.to_xpi(m.to_z(x, pi));
        REQUIRE(std::abs(back.x - x) <= 1e-12 * x);
        REQUIRE(back.pi == pi);
    }
}

TEST_CASE("transform examples")
{
    const Model m;
    CHECK(m.to_z(1.0, 0.5).z == 0.0);
    CHECK(m.to_z(std::exp(1.0), 0.5).z == doctest::Approx(-1.0));
    // z = (sigma^2 / 2 alpha) logit(pi) - ln x
    CHECK(m.to_z(1.0, 0.8).z == doctest::Approx(0.4 * std::log(4.0)));
    CHECK(logit(logistic(3.0)) == doctest::Approx(3.0));
    CHECK(logistic(-800.0) == 0.0);
    CHECK(logistic(800.0) == 1.0);
    CHECK(std::isfinite(logit(1e-300)));
}

TEST_CASE("q properties")
{
    const Model m;
    const double ri = 1.0;
    for (double z : {-8.0, -3.0, 0.0, 3.0, 6.0}) {
        CHECK(std::abs(m.q(z, 1e-300) - ri) <= 1e-9);
        double prev = m.q(z, 1e-6);
        for (int k = 1; k < 2000; ++k) {
            const double cur = m.q(z, k / 2000.0);
            REQUIRE(cur < prev);
            prev = cur;
        }
        // q increases with z at fixed pi since the cost term shrinks
        CHECK(m.q(z + 0.5, 0.6) > m.q(z, 0.6));
    }
    CHECK(m.q(0.0, 0.68) > 0.0);
    CHECK(m.q(0.0, 0.69) < 0.0);
    CHECK(m.q_logit(0.0, logit(0.3)) == doctest::Approx(m.q(0.0, 0.3)).epsilon(1e-14));
}

// Oracle: mpmath root of q(z, .) at 40 digits.
TEST_CASE("lower threshold m")
{
    const Model m;
    CHECK(m.m(0.0) == doctest::Approx(0.688091168794671).epsilon(1e-9));
    CHECK(std::abs(m.m(0.0) - 0.688) <= 1e-3);
    CHECK(m.m(-2.0) == doctest::Approx(0.0259133864988438).epsilon(1e-8));
    CHECK(m.m(2.0) == doctest::Approx(0.996168260623418).epsilon(1e-9));
    CHECK(m.m(-8.0) < 0.02);
    CHECK(m.m(6.0) > 0.98);
    double prev = 0.0;
    for (int i = 0; i <= 560; ++i) {
        const double z = -8.0 + 0.025 * i;
        const double v = m.m(z);
        REQUIRE(v >= prev);
        REQUIRE(v >= kClipEps);
        REQUIRE(v <= 1.0 - kClipEps);
        prev = v;
    }
    CHECK(m.m(-60.0) == kClipEps);
    CHECK(m.m(60.0) == 1.0 - kClipEps);
}
