#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "envtiming/boundary.hpp"
#include "envtiming/isotonic.hpp"
#include "envtiming/solver.hpp"

using namespace envtiming;

namespace {

/// Max-min formula for the isotonic fit, O(n^3): fit_i = max_{j<=i} min_{k>=i} avg(y_j..y_k).
std::vector<double> isotonic_oracle(const std::vector<double>& y)
{
    const std::size_t n = y.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j <= i; ++j) {
            double worst = std::numeric_limits<double>::infinity();
            for (std::size_t k = i; k < n; ++k) {
                double s = 0.0;
                for (std::size_t t = j; t <= k; ++t) s += y[t];
                worst = std::min(worst, s / static_cast<double>(k - j + 1));
            }
            best = std::max(best, worst);
        }
        out[i] = best;
    }
    return out;
}

} // namespace

TEST_CASE("isotonic projection matches the max-min formula")
{
    std::mt19937_64 gen(3);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> y(1 + trial % 17);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = 0.1 * static_cast<double>(i) + nd(gen);
        const auto fit = isotonic_increasing(y);
        const auto want = isotonic_oracle(y);
        REQUIRE(fit.size() == y.size());
        for (std::size_t i = 0; i < y.size(); ++i) REQUIRE(fit[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
}

TEST_CASE("isotonic projection properties")
{
    const std::vector<double> sorted{0.1, 0.2, 0.2, 0.9};
    CHECK(isotonic_increasing(sorted) == sorted);
    CHECK(isotonic_increasing(std::vector<double>{3.0, 1.0}) == std::vector<double>{2.0, 2.0});
    CHECK(isotonic_increasing(std::vector<double>{}).empty());
    // weighted pooling
    const std::vector<double> w{3.0, 1.0};
    const auto fit = isotonic_increasing(std::vector<double>{2.0, 0.0}, w);
    CHECK(fit[0] == doctest::Approx(1.5));
    CHECK(fit[1] == doctest::Approx(1.5));
    CHECK_THROWS(isotonic_increasing(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0}));

    // idempotent, mean preserving
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> y(57);
    for (double& v : y) v = u(gen);
    const auto once = isotonic_increasing(y);
    CHECK(isotonic_increasing(once) == once);
    double s0 = 0, s1 = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        s0 += y[i];
        s1 += once[i];
        if (i) CHECK(once[i] >= once[i - 1]);
    }
    CHECK(s1 == doctest::Approx(s0));
}

TEST_CASE("grid")
{
    const ZGrid g;
    CHECK(g.n == 57);
    CHECK(g.step() == doctest::Approx(0.25));
    CHECK(g.node(0) == -8.0);
    CHECK(g.node(56) == 6.0);
    CHECK(g.node(32) == 0.0);
    CHECK_THROWS_AS((ZGrid{1.0, 1.0, 5}.validate()), ValidationError);
    CHECK_THROWS_AS((ZGrid{0.0, 1.0, 1}.validate()), ValidationError);
}

TEST_CASE("boundary evaluation, clamping and inverse")
{
    const Model model;
    const ZGrid g{0.0, 4.0, 5};
    const Boundary b(g, {0.1, 0.2, 0.4, 0.8, 0.9}, {0.1, 0.1, 0.1, 0.1, 0.1});
    CHECK(b.c_at(-5.0) == 0.1);
    CHECK(b.c_at(10.0) == 0.9);
    CHECK(b.c_at(2.5) == doctest::Approx(0.6));
    CHECK(b.c_at(1.0) == doctest::Approx(0.2));
    CHECK(b.logit_c_at(2.5) == doctest::Approx(logit(0.6)));
    CHECK(b.logit_c_at(-1.0) == doctest::Approx(logit(0.1)));

    CHECK(b.inverse(0.05) == -std::numeric_limits<double>::infinity());
    CHECK(b.inverse(0.95) == std::numeric_limits<double>::infinity());
    CHECK(b.inverse(0.6) == doctest::Approx(2.5));
    CHECK(b.inverse(0.2) == doctest::Approx(1.0));
    for (double pi : {0.15, 0.3, 0.55, 0.85}) CHECK(b.c_at(b.inverse(pi)) == doctest::Approx(pi));

    CHECK_NOTHROW(b.check_invariants());
    const Boundary bad(g, {0.1, 0.3, 0.2, 0.8, 0.9}, {0.1, 0.1, 0.1, 0.1, 0.1});
    CHECK_THROWS_AS(bad.check_invariants(), std::logic_error);
    const Boundary below(g, {0.05, 0.2, 0.4, 0.8, 0.9}, {0.1, 0.1, 0.1, 0.1, 0.1});
    CHECK_THROWS_AS(below.check_invariants(), std::logic_error);
    CHECK_THROWS_AS(Boundary(g, {0.1, 0.2}, {0.1, 0.2}), ValidationError);
}

TEST_CASE("boundary in cost coordinates")
{
    const Model model;
    const ZGrid g{0.0, 4.0, 5};
    const Boundary b(g, {0.1, 0.2, 0.4, 0.8, 0.9}, {0.1, 0.1, 0.1, 0.1, 0.1});
    CHECK(boundary_in_x(b, 0.05, model).kind == CostThreshold::Kind::Infinite);
    CHECK(boundary_in_x(b, 0.95, model).kind == CostThreshold::Kind::Zero);
    CHECK(boundary_in_x(b, 0.95, model).value == 0.0);

    // stopping iff x >= b(pi) agrees with pi >= c(z(x, pi)) away from the threshold itself
    for (int k = 11; k <= 89; ++k) {
        const double pi = k / 100.0;
        const CostThreshold t = boundary_in_x(b, pi, model);
        REQUIRE(t.kind == CostThreshold::Kind::Finite);
        for (double f : {0.9, 1.1}) {
            const double x = t.value * f;
            const bool stop_x = x >= t.value;
            const bool stop_z = pi >= b.c_at(model.to_z(x, pi).z);
            REQUIRE(stop_x == stop_z);
        }
    }
}

TEST_CASE("initial and constant boundaries")
{
    const Model model;
    const Boundary m = Boundary::from_lower_threshold(model, ZGrid{});
    CHECK(m.c_values() == m.m_values());
    CHECK_NOTHROW(m.check_invariants());
    CHECK(m.c_at(0.0) == doctest::Approx(model.m(0.0)));
    const Boundary top = Boundary::constant(model, ZGrid{}, 1.0 - kClipEps);
    CHECK(top.c_at(3.3) == 1.0 - kClipEps);
    CHECK_NOTHROW(top.check_invariants());
}

TEST_CASE("damping weight")
{
    CHECK(damping_lambda(0.7) == doctest::Approx(0.3));
    CHECK(damping_lambda(0.3) == doctest::Approx(0.3));
    CHECK(damping_lambda(0.5) == 0.5);
    for (int k = 1; k < 1000; ++k) {
        const double m = k / 1000.0;
        const double l = damping_lambda(m);
        REQUIRE(l > 0.0);
        REQUIRE(l <= 0.5);
        REQUIRE(l <= std::max(m, 1.0 - m));
    }
}
