#include "envtiming/checks.hpp"

#include <cmath>
#include <sstream>

#include "envtiming/boundary.hpp"
#include "envtiming/parallel.hpp"
#include "envtiming/rng.hpp"
#include "envtiming/sim.hpp"
#include "envtiming/stats.hpp"

namespace envtiming {

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

template <class... Args>
std::string str(const Args&... args)
{
    std::ostringstream os;
    os.precision(6);
    (os << ... << args);
    return os.str();
}

CheckResult check_constants(const ModelParams& p)
{
    const DerivedConstants dc = derive_constants(p);
    // long double evaluation of the same definitions
    const long double a = p.alpha, r = p.r, d = p.delta;
    const long double theta = 2 * a * (2 * r + d) / ((r - a) * (r + a) * (r + d - a) * (r + d + a));
    const long double theta0 = 2 * a / ((r + d - a) * (r + d + a));
    const long double rho = 1 / ((r + d + a) * (r + a));
    const long double rho0 = 1 / (r + d + a);
    double worst = 0.0;
    for (auto [got, want] : {std::pair{dc.theta, theta}, {dc.theta0, theta0}, {dc.rho, rho},
                             {dc.rho0, rho0}})
        worst = std::max(worst, rel_err(got, static_cast<double>(want)));
    const bool ok = worst < 1e-12 && dc.coef_a < 0.0;
    return {"constants", ok, str("max rel err ", worst, ", coef_a ", dc.coef_a)};
}

CheckResult check_identities(const Model& model, std::uint64_t seed)
{
    Xoshiro256 gen = Xoshiro256::for_stream(seed, static_cast<std::uint64_t>(StreamDomain::Check), 1, 0);
    PathRng rng(gen);
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
        const double x = std::exp(-3.0 + 6.0 * rng.uniform());
        const double p = std::exp(-3.0 + 6.0 * rng.uniform());
        const double pi = 0.001 + 0.998 * rng.uniform();
        const StatePoint sp{x, p, pi};
        const double g = model.reward_g(x, pi);
        const double scale = 1.0 + std::abs(model.value_never(sp)) + std::abs(model.value_now(sp));
        worst = std::max(worst, std::abs(model.value_never(sp) - model.value_now(sp) - g) / scale);
        worst = std::max(worst, std::abs(model.obstacle_f(model.to_z(x, pi)) - g) / (1.0 + std::abs(g)));
    }
    return {"closed-form identities", worst < 1e-12, str("max scaled err ", worst)};
}

CheckResult check_round_trip(const Model& model, std::uint64_t seed)
{
    PathRng rng(Xoshiro256::for_stream(seed, static_cast<std::uint64_t>(StreamDomain::Check), 2, 0));
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
        const double x = std::exp(-3.0 + 6.0 * rng.uniform());
        const double pi = 0.001 + 0.998 * rng.uniform();
        const CostBelief back = model.to_xpi(model.to_z(x, pi));
        worst = std::max({worst, rel_err(back.x, x), std::abs(back.pi - pi)});
    }
    return {"transform round trip", worst < 1e-12, str("max err ", worst)};
}

CheckResult check_martingale(const Model& model, const SimConfig& sim)
{
    const PathEngine engine(model, sim);
    const std::size_t n = 20000;
    const double t = 5.0;
    const double pi0 = 0.5;
    std::vector<double> end(n);
    parallel_for(n / 500, sim.threads, [&](std::size_t b) {
        for (std::size_t i = b * 500; i < (b + 1) * 500; ++i) {
            PathRng rng = make_path_rng(sim.seed, StreamDomain::Check, 3, i);
            end[i] = engine.advance(PathState::start(0.0, pi0), t, rng).pi();
        }
    });
    RunningStats s;
    for (double v : end) s.add(v);
    const double dev = std::abs(s.mean() - pi0);
    return {"belief martingale", dev <= 3.0 * s.stderr_mean(),
            str("mean Pi_5 ", s.mean(), " vs ", pi0, ", se ", s.stderr_mean())};
}

CheckResult check_q_m(const Model& model, const ZGrid& grid)
{
    const double ri = model.params().r * model.params().i_cost;
    bool ok = true;
    std::string why;
    for (double z : {-8.0, -2.0, 0.0, 2.0, 6.0}) {
        const double q0 = model.q(z, 1e-300);
        if (std::abs(q0 - ri) > 1e-9) {
            ok = false;
            why = str("q(", z, ", 0+) = ", q0, " != rI");
        }
        double prev = model.q(z, 0.001);
        for (int k = 2; k < 1000; ++k) {
            const double cur = model.q(z, k / 1000.0);
            if (!(cur < prev)) {
                ok = false;
                why = str("q not decreasing at z=", z);
            }
            prev = cur;
        }
    }
    double last = 0.0;
    for (double z : grid.nodes()) {
        const double m = model.m(z);
        if (m < last || !(m > 0.0 && m < 1.0)) {
            ok = false;
            why = str("m not nondecreasing at z=", z);
        }
        last = m;
    }
    return {"q/m properties", ok, why.empty() ? str("m(0) = ", model.m(0.0)) : why};
}

} // namespace

std::vector<CheckResult> run_fast_checks(const RunConfig& cfg)
{
    const Model model(cfg.model);
    return {check_constants(cfg.model), check_identities(model, cfg.seed),
            check_round_trip(model, cfg.seed), check_martingale(model, cfg.sim),
            check_q_m(model, cfg.solver.grid)};
}

} // namespace envtiming
