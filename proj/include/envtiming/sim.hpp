#pragma once

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "envtiming/model.hpp"
#include "envtiming/rng.hpp"

namespace envtiming {

struct SimConfig {
    double dt = 0.01;
    std::size_t n_paths = 20000;
    std::uint64_t seed = 20240531;
    /// Cap on exponential times; 0 means ln(1e4) / r.
    double t_max = 0.0;
    /// Worker threads for path loops; 0 means hardware concurrency.
    unsigned threads = 0;

    void validate() const;
};

/// ln(1e4) / r: the exponential-time mass beyond this cap is 1e-4.
double default_exp_time_cap(double r);

/**
 * State of one filtered path in transformed coordinates.
 *
 * The belief is carried as logit_pi = ln(pi / (1 - pi)) so it can never leave
 * (0, 1). z is recomputed from the elapsed time, so z - z0 = sigma^2 t / 2 holds
 * up to a single rounding.
 */
struct PathState {
    double t = 0.0;
    double logit_pi = 0.0;
    double z = 0.0;
    double z0 = 0.0;

    double pi() const { return logistic(logit_pi); }

    static PathState start(double z0, double pi0) { return {0.0, logit(pi0), z0, z0}; }
};

/// Coefficients of the logit-belief SDE  d phi = k^2 (pi - 1/2) dt + k dW,  k = 2 alpha / sigma.
class BeliefDynamics {
public:
    explicit BeliefDynamics(const ModelParams& p)
        : k_(2.0 * p.alpha / p.sigma), half_k2_(0.5 * k_ * k_), half_sigma2_(0.5 * p.sigma * p.sigma)
    {
    }

    /// One Euler-Maruyama step with Brownian increment dw over dt.
    void step(PathState& s, double dw, double dt) const
    {
        // k^2 (pi - 1/2) = (k^2 / 2) (2 pi - 1)
        const double pi = 1.0 / (1.0 + std::exp(-s.logit_pi));
        s.logit_pi += half_k2_ * (2.0 * pi - 1.0) * dt + k_ * dw;
        s.t += dt;
        s.z = s.z0 + half_sigma2_ * s.t;
    }

    double k() const { return k_; }
    double half_sigma2() const { return half_sigma2_; }

private:
    double k_;
    double half_k2_;
    double half_sigma2_;
};

PathState step_belief(const PathState& state, double dw, double dt, const ModelParams& params);

/// Cost level implied by a path state (evaluated in log space).
double x_from_state(const PathState& state, const Model& model);

/// Pollutant stock before adoption, started from p0.
double pollution_at(double t, double p0, const ModelParams& params);
/// Pollutant stock at t >= tau after adoption at tau with stock p_tau.
double pollution_after(double t, double tau, double p_tau, const ModelParams& params);

/// Inverse-CDF exponential draw with rate r from a uniform u in (0, 1).
double exp_time_from_uniform(double u, double r);
double sample_exp_time(PathRng& rng, double r);

/**
 * Seeded Euler-Maruyama engine for the filtered state. Const and shareable:
 * callers own the per-path PathRng.
 */
class PathEngine {
public:
    PathEngine(const Model& model, const SimConfig& cfg);

    const Model& model() const { return model_; }
    const SimConfig& config() const { return cfg_; }
    const BeliefDynamics& dynamics() const { return dyn_; }
    double exp_time_cap() const { return t_cap_; }

    /// Exponential time with rate r, truncated at exp_time_cap().
    double draw_exp_time(PathRng& rng) const;

    /// Advance by `duration` using full dt steps and one final partial step.
    PathState advance(PathState s, double duration, PathRng& rng) const;

    /**
     * Step until `on_step(prev, next)` returns true or `horizon` is reached.
     * Returns the last state visited.
     */
    template <class OnStep>
    PathState run(PathState s, double horizon, PathRng& rng, OnStep&& on_step) const
    {
        const double dt = cfg_.dt;
        const double sqdt = std::sqrt(dt);
        const auto n = static_cast<std::size_t>(std::floor(horizon / dt + 1e-9));
        for (std::size_t i = 0; i < n; ++i) {
            const PathState prev = s;
            dyn_.step(s, sqdt * rng.normal(), dt);
            if (!std::isfinite(s.logit_pi)) throw std::runtime_error("belief left (0,1)");
            if (on_step(prev, s)) return s;
        }
        return s;
    }

    /**
     * Advance many independent paths, several at a time so the exp latency of
     * one lane overlaps the others. `setup(i)` returns a Job for path i and
     * `finish(i, end)` receives its final state. Each path uses only its own
     * generator, so results equal those of advance() path by path.
     */
    struct Job {
        PathState start;
        double duration;
        PathRng rng;
    };
    template <class Setup, class Finish>
    void advance_many(std::size_t n_paths, Setup&& setup, Finish&& finish) const;

    /// Full trajectory on the dt grid; used for diagnostics and determinism checks.
    std::vector<PathState> trajectory(PathState s, double horizon, PathRng& rng) const;

private:
    Model model_;
    SimConfig cfg_;
    BeliefDynamics dyn_;
    double t_cap_;
};

template <class Setup, class Finish>
void PathEngine::advance_many(std::size_t n_paths, Setup&& setup, Finish&& finish) const
{
    constexpr std::size_t kLanes = 4;
    const double dt = cfg_.dt;
    const double sqdt = std::sqrt(dt);

    struct Lane {
        std::size_t path;
        std::size_t left; // full steps still to take
        double rem;       // final partial step
        PathState s;
        PathRng rng;
        bool done = false;
    };
    std::vector<Lane> lanes;
    lanes.reserve(kLanes);
    std::size_t next = 0;

    auto load = [&](Lane& lane) {
        Job job = setup(next);
        const auto n = static_cast<std::size_t>(job.duration / dt);
        lane = Lane{next, n, job.duration - static_cast<double>(n) * dt, job.start, job.rng};
        ++next;
    };
    auto complete = [&](Lane& lane) {
        if (lane.rem > 0.0) dyn_.step(lane.s, std::sqrt(lane.rem) * lane.rng.normal(), lane.rem);
        if (!std::isfinite(lane.s.logit_pi)) throw std::runtime_error("belief left (0,1)");
        finish(lane.path, lane.s);
        lane.done = true;
    };

    while (lanes.size() < kLanes && next < n_paths) {
        Job job = setup(next);
        const auto n = static_cast<std::size_t>(job.duration / dt);
        lanes.push_back(Lane{next, n, job.duration - static_cast<double>(n) * dt, job.start, job.rng});
        ++next;
    }

    while (lanes.size() == kLanes) {
        std::size_t burst = lanes[0].left;
        for (std::size_t l = 1; l < kLanes; ++l) burst = std::min(burst, lanes[l].left);
        for (std::size_t i = 0; i < burst; ++i) {
            double dw[kLanes];
            for (std::size_t l = 0; l < kLanes; ++l) dw[l] = sqdt * lanes[l].rng.normal();
            for (std::size_t l = 0; l < kLanes; ++l) dyn_.step(lanes[l].s, dw[l], dt);
        }
        for (auto& lane : lanes) lane.left -= burst;
        bool exhausted = false;
        for (auto& lane : lanes) {
            if (lane.left > 0) continue;
            complete(lane);
            if (next < n_paths) load(lane);
            else exhausted = true;
        }
        if (exhausted) std::erase_if(lanes, [](const Lane& lane) { return lane.done; });
    }
    // drain the remaining lanes one by one
    for (auto& lane : lanes) {
        for (; lane.left > 0; --lane.left) dyn_.step(lane.s, sqdt * lane.rng.normal(), dt);
        complete(lane);
    }
}

} // namespace envtiming
