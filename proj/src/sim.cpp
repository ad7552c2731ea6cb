#include "envtiming/sim.hpp"

#include <cmath>

namespace envtiming {

void SimConfig::validate() const
{
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("sim: dt must be positive");
    if (n_paths < 1) throw ValidationError("sim: n_paths must be at least 1");
    if (t_max != 0.0 && !(t_max >= dt)) throw ValidationError("sim: t_max must be >= dt");
}

double default_exp_time_cap(double r) { return std::log(1e4) / r; }

PathState step_belief(const PathState& state, double dw, double dt, const ModelParams& params)
{
    PathState next = state;
    BeliefDynamics(params).step(next, dw, dt);
    return next;
}

double x_from_state(const PathState& state, const Model& model)
{
    return model.x_from_logit(state.z, state.logit_pi);
}

double pollution_at(double t, double p0, const ModelParams& params)
{
    const double decay = std::exp(-params.delta * t);
    return params.beta * params.e_rate / params.delta * (1.0 - decay) + p0 * decay;
}

double pollution_after(double t, double tau, double p_tau, const ModelParams& params)
{
    return p_tau * std::exp(-params.delta * (t - tau));
}

double exp_time_from_uniform(double u, double r) { return -std::log1p(-u) / r; }

double sample_exp_time(PathRng& rng, double r) { return exp_time_from_uniform(rng.uniform(), r); }

PathEngine::PathEngine(const Model& model, const SimConfig& cfg)
    : model_(model), cfg_(cfg), dyn_(model.params()),
      t_cap_(cfg.t_max > 0.0 ? cfg.t_max : default_exp_time_cap(model.params().r))
{
    cfg_.validate();
}

double PathEngine::draw_exp_time(PathRng& rng) const
{
    return std::min(sample_exp_time(rng, model_.params().r), t_cap_);
}

PathState PathEngine::advance(PathState s, double duration, PathRng& rng) const
{
    const double dt = cfg_.dt;
    const double sqdt = std::sqrt(dt);
    const auto n = static_cast<std::size_t>(duration / dt);
    for (std::size_t i = 0; i < n; ++i) dyn_.step(s, sqdt * rng.normal(), dt);
    const double rem = duration - static_cast<double>(n) * dt;
    if (rem > 0.0) dyn_.step(s, std::sqrt(rem) * rng.normal(), rem);
    if (!std::isfinite(s.logit_pi)) throw std::runtime_error("belief left (0,1)");
    return s;
}

std::vector<PathState> PathEngine::trajectory(PathState s, double horizon, PathRng& rng) const
{
    std::vector<PathState> out{s};
    run(s, horizon, rng, [&](const PathState&, const PathState& next) {
        out.push_back(next);
        return false;
    });
    return out;
}

} // namespace envtiming
