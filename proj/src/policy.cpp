#include "envtiming/policy.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "envtiming/parallel.hpp"
#include "envtiming/stats.hpp"

namespace envtiming {

namespace {

struct PathOutcome {
    bool stopped = false;
    double tau = 0.0;
    double discounted_reward = 0.0; ///< e^{-r tau} G(X_tau, Pi_tau), 0 when censored
};

constexpr std::size_t kBlock = 256;

} // namespace

PolicyStats simulate_policy(const Boundary& c, const StatePoint& start, double horizon,
                            const PathEngine& engine, std::uint64_t stream_id)
{
    start.validate();
    const Model& model = engine.model();
    const ModelParams& prm = model.params();
    const SimConfig& sim = engine.config();
    const double dt = sim.dt;
    if (!(horizon >= dt)) {
        std::ostringstream os;
        os << "policy: horizon " << horizon << " is shorter than one time step " << dt;
        throw ValidationError(os.str());
    }
    const std::size_t n_paths = sim.n_paths;
    if (n_paths < 2) throw ValidationError("policy: need at least 2 paths");

    const TransformedPoint tp = model.to_z(start.x, start.pi);
    const double phi0 = logit(start.pi);

    PolicyStats out;
    out.n_paths = n_paths;
    out.horizon = horizon;
    if (!c.info.converged && c.info.iterations > 0) {
        std::ostringstream os;
        os << "boundary not converged after " << c.info.iterations
           << " sweeps (normalized change " << c.info.final_normalized_change << ")";
        out.warning = os.str();
    }

    std::vector<PathOutcome> outcomes(n_paths);
    if (phi0 >= c.logit_c_at(tp.z)) {
        // inside the stopping region: every path stops at t = 0
        const double g = model.reward_g(start.x, start.pi);
        for (auto& o : outcomes) o = {true, 0.0, g};
    } else {
        const auto steps = static_cast<std::size_t>(std::floor(horizon / dt + 1e-9));
        const double half_s2 = engine.dynamics().half_sigma2();
        // Z is deterministic, so the threshold along the path is shared by all paths
        std::vector<double> threshold(steps + 1);
        for (std::size_t i = 0; i <= steps; ++i)
            threshold[i] = c.logit_c_at(tp.z + half_s2 * static_cast<double>(i) * dt);

        const BeliefDynamics& dyn = engine.dynamics();
        const double sqdt = std::sqrt(dt);
        const std::size_t n_blocks = (n_paths + kBlock - 1) / kBlock;
        parallel_for(n_blocks, sim.threads, [&](std::size_t b) {
            const std::size_t end = std::min(n_paths, (b + 1) * kBlock);
            for (std::size_t i = b * kBlock; i < end; ++i) {
                PathRng rng = make_path_rng(sim.seed, StreamDomain::Policy, stream_id, i);
                PathState s = PathState::start(tp.z, start.pi);
                PathOutcome o;
                for (std::size_t k = 1; k <= steps; ++k) {
                    const double prev_gap = s.logit_pi - threshold[k - 1];
                    const double prev_phi = s.logit_pi;
                    dyn.step(s, sqdt * rng.normal(), dt);
                    if (!std::isfinite(s.logit_pi)) throw std::runtime_error("belief left (0,1)");
                    const double gap = s.logit_pi - threshold[k];
                    if (gap < 0.0) continue;
                    // linear interpolation of the gap inside the crossing step
                    const double w = prev_gap / (prev_gap - gap);
                    const double tau = (static_cast<double>(k - 1) + w) * dt;
                    const double phi = prev_phi + w * (s.logit_pi - prev_phi);
                    const double z = tp.z + half_s2 * tau;
                    const double g = model.reward_g(model.x_from_logit(z, phi), logistic(phi));
                    o = {true, tau, std::exp(-prm.r * tau) * g};
                    break;
                }
                outcomes[i] = o;
            }
        });
    }

    RunningStats tau_stats, p_stats, u_stats;
    for (const auto& o : outcomes) {
        u_stats.add(o.stopped ? o.discounted_reward : 0.0);
        if (!o.stopped) continue;
        tau_stats.add(o.tau);
        p_stats.add(pollution_at(o.tau, start.p, prm));
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.n_stopped = tau_stats.count();
    out.prob_stop = static_cast<double>(out.n_stopped) / static_cast<double>(n_paths);
    out.e_tau = out.n_stopped > 0 ? tau_stats.mean() : nan;
    out.se_tau = out.n_stopped > 0 ? tau_stats.stderr_mean() : nan;
    out.e_p_tau = out.n_stopped > 0 ? p_stats.mean() : nan;
    out.se_p_tau = out.n_stopped > 0 ? p_stats.stderr_mean() : nan;
    out.u_hat = u_stats.mean();
    out.se_u = u_stats.stderr_mean();
    out.v_hat = model.value_never(start) - out.u_hat;
    out.se_v = out.se_u;
    return out;
}

std::vector<SweepRow> sweep(const std::string& param, const std::vector<double>& values,
                            const ModelParams& base, const StatePoint& start,
                            const SweepSettings& settings, const SolveProgress& progress)
{
    base.get(param); // rejects unknown names up front
    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (double v : values) {
        SweepRow row;
        row.param = param;
        row.value = v;
        ModelParams p = base;
        p.set(param, v);
        try {
            p.validate();
        } catch (const ValidationError& e) {
            row.error = e.what();
            rows.push_back(std::move(row));
            continue;
        }
        const Model model(p);
        const PathEngine engine(model, settings.sim);
        Boundary b = solve_boundary(settings.solver, engine, progress);
        row.stats = simulate_policy(b, start, settings.horizon, engine);
        row.boundary = std::move(b);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<SurfaceRow> value_surface(const Boundary& c, const std::vector<double>& x_grid,
                                      double p0, const std::vector<double>& pi_list,
                                      double horizon, const PathEngine& engine)
{
    std::vector<SurfaceRow> rows;
    rows.reserve(x_grid.size() * pi_list.size());
    for (double pi : pi_list) {
        for (double x : x_grid) {
            const PolicyStats s = simulate_policy(c, {x, p0, pi}, horizon, engine);
            rows.push_back({x, p0, pi, s.u_hat, s.se_u, s.v_hat, s.se_v});
        }
    }
    return rows;
}

} // namespace envtiming
