#include "envtiming/solver.hpp"

#include <algorithm>
#include <cmath>

#include "envtiming/isotonic.hpp"
#include "envtiming/parallel.hpp"
#include "envtiming/stats.hpp"

namespace envtiming {

void SolverConfig::validate() const
{
    grid.validate();
    if (n_paths_op < 2) throw ValidationError("solver: n_paths_op must be at least 2");
    if (!(tol_c > 0.0)) throw ValidationError("solver: tol_c must be positive");
    if (max_iter < 1) throw ValidationError("solver: max_iter must be at least 1");
    if (patience < 1) throw ValidationError("solver: patience must be at least 1");
    if (!(relaxation > 0.0)) throw ValidationError("solver: relaxation must be positive");
    if (!(tol_resid_factor >= 0.0)) throw ValidationError("solver: tol_resid_factor must be >= 0");
}

OperatorEstimate estimate_operator(const Boundary& c, double z, const PathEngine& engine,
                                   std::size_t n_paths, std::uint64_t seed, StreamDomain domain,
                                   std::uint64_t stream_id)
{
    const Model& model = engine.model();
    const double inv_r = 1.0 / model.params().r;
    const PathState start = PathState::start(z, c.c_at(z));

    std::vector<double> scores(n_paths);
    engine.advance_many(
        n_paths,
        [&](std::size_t i) {
            PathRng rng = make_path_rng(seed, domain, stream_id, i);
            const double zeta = engine.draw_exp_time(rng);
            return PathEngine::Job{start, zeta, rng};
        },
        [&](std::size_t i, const PathState& end) {
            double score = 0.0;
            if (end.logit_pi <= c.logit_c_at(end.z)) score = inv_r * model.q_logit(end.z, end.logit_pi);
            scores[i] = score;
        });
    RunningStats stats;
    for (double v : scores) stats.add(v);
    return {stats.mean(), stats.stderr_mean(), n_paths};
}

double damping_lambda(double m_of_z) { return m_of_z > 0.5 ? 1.0 - m_of_z : m_of_z; }

Boundary solve_boundary(const SolverConfig& cfg, const PathEngine& engine,
                        const SolveProgress& progress)
{
    cfg.validate();
    const Model& model = engine.model();
    Boundary current = Boundary::from_lower_threshold(model, cfg.grid);
    const std::vector<double> m = current.m_values();
    const std::size_t n = m.size();

    std::vector<double> lambda(n);
    for (std::size_t j = 0; j < n; ++j) lambda[j] = damping_lambda(m[j]);

    // Per-node relaxation, halved when a node's step reverses without shrinking (a 2-cycle).
    // The floor means it settles after finitely many sweeps, after which the rule is fixed.
    std::vector<double> omega(n, cfg.relaxation);
    const double omega_floor = cfg.relaxation / 8.0;
    std::vector<double> last_step(n, 0.0);

    const std::vector<double> z = cfg.grid.nodes();
    std::vector<double> op(n);
    SolveInfo info;
    std::size_t calm = 0;

    for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
        parallel_for(n, engine.config().threads, [&](std::size_t j) {
            op[j] = estimate_operator(current, z[j], engine, cfg.n_paths_op, cfg.seed,
                                      StreamDomain::Operator, j)
                        .value;
        });

        std::vector<double> next(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double stepped = current.c_values()[j] + omega[j] * lambda[j] * op[j];
            next[j] = std::clamp(stepped, m[j], 1.0 - kClipEps);
        }
        next = isotonic_increasing(next);
        // pooling can dip below m; m is nondecreasing so the max keeps monotonicity
        for (std::size_t j = 0; j < n; ++j) next[j] = std::clamp(next[j], m[j], 1.0 - kClipEps);

        double change = 0.0;
        double normalized = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double step = next[j] - current.c_values()[j];
            if (step * last_step[j] < 0.0 && std::abs(step) > 0.5 * std::abs(last_step[j]))
                omega[j] = std::max(0.5 * omega[j], omega_floor);
            last_step[j] = step;
            const double d = std::abs(step);
            change = std::max(change, d);
            normalized = std::max(normalized, d / lambda[j]);
        }

        current = Boundary(cfg.grid, std::move(next), m);
        info.iterations = it;
        info.final_change = change;
        info.final_normalized_change = normalized;
        info.change_history.push_back(normalized);
        info.min_relaxation = *std::min_element(omega.begin(), omega.end());
        if (progress) progress(it, change, normalized);

        calm = normalized < cfg.tol_c ? calm + 1 : 0;
        if (calm >= cfg.patience) {
            info.converged = true;
            break;
        }
    }
    current.info = std::move(info);
    return current;
}

std::vector<ResidualRow> residual_profile(const Boundary& c, const PathEngine& engine,
                                          std::size_t n_paths, std::uint64_t seed,
                                          std::size_t stride)
{
    const double r = engine.model().params().r;
    std::vector<std::size_t> nodes;
    for (std::size_t j = 0; j < c.size(); j += std::max<std::size_t>(stride, 1)) nodes.push_back(j);

    std::vector<ResidualRow> rows(nodes.size());
    parallel_for(nodes.size(), engine.config().threads, [&](std::size_t k) {
        const std::size_t j = nodes[k];
        const double z = c.grid().node(j);
        const OperatorEstimate est =
            estimate_operator(c, z, engine, n_paths, seed, StreamDomain::Residual, j);
        rows[k] = {z, c.c_values()[j], r * est.value, r * est.stderr};
    });
    return rows;
}

} // namespace envtiming
