#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "envtiming/boundary.hpp"
#include "envtiming/model.hpp"
#include "envtiming/sim.hpp"
#include "envtiming/solver.hpp"

namespace envtiming {

/// Default censoring horizon; e^{-r * 150} is about 3e-7 at r = 0.1.
inline constexpr double kDefaultHorizon = 150.0;

/**
 * Monte Carlo summary of the stopping rule tau = inf{t : Pi_t >= c(Z_t)}.
 *
 * Conditional means (e_tau, e_p_tau) are over paths stopped before the horizon and
 * are NaN when no path stops. Censored paths contribute 0 to u_hat.
 */
struct PolicyStats {
    double prob_stop = 0.0;
    double e_tau = 0.0;
    double se_tau = 0.0;
    double e_p_tau = 0.0;
    double se_p_tau = 0.0;
    double u_hat = 0.0;
    double se_u = 0.0;
    double v_hat = 0.0; ///< value_never - u_hat
    double se_v = 0.0;
    std::size_t n_paths = 0;
    std::size_t n_stopped = 0;
    double horizon = 0.0;
    std::string warning; ///< non-empty when the boundary was not converged
};

/**
 * Simulate the policy from (x0, p0, pi0) with engine.config().n_paths paths.
 * Path i draws from stream (seed, Policy, stream_id, i), so evaluations that share
 * the stream id use common random numbers.
 */
PolicyStats simulate_policy(const Boundary& c, const StatePoint& start, double horizon,
                            const PathEngine& engine, std::uint64_t stream_id = 0);

/// One entry of a parameter sweep. Invalid parameter values keep `error` and no stats.
struct SweepRow {
    std::string param;
    double value = 0.0;
    std::optional<PolicyStats> stats;
    std::optional<Boundary> boundary;
    std::string error;
};

struct SweepSettings {
    SolverConfig solver;
    SimConfig sim;
    double horizon = kDefaultHorizon;
};

/// Re-solve the boundary and re-evaluate the policy for each value of `param`.
std::vector<SweepRow> sweep(const std::string& param, const std::vector<double>& values,
                            const ModelParams& base, const StatePoint& start,
                            const SweepSettings& settings,
                            const SolveProgress& progress = {});

struct SurfaceRow {
    double x;
    double p;
    double pi;
    double u_hat;
    double se_u;
    double v_hat;
    double se_v;
};

/// V(x, p0, pi) over x_grid for each pi in pi_list (pi-major order).
std::vector<SurfaceRow> value_surface(const Boundary& c, const std::vector<double>& x_grid,
                                      double p0, const std::vector<double>& pi_list,
                                      double horizon, const PathEngine& engine);

} // namespace envtiming
