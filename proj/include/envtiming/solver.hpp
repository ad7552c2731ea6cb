#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "envtiming/boundary.hpp"
#include "envtiming/model.hpp"
#include "envtiming/sim.hpp"

namespace envtiming {

struct SolverConfig {
    ZGrid grid{};
    std::size_t n_paths_op = 20000; ///< paths per node per operator evaluation
    std::size_t max_iter = 200;
    double tol_c = 5e-3;
    std::size_t patience = 3;
    std::uint64_t seed = 20240531;
    /// Multiplies lambda(z) in the update; 1 gives the undamped rule.
    double relaxation = 0.3;
    /// Residual floor as a fraction of r I.
    double tol_resid_factor = 0.02;

    void validate() const;
};

/// Monte Carlo value of the resolvent operator at one node.
struct OperatorEstimate {
    double value;  ///< (1/r) E[q(Z_zeta, Pi_zeta) 1{Pi_zeta <= c(Z_zeta)}]
    double stderr; ///< standard error of `value`
    std::size_t n_paths;
};

/**
 * Estimate the operator at z with n_paths paths: draw zeta ~ Exp(r), run the belief from
 * pi0 = c(z) to zeta, score (1/r) q(z + sigma^2 zeta / 2, Pi_zeta) when Pi_zeta <= c(Z_zeta).
 *
 * Path i uses stream (seed, domain, stream_id, i); holding these fixed across calls gives
 * common random numbers.
 */
OperatorEstimate estimate_operator(const Boundary& c, double z, const PathEngine& engine,
                                   std::size_t n_paths, std::uint64_t seed, StreamDomain domain,
                                   std::uint64_t stream_id);

/// Damping weight: 1 - m when m > 1/2, otherwise m.
double damping_lambda(double m_of_z);

/// Progress callback: (iteration, raw sup-change, normalized sup-change).
using SolveProgress = std::function<void(std::size_t, double, double)>;

/**
 * Damped fixed-point iteration for c starting from c = m.
 *
 * Each sweep sets c <- c + omega(z) * lambda(z) * E[c](z) at every node, clamps to
 * [m(z), 1 - kClipEps] and projects onto nondecreasing sequences. omega starts at
 * `relaxation` and is halved at a node whose step reverses without shrinking by half,
 * down to relaxation / 8. It stops once the
 * lambda-normalized change sup |dc| / lambda stays below tol_c for `patience` sweeps.
 */
Boundary solve_boundary(const SolverConfig& cfg, const PathEngine& engine,
                        const SolveProgress& progress = {});

struct ResidualRow {
    double z;
    double c;
    double residual;    ///< r * E[c](z), on the scale of q (natural unit r I)
    double residual_se;
};

/// Operator re-estimated at every `stride`-th node with seeds independent of the solve.
std::vector<ResidualRow> residual_profile(const Boundary& c, const PathEngine& engine,
                                          std::size_t n_paths, std::uint64_t seed,
                                          std::size_t stride = 1);

} // namespace envtiming
