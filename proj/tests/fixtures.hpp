#pragma once

#include "envtiming/solver.hpp"

namespace envtiming::testing {

/// Coarse 15-node grid with 4000 paths per node: fast enough for unit tests.
inline SolverConfig coarse_config()
{
    SolverConfig cfg;
    cfg.grid = ZGrid{-8.0, 6.0, 15};
    cfg.n_paths_op = 4000;
    return cfg;
}

/// One coarse solve at the reference calibration, shared by every test binary translation unit.
inline const Boundary& coarse_solution()
{
    static const Boundary b = [] {
        const Model model;
        const PathEngine engine(model, SimConfig{});
        return solve_boundary(coarse_config(), engine);
    }();
    return b;
}

} // namespace envtiming::testing
