#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "envtiming/model.hpp"
#include "envtiming/policy.hpp"
#include "envtiming/sim.hpp"
#include "envtiming/solver.hpp"

namespace envtiming {

/// File-system failures (unreadable config, unwritable output).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultSeed = 20240531;

struct SweepSpec {
    std::string param;
    std::vector<double> values;
};

struct SurfaceSpec {
    std::vector<double> x_values{0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0};
    std::vector<double> pi_values{0.3, 0.5, 0.7};
};

/**
 * Everything one CLI run needs. The INI dialect is
 *
 *     seed = 20240531
 *     sigma = 0.3                 (top level: seed, and model keys as a shorthand)
 *     [model]    sigma E beta delta I r alpha
 *     [solver]   z_min z_max n_nodes n_paths max_iter tol_c patience relaxation
 *                tol_resid_factor residual_paths residual_stride
 *     [sim]      dt n_paths t_max threads
 *     [policy]   horizon boundary_file
 *     [state]    x p pi
 *     [sweep]    param values
 *     [surface]  x_values pi_values
 *     [output]   dir
 *
 * Lines starting with ';' or '#' are comments. Lists are comma separated.
 * Unknown keys are rejected.
 */
struct RunConfig {
    ModelParams model;
    SolverConfig solver;
    SimConfig sim;
    std::uint64_t seed = kDefaultSeed;
    double horizon = kDefaultHorizon;
    /// Previously written boundary.csv to evaluate instead of solving again.
    std::string boundary_file;
    /// Paths per node for the residual columns of boundary.csv; 0 means 10 x solver paths.
    std::size_t residual_paths = 0;
    std::size_t residual_stride = 1;
    StatePoint state{1.0, 1.0, 0.5};
    std::optional<SweepSpec> sweep;
    SurfaceSpec surface;
    std::filesystem::path output_dir = ".";

    /// Copies the run seed into solver and sim.
    void apply_seed(std::uint64_t s);
    std::size_t effective_residual_paths() const;
    void validate() const;
};

/// Parse an INI document; errors carry the offending line number.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Effective configuration as an INI document that parse_config reads back unchanged.
std::string dump_config(const RunConfig& cfg);

/// Shortest decimal that round-trips to the same double ("nan", "inf" for non-finite).
std::string format_shortest(double v);
/// Fixed-point decimal with `digits` significant digits.
std::string format_significant(double v, int digits);

} // namespace envtiming
