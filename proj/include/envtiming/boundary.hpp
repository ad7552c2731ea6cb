#pragma once

#include <cstddef>
#include <vector>

#include "envtiming/model.hpp"

namespace envtiming {

/// Uniform ascending grid z_min = z_0 < ... < z_{n-1} = z_max.
struct ZGrid {
    double z_min = -8.0;
    double z_max = 6.0;
    std::size_t n = 57;

    void validate() const;
    double step() const { return (z_max - z_min) / static_cast<double>(n - 1); }
    double node(std::size_t i) const;
    std::vector<double> nodes() const;
};

/// Convergence record attached to a solved boundary.
struct SolveInfo {
    bool converged = false;
    std::size_t iterations = 0;
    double final_change = 0.0;            ///< sup-node |c^{n+1} - c^n| of the last sweep
    double final_normalized_change = 0.0; ///< sup-node |c^{n+1} - c^n| / lambda(z)
    std::vector<double> change_history;
    double min_relaxation = 0.0;          ///< smallest per-node relaxation after safeguarding
};

/**
 * Piecewise-linear nondecreasing threshold z -> c(z) on a grid, together with
 * the lower threshold m(z) at the same nodes. Evaluation outside the grid clamps
 * to the end values.
 */
class Boundary {
public:
    Boundary() = default;
    Boundary(ZGrid grid, std::vector<double> c_values, std::vector<double> m_values);

    /// Boundary initialized to c = m on the grid.
    static Boundary from_lower_threshold(const Model& model, const ZGrid& grid);
    /// Constant boundary c(z) = level with m taken from the model.
    static Boundary constant(const Model& model, const ZGrid& grid, double level);

    const ZGrid& grid() const { return grid_; }
    std::size_t size() const { return c_.size(); }
    const std::vector<double>& c_values() const { return c_; }
    const std::vector<double>& m_values() const { return m_; }
    std::vector<double>& mutable_c_values() { return c_; }

    double c_at(double z) const;
    double logit_c_at(double z) const;

    /// Generalized inverse inf{z : c(z) >= pi}; -inf below c(z_min), +inf above c(z_max).
    double inverse(double pi) const;

    /// Throws std::logic_error if c is not nondecreasing or leaves [m, 1 - kClipEps].
    void check_invariants() const;

    SolveInfo info;

private:
    ZGrid grid_;
    std::vector<double> c_;
    std::vector<double> m_;
    std::vector<double> logit_c_;
};

/// Threshold on the cost level x for a belief pi, with explicit sentinels.
struct CostThreshold {
    enum class Kind { Finite, Infinite, Zero };
    double value;
    Kind kind;
};

/// b(pi) = exp[(sigma^2 / 2 alpha) logit(pi) - c^{-1}(pi)]; stopping is optimal iff x >= b(pi).
CostThreshold boundary_in_x(const Boundary& c, double pi, const Model& model);

} // namespace envtiming
