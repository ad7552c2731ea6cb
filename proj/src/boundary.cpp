#include "envtiming/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace envtiming {

void ZGrid::validate() const
{
    if (!(z_min < z_max)) throw ValidationError("grid: z_min must be below z_max");
    if (n < 2) throw ValidationError("grid: at least two nodes required");
}

double ZGrid::node(std::size_t i) const
{
    if (i + 1 == n) return z_max;
    return z_min + static_cast<double>(i) * step();
}

std::vector<double> ZGrid::nodes() const
{
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = node(i);
    return out;
}

Boundary::Boundary(ZGrid grid, std::vector<double> c_values, std::vector<double> m_values)
    : grid_(grid), c_(std::move(c_values)), m_(std::move(m_values))
{
    grid_.validate();
    if (c_.size() != grid_.n || m_.size() != grid_.n)
        throw ValidationError("boundary: value count does not match grid size");
    logit_c_.resize(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) logit_c_[i] = logit(c_[i]);
}

Boundary Boundary::from_lower_threshold(const Model& model, const ZGrid& grid)
{
    grid.validate();
    std::vector<double> m(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) m[i] = model.m(grid.node(i));
    return Boundary(grid, m, m);
}

Boundary Boundary::constant(const Model& model, const ZGrid& grid, double level)
{
    Boundary b = from_lower_threshold(model, grid);
    std::fill(b.c_.begin(), b.c_.end(), level);
    std::fill(b.logit_c_.begin(), b.logit_c_.end(), logit(level));
    return b;
}

double Boundary::c_at(double z) const
{
    if (!(z > grid_.z_min)) return c_.front();
    if (!(z < grid_.z_max)) return c_.back();
    const double u = (z - grid_.z_min) / grid_.step();
    const auto k = std::min(static_cast<std::size_t>(u), c_.size() - 2);
    const double w = u - static_cast<double>(k);
    return c_[k] + w * (c_[k + 1] - c_[k]);
}

double Boundary::logit_c_at(double z) const
{
    if (!(z > grid_.z_min)) return logit_c_.front();
    if (!(z < grid_.z_max)) return logit_c_.back();
    return logit(c_at(z));
}

double Boundary::inverse(double pi) const
{
    if (pi <= c_.front()) return -std::numeric_limits<double>::infinity();
    if (pi > c_.back()) return std::numeric_limits<double>::infinity();
    // first node with c >= pi; c[k-1] < pi <= c[k]
    const auto it = std::lower_bound(c_.begin(), c_.end(), pi);
    const auto k = static_cast<std::size_t>(it - c_.begin());
    const double lo = c_[k - 1];
    const double hi = c_[k];
    return grid_.node(k - 1) + (pi - lo) / (hi - lo) * grid_.step();
}

void Boundary::check_invariants() const
{
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (i > 0 && c_[i] < c_[i - 1])
            throw std::logic_error("boundary not nondecreasing at node " + std::to_string(i));
        if (c_[i] < m_[i] || c_[i] > 1.0 - kClipEps)
            throw std::logic_error("boundary outside [m, 1 - eps] at node " + std::to_string(i));
    }
}

CostThreshold boundary_in_x(const Boundary& c, double pi, const Model& model)
{
    const double zb = c.inverse(pi);
    if (zb == -std::numeric_limits<double>::infinity())
        return {std::numeric_limits<double>::infinity(), CostThreshold::Kind::Infinite};
    if (zb == std::numeric_limits<double>::infinity()) return {0.0, CostThreshold::Kind::Zero};
    return {model.x_boundary(pi, zb), CostThreshold::Kind::Finite};
}

} // namespace envtiming
