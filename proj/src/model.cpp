#include "envtiming/model.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace envtiming {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

} // namespace

void ModelParams::validate() const
{
    const std::pair<const char*, double> fields[] = {
        {"sigma", sigma}, {"e_rate", e_rate}, {"beta", beta},  {"delta", delta},
        {"i_cost", i_cost}, {"r", r},        {"alpha", alpha},
    };
    for (const auto& [name, value] : fields) {
        if (!positive_finite(value)) {
            std::ostringstream os;
            os << "model parameter '" << name << "' must be positive and finite (got " << value
               << ")";
            throw ValidationError(os.str());
        }
    }
    if (!(r > alpha)) {
        std::ostringstream os;
        os << "discount-rate assumption violated: r=" << r
           << " must exceed the drift magnitude alpha=" << alpha
           << " (otherwise never adopting has infinite expected cost)";
        throw ValidationError(os.str());
    }
}

double ModelParams::get(const std::string& name) const
{
    if (name == "sigma") return sigma;
    if (name == "E" || name == "e_rate") return e_rate;
    if (name == "beta") return beta;
    if (name == "delta") return delta;
    if (name == "I" || name == "i_cost") return i_cost;
    if (name == "r") return r;
    if (name == "alpha") return alpha;
    throw ValidationError("unknown model parameter '" + name + "'");
}

void ModelParams::set(const std::string& name, double value)
{
    if (name == "sigma") sigma = value;
    else if (name == "E" || name == "e_rate") e_rate = value;
    else if (name == "beta") beta = value;
    else if (name == "delta") delta = value;
    else if (name == "I" || name == "i_cost") i_cost = value;
    else if (name == "r") r = value;
    else if (name == "alpha") alpha = value;
    else throw ValidationError("unknown model parameter '" + name + "'");
}

DerivedConstants derive_constants(const ModelParams& p)
{
    p.validate();
    const double a = p.alpha;
    const double r = p.r;
    const double d = p.delta;

    DerivedConstants dc{};
    dc.theta = 2.0 * a * (2.0 * r + d) / ((r - a) * (r + a) * (r + d - a) * (r + d + a));
    dc.theta0 = 2.0 * a / ((r + d - a) * (r + d + a));
    dc.rho = 1.0 / ((r + d + a) * (r + a));
    dc.rho0 = 1.0 / (r + d + a);
    dc.coef_a = (a - r) * dc.theta + 2.0 * a * dc.rho;
    dc.coef_b = (a + r) * dc.rho;
    dc.exp_ratio = p.sigma * p.sigma / (2.0 * a);
    return dc;
}

void StatePoint::validate() const
{
    if (!positive_finite(x)) throw ValidationError("state: x must be positive and finite");
    if (!positive_finite(p)) throw ValidationError("state: p must be positive and finite");
    if (!(pi > 0.0 && pi < 1.0)) throw ValidationError("state: pi must lie strictly in (0, 1)");
}

double logit(double pi) { return std::log(pi) - std::log1p(-pi); }

double logistic(double phi)
{
    if (phi >= 0.0) return 1.0 / (1.0 + std::exp(-phi));
    const double e = std::exp(phi);
    return e / (1.0 + e);
}

Model::Model(const ModelParams& params) : params_(params), dc_(derive_constants(params)) {}

double Model::value_never(const StatePoint& sp) const
{
    const double be = params_.beta * params_.e_rate;
    return be * sp.x * (dc_.theta * sp.pi + dc_.rho) + sp.x * sp.p * (dc_.theta0 * sp.pi + dc_.rho0);
}

double Model::value_now(const StatePoint& sp) const
{
    return sp.x * sp.p * (dc_.theta0 * sp.pi + dc_.rho0) + params_.i_cost;
}

double Model::reward_g(double x, double pi) const
{
    return params_.beta * params_.e_rate * x * (dc_.theta * pi + dc_.rho) - params_.i_cost;
}

double Model::obstacle_f(const TransformedPoint& tp) const
{
    const double x = x_from_logit(tp.z, logit(tp.pi));
    return reward_g(x, tp.pi);
}

double Model::q(double z, double pi) const { return q_logit(z, logit(pi)); }

double Model::q_logit(double z, double phi) const
{
    const double pi = logistic(phi);
    const double lr = std::exp(-z + dc_.exp_ratio * phi);
    return params_.beta * params_.e_rate * lr * (dc_.coef_a * pi - dc_.coef_b)
           + params_.r * params_.i_cost;
}

double Model::m(double z) const
{
    double lo = kClipEps;
    double hi = 1.0 - kClipEps;
    // q is strictly decreasing in pi; outside the bracket the root is clipped.
    if (q(z, lo) <= 0.0) return lo;
    if (q(z, hi) > 0.0) return hi;
    while (hi - lo > kRootTol) {
        const double mid = 0.5 * (lo + hi);
        if (q(z, mid) > 0.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

TransformedPoint Model::to_z(double x, double pi) const
{
    return {dc_.exp_ratio * logit(pi) - std::log(x), pi};
}

CostBelief Model::to_xpi(const TransformedPoint& tp) const
{
    return {x_from_logit(tp.z, logit(tp.pi)), tp.pi};
}

double Model::x_from_logit(double z, double phi) const
{
    return std::exp(-z + dc_.exp_ratio * phi);
}

double Model::x_boundary(double pi, double z_b) const
{
    return std::exp(dc_.exp_ratio * logit(pi) - z_b);
}

} // namespace envtiming
