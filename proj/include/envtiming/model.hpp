#pragma once

#include <stdexcept>
#include <string>

namespace envtiming {

/// Beliefs are kept inside [kClipEps, 1 - kClipEps] wherever a threshold is stored.
inline constexpr double kClipEps = 1e-9;

/// Absolute tolerance of the bisection that locates m(z).
inline constexpr double kRootTol = 1e-10;

/// Raised when a parameter set or state violates its invariants.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/**
 * Primitive model parameters.
 *
 * Defaults are the reference calibration used throughout the project:
 * sigma=0.2, E=0.5, beta=0.4, delta=0.2, I=10, r=0.1, alpha=0.05.
 */
struct ModelParams {
    double sigma = 0.2;   ///< volatility of the cost process
    double e_rate = 0.5;  ///< emissions rate before adoption
    double beta = 0.4;    ///< emissions-to-stock scale
    double delta = 0.2;   ///< dissipation rate of the pollutant
    double i_cost = 10.0; ///< sunk adoption cost
    double r = 0.1;       ///< discount rate
    double alpha = 0.05;  ///< magnitude of the unknown drift (+alpha or -alpha)

    /// Throws ValidationError unless every field is positive and finite and r > alpha.
    void validate() const;

    /// Read/write access by name ("sigma", "E"/"e_rate", "beta", ...). Throws on unknown names.
    double get(const std::string& name) const;
    void set(const std::string& name, double value);
};

/// Constants that appear in the closed-form strategy values and in q.
struct DerivedConstants {
    double theta;     ///< coefficient of pi in the never-adopt running-cost term
    double theta0;    ///< coefficient of pi in the post-adoption stock term
    double rho;
    double rho0;
    double coef_a;    ///< (alpha - r) theta + 2 alpha rho, always negative
    double coef_b;    ///< (alpha + r) rho
    double exp_ratio; ///< sigma^2 / (2 alpha)
};

DerivedConstants derive_constants(const ModelParams& params);

/// Original coordinates: cost per unit of pollution, pollutant stock, belief.
struct StatePoint {
    double x;
    double p;
    double pi;

    void validate() const;
};

/// Transformed coordinates (z, pi).
struct TransformedPoint {
    double z;
    double pi;
};

/// Cost level and belief, the pair the reduced stopping problem lives on.
struct CostBelief {
    double x;
    double pi;
};

double logit(double pi);
double logistic(double phi);

/**
 * Immutable bundle of parameters and derived constants with every closed-form
 * function of the model. All members are const and thread-safe.
 */
class Model {
public:
    explicit Model(const ModelParams& params = {});

    const ModelParams& params() const { return params_; }
    const DerivedConstants& constants() const { return dc_; }

    /// Total expected discounted cost when the policy is never adopted.
    double value_never(const StatePoint& sp) const;
    /// Total expected discounted cost when the policy is adopted at time zero.
    double value_now(const StatePoint& sp) const;
    /// Reward of the reduced stopping problem: beta E x (theta pi + rho) - I.
    double reward_g(double x, double pi) const;
    /// Reward expressed in (z, pi) coordinates.
    double obstacle_f(const TransformedPoint& tp) const;

    /// Running gain of the gap function w = W - F.
    double q(double z, double pi) const;
    /// Same as q, with the belief given as phi = logit(pi). Stable for any finite phi.
    double q_logit(double z, double phi) const;

    /// Lower threshold: the root of q(z, .) in (0, 1), clamped to [kClipEps, 1 - kClipEps].
    double m(double z) const;

    TransformedPoint to_z(double x, double pi) const;
    CostBelief to_xpi(const TransformedPoint& tp) const;
    /// x = exp(-z + (sigma^2 / 2 alpha) phi), the cost level implied by (z, logit pi).
    double x_from_logit(double z, double phi) const;

    /// b(pi) evaluated from the transformed boundary location z_b = c^{-1}(pi).
    double x_boundary(double pi, double z_b) const;

private:
    ModelParams params_;
    DerivedConstants dc_;
};

} // namespace envtiming
