#pragma once

#include <functional>

#include "hjmsv/curve.hpp"

namespace hjmsv {

/// Time-dependent deterministic model function.
using TimeFn = std::function<double(double)>;

/// Constants and deterministic functions of the single-factor short-rate
/// model with stochastic variance:
///
///   dr = (df(0,t)/dt - kappa (r - f(0,t)) + y) dt + eta(t,r) dW
///   dy = (eta^2 - 2 kappa y) dt
///   dv = theta (1 - v) dt + eps(t) sqrt(v) dZ,   dZ dW = rho dt
///
/// with rate volatility eta(t,r) = sqrt(v) lambda(t) r^gamma(t).
struct ModelParams {
    double kappa = 0.001;     ///< mean-reversion rate (1/years)
    TimeFn lambda_fn;         ///< volatility level lambda(t)
    TimeFn gamma_fn;          ///< elasticity gamma(t) in (0,1]
    TimeFn eps_fn;            ///< vol-of-variance eps(t)
    double theta = 0.25;      ///< variance mean-reversion speed (1/years)
    double rho = -0.75;       ///< rate-variance correlation

    /// Characteristic market parameter set of 2007:
    /// kappa=0.001, lambda=0.15, gamma=0.9, eps=1.5, theta=0.25, rho=-0.75.
    static ModelParams market_2007();

    /// Constant-function convenience constructor.
    static ModelParams constants(double kappa, double lambda, double gamma,
                                 double eps, double theta, double rho);

    void validate() const;    ///< throws std::invalid_argument
};

/// Markovian state (r, v, y) at calendar time t. All three space variables
/// are nonnegative; x = r - f(0,t) is the deviation from the initial forward.
struct StatePoint {
    double r = 0.0;   ///< short rate (1/years)
    double v = 1.0;   ///< variance factor
    double y = 0.0;   ///< auxiliary convexity state (1/years^2)
    double t = 0.0;   ///< calendar time (years)
};

/// Caplet contract: pays max(1 - delta_m * p(T, T_M), 0) at the expiry T,
/// where delta_m = 1 + (T_M - T) K.
struct CapletSpec {
    double expiry = 1.0;    ///< option expiry T (years)
    double payment = 2.0;   ///< payment date T_M (years), > expiry
    double strike = 0.04;   ///< strike rate K (1/years), > 0

    double accrual_factor() const { return 1.0 + (payment - expiry) * strike; }
    void validate() const;  ///< throws std::invalid_argument
};

/// Bond duration factor G(s) = (1 - e^{-kappa s}) / kappa, with the analytic
/// limit G(s) -> s as kappa -> 0.
double g_factor(double s, double kappa);

/// Closed-form zero coupon bond price
///   p(t,T) = p(0,T)/p(0,t) * exp(-G(T-t) x - G(T-t)^2 y / 2).
/// Throws std::domain_error when T < t.
double zcb_closed_form(double t, double maturity, double x, double y,
                       const InitialCurve& curve, double kappa);

/// Zero coupon price in the kappa = 0 regime,
///   C = exp(-int_t^T f(0,s) ds) * exp(-(T-t)(r - f(0,t)) - (T-t)^2 y / 2).
double reduced_zcb_solution(double t, double maturity, double r, double y,
                            const InitialCurve& curve);

/// Second-order, first-order and reaction coefficients of the pricing PDE
///   C_t + zeta_rr C_rr + zeta_vv C_vv + zeta_rv C_rv
///       + mu_r C_r + mu_v C_v + mu_y C_y = r C.
struct PdeCoefficients {
    double zeta_rr, zeta_vv, zeta_rv;
    double mu_r, mu_v, mu_y;
};

PdeCoefficients pde_coefficients(const StatePoint& point, const ModelParams& params,
                                 const InitialCurve& curve);

/// Coefficients of the PDE in rescaled variables r~ = r/r0, y~ = y/r0^2,
/// t~ = r0 t (spatial scales only; the equation below is equivalent to the
/// raw PDE marched in physical time):
///
///   C_t + h1 C_rr + h2 C_vv + h3 C_rv + h4 C_r + h5 C_v + h6 C_y = r~ r0 C.
struct ScaledCoefficients {
    double h1, h2, h3, h4, h5, h6;
};

ScaledCoefficients rescaled_coefficients(double t, double r_tilde, double v,
                                         double y_tilde, const ModelParams& params,
                                         const InitialCurve& curve, double r0);

/// Caplet payoff at expiry: max(1 - delta_m * p(T, T_M), 0) with p evaluated
/// through the closed form at the terminal state (the bond price does not
/// depend on v).
double caplet_payoff(const StatePoint& terminal, const CapletSpec& spec,
                     const InitialCurve& curve, const ModelParams& params);

}  // namespace hjmsv
