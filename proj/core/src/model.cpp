#include "hjmsv/model.hpp"

#include <cmath>
#include <stdexcept>

namespace hjmsv {

ModelParams ModelParams::market_2007() {
    return constants(0.001, 0.15, 0.9, 1.5, 0.25, -0.75);
}

ModelParams ModelParams::constants(double kappa, double lambda, double gamma,
                                   double eps, double theta, double rho) {
    ModelParams p;
    p.kappa = kappa;
    p.lambda_fn = [lambda](double) { return lambda; };
    p.gamma_fn = [gamma](double) { return gamma; };
    p.eps_fn = [eps](double) { return eps; };
    p.theta = theta;
    p.rho = rho;
    p.validate();
    return p;
}

void ModelParams::validate() const {
    if (kappa < 0.0) throw std::invalid_argument("kappa must be nonnegative");
    if (theta < 0.0) throw std::invalid_argument("theta must be nonnegative");
    if (rho < -1.0 || rho > 1.0) throw std::invalid_argument("rho must lie in [-1,1]");
    if (!lambda_fn || !gamma_fn || !eps_fn)
        throw std::invalid_argument("model functions must be set");
    double g = gamma_fn(0.0);
    if (g <= 0.0 || g > 1.0) throw std::invalid_argument("gamma must lie in (0,1]");
}

void CapletSpec::validate() const {
    if (expiry <= 0.0) throw std::invalid_argument("caplet expiry must be positive");
    if (payment <= expiry) throw std::invalid_argument("caplet payment date must exceed expiry");
    if (strike <= 0.0) throw std::invalid_argument("caplet strike must be positive");
}

double g_factor(double s, double kappa) {
    if (s < 0.0) throw std::domain_error("g_factor: negative span");
    // First-order expansion below the cancellation threshold.
    if (std::abs(kappa * s) < 1e-8) return s * (1.0 - 0.5 * kappa * s);
    return -std::expm1(-kappa * s) / kappa;
}

double zcb_closed_form(double t, double maturity, double x, double y,
                       const InitialCurve& curve, double kappa) {
    if (maturity < t) throw std::domain_error("zcb_closed_form: maturity before valuation");
    double g = g_factor(maturity - t, kappa);
    double ratio = curve.discount(maturity) / curve.discount(t);
    return ratio * std::exp(-g * x - 0.5 * g * g * y);
}

double reduced_zcb_solution(double t, double maturity, double r, double y,
                            const InitialCurve& curve) {
    if (maturity < t) throw std::domain_error("reduced_zcb_solution: maturity before valuation");
    double span = maturity - t;
    double ratio = curve.discount(maturity) / curve.discount(t);  // exp(-int_t^T f ds)
    double x = r - curve.forward(t);
    return ratio * std::exp(-span * x - 0.5 * span * span * y);
}

PdeCoefficients pde_coefficients(const StatePoint& point, const ModelParams& params,
                                 const InitialCurve& curve) {
    const double lambda = params.lambda_fn(point.t);
    const double gamma = params.gamma_fn(point.t);
    const double eps = params.eps_fn(point.t);
    const double r_pow = point.r > 0.0 ? std::pow(point.r, gamma) : 0.0;

    PdeCoefficients c;
    c.zeta_rr = 0.5 * lambda * lambda * r_pow * r_pow * point.v;
    c.zeta_vv = 0.5 * eps * eps * point.v;
    c.zeta_rv = lambda * r_pow * eps * params.rho * point.v;
    c.mu_r = curve.forward_slope(point.t) -
             params.kappa * (point.r - curve.forward(point.t)) + point.y;
    c.mu_v = params.theta * (1.0 - point.v);
    c.mu_y = lambda * lambda * r_pow * r_pow * point.v - 2.0 * params.kappa * point.y;
    return c;
}

ScaledCoefficients rescaled_coefficients(double t, double r_tilde, double v,
                                         double y_tilde, const ModelParams& params,
                                         const InitialCurve& curve, double r0) {
    const double lambda = params.lambda_fn(t);
    const double gamma = params.gamma_fn(t);
    const double eps = params.eps_fn(t);
    // r^gamma * r0^{gamma-1} evaluated in the rescaled rate
    const double rp = r_tilde > 0.0
                          ? std::pow(r_tilde, gamma) * std::pow(r0, gamma - 1.0)
                          : 0.0;

    ScaledCoefficients h;
    h.h1 = 0.5 * lambda * lambda * rp * rp * v;
    h.h2 = 0.5 * eps * eps * v;
    h.h3 = lambda * rp * eps * params.rho * v;
    h.h4 = (curve.forward_slope(t) + params.kappa * curve.forward(t)) / r0 -
           params.kappa * r_tilde + r0 * y_tilde;
    h.h5 = params.theta * (1.0 - v);
    h.h6 = 2.0 * h.h1 - 2.0 * params.kappa * y_tilde;
    return h;
}

double caplet_payoff(const StatePoint& terminal, const CapletSpec& spec,
                     const InitialCurve& curve, const ModelParams& params) {
    double x = terminal.r - curve.forward(terminal.t);
    double p = zcb_closed_form(spec.expiry, spec.payment, x, terminal.y, curve,
                               params.kappa);
    double value = 1.0 - spec.accrual_factor() * p;
    return value > 0.0 ? value : 0.0;
}

}  // namespace hjmsv
