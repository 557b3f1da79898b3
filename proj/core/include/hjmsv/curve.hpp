#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace hjmsv {

/// Date-0 zero coupon curve.
///
/// Holds p(0,T) either analytically (flat curve p(0,T) = base^{-T}) or as a
/// natural cubic spline of ln p(0,T) through a set of discount quotes. The
/// spline representation guarantees a continuous forward rate
/// f(0,t) = -d ln p / dT and a continuous forward-rate derivative, which the
/// pricing PDE needs in its drift coefficient. Beyond the last quote the
/// forward rate is extrapolated flat.
class InitialCurve {
public:
    /// Zero-rate placeholder curve (p = 1 for every maturity).
    InitialCurve() : flat_(true), t_max_(1e9) {}

    /// p(0,T) = base^{-T}; forward rate is exactly ln(base) with zero slope.
    static InitialCurve flat(double base);

    /// Natural cubic spline of ln p through (maturity, discount) quotes.
    /// A node at T=0 with p=1 is prepended when absent. Quotes must be
    /// strictly decreasing in discount and the implied forward rate must be
    /// nonnegative wherever the spline is evaluated.
    static InitialCurve from_nodes(std::vector<std::pair<double, double>> nodes);

    /// Text table of "maturity_years discount" pairs, one per line,
    /// '#' starts a comment.
    static InitialCurve from_file(const std::string& path);

    double discount(double maturity) const;       ///< p(0,T)
    double forward(double t) const;               ///< f(0,t) = -d ln p/dT
    double forward_slope(double t) const;         ///< df(0,t)/dt

    double max_maturity() const { return t_max_; }
    double extrapolation_rate() const { return extrap_rate_; }
    bool is_flat() const { return flat_; }

    const std::vector<std::pair<double, double>>& nodes() const { return nodes_; }

private:
    void fit_spline();
    int find_interval(double t) const;

    bool flat_ = false;
    double flat_forward_ = 0.0;

    std::vector<std::pair<double, double>> nodes_;
    // spline of g(T) = ln p(0,T): g(t) = a + b*dt + c*dt^2 + d*dt^3 per interval
    std::vector<double> knots_, a_, b_, c_, d_;
    double t_max_ = 0.0;
    double extrap_rate_ = 0.0;   // flat forward beyond the last node
    double log_p_max_ = 0.0;     // ln p at the last node
};

}  // namespace hjmsv
