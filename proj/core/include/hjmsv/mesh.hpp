#pragma once

#include <iosfwd>
#include <vector>

namespace hjmsv {

/// Parameters of the hyperbolic-sine stretching of one coordinate direction:
///   z(x) = center + alpha * sinh(c2 x + c1 (1 - x)),  x in [0,1],
///   c1 = asinh((z0 - center)/alpha),  c2 = asinh((z_inf - center)/alpha).
/// Small alpha concentrates nodes near the center (the strike for the rate
/// axis); z(0) = z0 and z(1) = z_inf exactly.
struct MetricParams {
    double center = 0.0;  ///< concentration point K (physical units)
    double alpha = 0.05;  ///< stretching scale, > 0
    double z0 = 0.0;      ///< lower physical bound
    double z_inf = 1.0;   ///< upper physical bound

    void validate() const;  ///< throws std::invalid_argument
};

/// One discretized coordinate direction: uniform computational nodes
/// x_i = i/(n-1) and their physical images z_i with the first and second
/// Jacobians dz/dx, d2z/dx2 evaluated analytically at the nodes.
struct Axis {
    enum class Map { sinh, linear, singleton };

    int n = 0;
    std::vector<double> x;   ///< computational coordinates in [0,1]
    std::vector<double> z;   ///< physical coordinates
    std::vector<double> j1;  ///< dz/dx at nodes, > 0
    std::vector<double> j2;  ///< d2z/dx2 at nodes

    Map map = Map::sinh;
    MetricParams params;     // sinh map constants (unused for linear/singleton)
    double c1 = 0.0, c2 = 0.0;

    double dx() const { return n > 1 ? 1.0 / (n - 1) : 1.0; }
    bool collapsed() const { return n == 1; }
};

/// Builds the sinh-stretched axis. Requires n >= 3.
Axis build_axis(const MetricParams& params, int n);

/// Linear map z = z0 + (z_inf - z0) x; constant Jacobian. Used for tests and
/// for directions where no concentration is wanted.
Axis uniform_axis(double z0, double z_inf, int n);

/// Collapsed direction holding a single physical value (e.g. the variance
/// axis of a bond solve, whose solution does not depend on v).
Axis singleton_axis(double value);

/// Inverse of the axis map; z must lie within [z0, z_inf].
double physical_to_computational(const Axis& axis, double z);

/// Metric parameter sets for the three directions of a caplet solve, in
/// rescaled units: rate axis concentrated at the strike with alpha 0.05 on
/// [0,250], variance axis at v_center with alpha 0.5 on [0,30], convexity
/// axis at 0 with alpha 0.05 on [0,250].
struct AxisDefaults {
    MetricParams r, v, y;
};
AxisDefaults default_axes(double strike_scaled, double v_center = 0.5);

/// CSV dump (i, x, z, j1, j2) with a header row.
void dump_axis_csv(const Axis& axis, std::ostream& out);

}  // namespace hjmsv
