#include "hjmsv/mesh.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace hjmsv {

void MetricParams::validate() const {
    if (!(z0 < z_inf)) throw std::invalid_argument("metric requires z0 < z_inf");
    if (!(alpha > 0.0)) throw std::invalid_argument("metric requires alpha > 0");
    if (center < z0 || center > z_inf)
        throw std::invalid_argument("metric center must lie inside [z0, z_inf]");
}

Axis build_axis(const MetricParams& params, int n) {
    params.validate();
    if (n < 3) throw std::invalid_argument("axis needs at least 3 nodes");

    Axis axis;
    axis.map = Axis::Map::sinh;
    axis.params = params;
    axis.n = n;
    axis.c1 = std::asinh((params.z0 - params.center) / params.alpha);
    axis.c2 = std::asinh((params.z_inf - params.center) / params.alpha);

    axis.x.resize(n);
    axis.z.resize(n);
    axis.j1.resize(n);
    axis.j2.resize(n);
    const double span = axis.c2 - axis.c1;
    for (int i = 0; i < n; ++i) {
        double x = static_cast<double>(i) / (n - 1);
        double u = axis.c2 * x + axis.c1 * (1.0 - x);
        axis.x[i] = x;
        axis.z[i] = params.center + params.alpha * std::sinh(u);
        axis.j1[i] = params.alpha * std::cosh(u) * span;
        axis.j2[i] = params.alpha * std::sinh(u) * span * span;
    }
    // pin the endpoints exactly
    axis.z.front() = params.z0;
    axis.z.back() = params.z_inf;
    return axis;
}

Axis uniform_axis(double z0, double z_inf, int n) {
    if (!(z0 < z_inf)) throw std::invalid_argument("axis requires z0 < z_inf");
    if (n < 3) throw std::invalid_argument("axis needs at least 3 nodes");
    Axis axis;
    axis.map = Axis::Map::linear;
    axis.params = {z0, 1.0, z0, z_inf};
    axis.n = n;
    axis.x.resize(n);
    axis.z.resize(n);
    axis.j1.assign(n, z_inf - z0);
    axis.j2.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        axis.x[i] = static_cast<double>(i) / (n - 1);
        axis.z[i] = z0 + (z_inf - z0) * axis.x[i];
    }
    return axis;
}

Axis singleton_axis(double value) {
    Axis axis;
    axis.map = Axis::Map::singleton;
    axis.n = 1;
    axis.x = {0.0};
    axis.z = {value};
    axis.j1 = {1.0};
    axis.j2 = {0.0};
    return axis;
}

double physical_to_computational(const Axis& axis, double z) {
    const double lo = axis.z.front(), hi = axis.z.back();
    const double tol = 1e-12 * (std::abs(hi) + std::abs(lo) + 1.0);
    if (z < lo - tol || z > hi + tol)
        throw std::domain_error("physical_to_computational: point outside axis");
    switch (axis.map) {
        case Axis::Map::singleton:
            return 0.0;
        case Axis::Map::linear:
            return (z - lo) / (hi - lo);
        case Axis::Map::sinh: {
            double u = std::asinh((z - axis.params.center) / axis.params.alpha);
            double x = (u - axis.c1) / (axis.c2 - axis.c1);
            return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x);
        }
    }
    throw std::logic_error("unreachable");
}

AxisDefaults default_axes(double strike_scaled, double v_center) {
    if (strike_scaled <= 0.0)
        throw std::invalid_argument("default_axes: strike must be positive");
    AxisDefaults d;
    d.r = {strike_scaled, 0.05, 0.0, 250.0};
    d.v = {v_center, 0.5, 0.0, 30.0};
    d.y = {0.0, 0.05, 0.0, 250.0};
    return d;
}

void dump_axis_csv(const Axis& axis, std::ostream& out) {
    out << "i,x,z,j1,j2\n";
    out.precision(15);
    for (int i = 0; i < axis.n; ++i)
        out << i << ',' << axis.x[i] << ',' << axis.z[i] << ',' << axis.j1[i]
            << ',' << axis.j2[i] << '\n';
}

}  // namespace hjmsv
