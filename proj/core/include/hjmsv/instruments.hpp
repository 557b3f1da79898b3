#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "hjmsv/solver.hpp"

namespace hjmsv {

/// Mesh description of one pricing run. Metric parameters are in rescaled
/// units (r/r0 on the rate axis, y/r0^2 on the convexity axis).
struct MeshSpec {
    MetricParams r, v, y;
    int nr = 100, nv = 50, ny = 50;
    double r0 = 0.01;   ///< rate scale

    /// Caplet defaults: axes concentrated at the strike per the reference
    /// metric (r,y on [0,250] with alpha 0.05, v on [0,30] with alpha 0.5).
    static MeshSpec caplet_default(double strike, double r0 = 0.01);

    /// Bond-study defaults: r on [0,25] concentrated at the spot rate,
    /// y on [0,250] with alpha 0.5, v collapsed.
    static MeshSpec zcb_default(double spot_rate, double r0 = 0.01);

    /// Bond mesh for a general curve: the solution rides the forward-rate
    /// characteristic, so the dense zone is centered on the corridor
    /// [f(0,0), f(0,T)] and stretched gently enough to cover it.
    static MeshSpec zcb_curve_default(const InitialCurve& curve, double maturity,
                                      double r0 = 0.01);
};

/// Price at the requested spot plus sensitivity fields and run metadata.
/// The Greeks grids are in physical units: rho = dC/dr, vega = dC/dv.
struct PriceResult {
    double price = 0.0;
    std::optional<double> reference;   ///< closed form, when one exists
    Grid3 solution;                    ///< t = 0 surface (axis coordinates)
    Grid3 rho_grid;
    Grid3 vega_grid;
    std::vector<std::pair<double, double>> premium_by_strike;
    SolveReport report;
};

/// The model's natural valuation state: r at the initial forward, unit
/// variance, zero convexity state.
StatePoint natural_spot(const InitialCurve& curve);

/// Trilinear interpolation in computational coordinates; exact at nodes.
/// Queries are in axis coordinates and must lie inside the mesh.
double interpolate_at(const Grid3& grid, double zr, double zv, double zy);

/// Per-node first derivatives of the solution with respect to the r and v
/// axis coordinates: centered differences in computational space divided by
/// the Jacobian, one-sided at faces. Collapsed directions give zero.
std::pair<Grid3, Grid3> extract_greeks(const Grid3& grid);

using StepObserver = std::function<void(int, double, const Grid3&, double)>;

/// Prices a zero coupon bond with maturity T by solving the PDE with
/// terminal condition 1; reports the closed-form reference alongside.
/// With mesh.nv == 1 the variance direction collapses to the spot variance
/// (the bond solution does not depend on v); full_3d keeps the v axis.
PriceResult price_zcb(double maturity, const InitialCurve& curve,
                      const ModelParams& params, const MeshSpec& mesh,
                      const SolverConfig& solver_cfg, const StatePoint& spot,
                      bool full_3d = false, const StepObserver& observer = {});

/// Prices a caplet; the terminal kink is cell-averaged when smoothing is on.
PriceResult price_caplet(const CapletSpec& spec, const InitialCurve& curve,
                         const ModelParams& params, const MeshSpec& mesh,
                         const SolverConfig& solver_cfg, const StatePoint& spot,
                         const StepObserver& observer = {});

/// Prices a strike ladder on one fixed mesh (the mesh is NOT re-centered per
/// strike), fanning strikes out over `threads` workers (0 = hardware).
std::vector<std::pair<double, double>> caplet_ladder(
    const CapletSpec& base, const std::vector<double>& strikes,
    const InitialCurve& curve, const ModelParams& params, const MeshSpec& mesh,
    const SolverConfig& solver_cfg, const StatePoint& spot, int threads = 1);

}  // namespace hjmsv
