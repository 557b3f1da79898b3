#pragma once

#include <functional>
#include <utility>

#include "hjmsv/discretization.hpp"

namespace hjmsv {

struct SolverConfig {
    double theta_cn = 0.5;          ///< implicitness weight in [0,1]
    int steps_per_year = 12;
    int y_boundary_order = 2;       ///< 1 or 2
    int r_boundary_order = 2;       ///< 1 or 2 (advanced row at r = 0)
    bool smoothing = true;          ///< cell-average the terminal condition
    int smoothing_subsamples = 3;   ///< midpoint samples per dimension
    double divergence_bound = 1e6;  ///< max |U| before the step aborts

    void validate() const;
};

struct SolveReport {
    double wall_seconds = 0.0;
    int n_steps = 0;
    double last_max_delta = 0.0;  ///< max |dU| of the final step
    bool nan_guard_ok = true;
};

/// Thomas solve of the tridiagonal system line * x = rhs (7N operations).
/// rhs_adjust is added to the right-hand side first; a folded second-order
/// y-boundary row consumes first_row_super2 against rhs[2]. Throws
/// std::runtime_error on a vanishing pivot.
std::vector<double> thomas_solve(const TriDiagLine& line, std::vector<double> rhs);

/// In-place variant working on a raw buffer with caller-provided scratch of
/// the same length.
void thomas_solve_inplace(const TriDiagLine& line, double* rhs, double* scratch);

/// One Douglas splitting step of the reversed-time march: from the level
/// stored in grid.time to grid.time - dt (one Crank-Nicholson-weighted step
/// of length dt in the reversed variable). The explicit stage applies the
/// full operator, mixed term included, at the current level; the three
/// implicit factor solves use coefficients at the half level. Returns
/// max |dU|.
double douglas_step(
    Grid3& grid, const SpatialOperator& op, double dt, const SolverConfig& config,
    const std::function<double(double t, double zr, double zv, double zy)>& source = {});

/// Replaces interior node values by the cell average of the payoff over the
/// half-spacing cell, via tensor-product composite midpoint sampling with
/// `subsamples` points per dimension. In every dimension where the node lies
/// on a face (or the axis is collapsed) the rule degenerates to the pointwise
/// value.
void smooth_terminal(Grid3& grid,
                     const std::function<double(double zr, double zv, double zy)>& payoff,
                     int subsamples);

/// A complete pricing problem in axis (rescaled) coordinates.
struct PdeProblem {
    Axis r_axis, v_axis, y_axis;
    ModelParams model;
    InitialCurve curve;
    double r0 = 0.01;          ///< rate scale of the axis coordinates
    double maturity = 1.0;     ///< march length T (years)
    std::function<double(double zr, double zv, double zy)> terminal;
    BoundarySpec boundary;

    /// optional extra source term S(t, zr, zv, zy) (manufactured solutions)
    std::function<double(double t, double zr, double zv, double zy)> source;
    /// optional per-step hook (step index, reversed time, grid, max |dU|)
    std::function<void(int, double, const Grid3&, double)> observer;
};

/// Marches the terminal condition back to the valuation date and returns the
/// t = 0 surface. Steps are uniform with n = round(steps_per_year * T).
std::pair<Grid3, SolveReport> run(const PdeProblem& problem, const SolverConfig& config);

}  // namespace hjmsv
