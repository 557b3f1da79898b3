#include "hjmsv/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hjmsv {

void SolverConfig::validate() const {
    if (theta_cn < 0.0 || theta_cn > 1.0)
        throw std::invalid_argument("theta_cn must lie in [0,1]");
    if (steps_per_year < 1) throw std::invalid_argument("steps_per_year must be >= 1");
    if (y_boundary_order != 1 && y_boundary_order != 2)
        throw std::invalid_argument("y_boundary_order must be 1 or 2");
    if (smoothing_subsamples < 1)
        throw std::invalid_argument("smoothing_subsamples must be >= 1");
    if (divergence_bound <= 0.0)
        throw std::invalid_argument("divergence_bound must be positive");
}

void thomas_solve_inplace(const TriDiagLine& line, double* rhs, double* scratch) {
    const int n = line.size();
    if (n == 0) return;
    for (int i = 0; i < n; ++i) rhs[i] += line.rhs_adjust[i];

    double d0 = line.diag[0], u0 = line.upper[0], rhs0 = rhs[0];
    if (line.first_row_super2 != 0.0 && n > 2) {
        // eliminate the (0,2) entry of the advanced boundary row against
        // row 1, which keeps the system tridiagonal and the row implicit
        if (std::abs(line.upper[1]) > 1e-300) {
            const double f = line.first_row_super2 / line.upper[1];
            d0 -= f * line.lower[1];
            u0 -= f * line.diag[1];
            rhs0 -= f * rhs[1];
        } else {
            // vanishing coupling: lag the tiny (0,2) term on the iterate
            rhs0 -= line.first_row_super2 * rhs[2];
        }
    }

    // forward elimination; scratch holds the modified superdiagonal
    double piv = d0;
    if (std::abs(piv) < 1e-300)
        throw std::runtime_error("thomas_solve: singular pivot at row 0");
    scratch[0] = u0 / piv;
    rhs[0] = rhs0 / piv;
    for (int i = 1; i < n; ++i) {
        piv = line.diag[i] - line.lower[i] * scratch[i - 1];
        if (std::abs(piv) < 1e-300)
            throw std::runtime_error("thomas_solve: singular pivot at row " +
                                     std::to_string(i));
        scratch[i] = line.upper[i] / piv;
        rhs[i] = (rhs[i] - line.lower[i] * rhs[i - 1]) / piv;
    }
    for (int i = n - 2; i >= 0; --i) rhs[i] -= scratch[i] * rhs[i + 1];
}

std::vector<double> thomas_solve(const TriDiagLine& line, std::vector<double> rhs) {
    if (static_cast<int>(rhs.size()) != line.size())
        throw std::invalid_argument("thomas_solve: size mismatch");
    std::vector<double> scratch(rhs.size());
    thomas_solve_inplace(line, rhs.data(), scratch.data());
    return rhs;
}

namespace {

void guard_finite(const Grid3& grid, double bound) {
    for (double x : grid.data) {
        if (!std::isfinite(x))
            throw std::runtime_error("solution left the finite range (NaN/Inf)");
        if (std::abs(x) > bound)
            throw std::runtime_error("solution exceeded the divergence bound " +
                                     std::to_string(bound));
    }
}

}  // namespace

double douglas_step(
    Grid3& grid, const SpatialOperator& op, double dt, const SolverConfig& config,
    const std::function<double(double t, double zr, double zv, double zy)>& source) {
    const int nr = grid.nr(), nv = grid.nv(), ny = grid.ny();
    const double t_from = grid.time;
    double t_next = t_from - dt;
    if (std::abs(t_next) < 1e-12 * dt) t_next = 0.0;  // land exactly on t = 0
    const double t_mid = t_from - 0.5 * dt;
    const double theta_dt = config.theta_cn * dt;

    CoefficientField& coeffs = op.coefficients();

    // Explicit stage: dU0 = dt * F(U^n). Coefficients are taken at the half
    // level for the explicit side as well: with time-dependent drifts
    // (spline curves) a start-of-step evaluation costs one temporal order.
    coeffs.prepare(t_mid);
    Grid3 delta(grid.r, grid.v, grid.y);
    op.apply_operator(grid, delta);
    for (double& x : delta.data) x *= dt;

    if (source) {
        for (int i = 0; i < nr; ++i)
            for (int j = 0; j < nv; ++j)
                for (int k = 0; k < ny; ++k)
                    if (!op.is_dirichlet(i, j, k))
                        delta.at(i, j, k) +=
                            dt * source(t_mid, grid.r.z[i], grid.v.z[j], grid.y.z[k]);
    }

    // Dirichlet increments: land exactly on the prescribed next-level values
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nv; ++j)
            for (int k = 0; k < ny; ++k)
                if (op.is_dirichlet(i, j, k))
                    delta.at(i, j, k) =
                        op.dirichlet_value(t_next, i, j, k) - grid.at(i, j, k);

    // implicit factors, same half-level coefficients
    std::vector<double> line_buf, scratch;

    if (nr > 1) {
        line_buf.resize(nr);
        scratch.resize(nr);
        const std::size_t stride = static_cast<std::size_t>(nv) * ny;
        for (int j = 0; j < nv; ++j)
            for (int k = 0; k < ny; ++k) {
                if (op.is_dirichlet(1, j, k)) continue;  // whole line prescribed
                TriDiagLine line = op.assemble_line_r(j, k, theta_dt);
                double* base = delta.data.data() + grid.idx(0, j, k);
                for (int i = 0; i < nr; ++i) line_buf[i] = base[i * stride];
                thomas_solve_inplace(line, line_buf.data(), scratch.data());
                for (int i = 0; i < nr; ++i) base[i * stride] = line_buf[i];
            }
    }

    if (nv > 1) {
        line_buf.resize(nv);
        scratch.resize(nv);
        const std::size_t stride = ny;
        for (int i = 0; i < nr; ++i)
            for (int k = 0; k < ny; ++k) {
                if (op.is_dirichlet(i, 1, k)) continue;
                TriDiagLine line = op.assemble_line_v(i, k, theta_dt);
                double* base = delta.data.data() + grid.idx(i, 0, k);
                for (int j = 0; j < nv; ++j) line_buf[j] = base[j * stride];
                thomas_solve_inplace(line, line_buf.data(), scratch.data());
                for (int j = 0; j < nv; ++j) base[j * stride] = line_buf[j];
            }
    }

    {
        line_buf.resize(ny);
        scratch.resize(ny);
        for (int i = 0; i < nr; ++i)
            for (int j = 0; j < nv; ++j) {
                if (ny > 1 && op.is_dirichlet(i, j, 1)) continue;
                TriDiagLine line = op.assemble_line_y(i, j, theta_dt);
                double* base = delta.data.data() + grid.idx(i, j, 0);
                thomas_solve_inplace(line, base, scratch.data());
            }
    }

    double max_delta = 0.0;
    for (std::size_t q = 0; q < grid.data.size(); ++q) {
        grid.data[q] += delta.data[q];
        max_delta = std::max(max_delta, std::abs(delta.data[q]));
    }
    // re-impose Dirichlet values exactly
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nv; ++j)
            for (int k = 0; k < ny; ++k)
                if (op.is_dirichlet(i, j, k))
                    grid.at(i, j, k) = op.dirichlet_value(t_next, i, j, k);

    grid.time = t_next;
    guard_finite(grid, config.divergence_bound);
    return max_delta;
}

void smooth_terminal(Grid3& grid,
                     const std::function<double(double zr, double zv, double zy)>& payoff,
                     int subsamples) {
    const int m = subsamples;
    auto cell_samples = [m](const Axis& axis, int i, std::vector<double>& out) {
        out.clear();
        if (axis.n == 1 || i == 0 || i == axis.n - 1) {
            out.push_back(axis.z[i]);
            return;
        }
        const double lo = axis.z[i] - 0.5 * (axis.z[i] - axis.z[i - 1]);
        const double hi = axis.z[i] + 0.5 * (axis.z[i + 1] - axis.z[i]);
        const double w = (hi - lo) / m;
        for (int q = 0; q < m; ++q) out.push_back(lo + (q + 0.5) * w);
    };

    std::vector<double> sr, sv, sy;
    for (int i = 0; i < grid.nr(); ++i) {
        cell_samples(grid.r, i, sr);
        for (int j = 0; j < grid.nv(); ++j) {
            cell_samples(grid.v, j, sv);
            for (int k = 0; k < grid.ny(); ++k) {
                cell_samples(grid.y, k, sy);
                double acc = 0.0;
                for (double zr : sr)
                    for (double zv : sv)
                        for (double zy : sy) acc += payoff(zr, zv, zy);
                grid.at(i, j, k) = acc / (sr.size() * sv.size() * sy.size());
            }
        }
    }
}

std::pair<Grid3, SolveReport> run(const PdeProblem& problem, const SolverConfig& config) {
    config.validate();
    if (!problem.terminal) throw std::invalid_argument("run: terminal condition not set");
    if (problem.maturity <= 0.0) throw std::invalid_argument("run: maturity must be positive");

    const auto t_start = std::chrono::steady_clock::now();

    Grid3 grid(problem.r_axis, problem.v_axis, problem.y_axis);
    grid.time = problem.maturity;
    for (int i = 0; i < grid.nr(); ++i)
        for (int j = 0; j < grid.nv(); ++j)
            for (int k = 0; k < grid.ny(); ++k)
                grid.at(i, j, k) = problem.terminal(grid.r.z[i], grid.v.z[j], grid.y.z[k]);
    if (config.smoothing)
        smooth_terminal(grid, problem.terminal, config.smoothing_subsamples);

    HjmCoefficientField coeffs(grid.r, grid.v, grid.y, problem.model, problem.curve,
                               problem.r0);
    SpatialOperator op(grid.r, grid.v, grid.y, coeffs, problem.boundary,
                       {config.y_boundary_order, config.r_boundary_order});

    const int n_steps =
        std::max(1, static_cast<int>(std::lround(config.steps_per_year * problem.maturity)));
    const double dt = problem.maturity / n_steps;

    SolveReport report;
    report.n_steps = n_steps;
    for (int step = 0; step < n_steps; ++step) {
        try {
            report.last_max_delta = douglas_step(grid, op, dt, config, problem.source);
        } catch (const std::runtime_error& err) {
            report.nan_guard_ok = false;
            throw std::runtime_error("step " + std::to_string(step + 1) + "/" +
                                     std::to_string(n_steps) + ": " + err.what());
        }
        if (problem.observer)
            problem.observer(step + 1, problem.maturity - grid.time, grid,
                             report.last_max_delta);
    }
    // land exactly on t = 0 against accumulated rounding
    grid.time = 0.0;

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return {std::move(grid), report};
}

}  // namespace hjmsv
