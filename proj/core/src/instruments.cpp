#include "hjmsv/instruments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace hjmsv {

MeshSpec MeshSpec::caplet_default(double strike, double r0) {
    AxisDefaults d = default_axes(strike / r0);
    MeshSpec m;
    m.r = d.r;
    m.v = d.v;
    m.y = d.y;
    m.nr = 100;
    m.nv = 50;
    m.ny = 50;
    m.r0 = r0;
    return m;
}

MeshSpec MeshSpec::zcb_default(double spot_rate, double r0) {
    MeshSpec m;
    m.r = {spot_rate / r0, 0.05, 0.0, 25.0};
    m.y = {0.0, 0.5, 0.0, 250.0};
    m.v = {0.5, 0.5, 0.0, 30.0};   // only used in full-3d mode
    m.nr = 100;
    m.nv = 1;
    m.ny = 40;
    m.r0 = r0;
    return m;
}

MeshSpec MeshSpec::zcb_curve_default(const InitialCurve& curve, double maturity,
                                     double r0) {
    const double f0 = curve.forward(0.0);
    const double f_end = curve.forward(maturity);
    const double center = 0.5 * (f0 + f_end) / r0;
    const double half_width = 0.5 * std::abs(f_end - f0) / r0;

    MeshSpec m = zcb_default(f0, r0);
    m.r.center = center;
    m.r.alpha = half_width + 1.5;
    m.r.z_inf = center + 4.5 * m.r.alpha;
    return m;
}

StatePoint natural_spot(const InitialCurve& curve) {
    return {curve.forward(0.0), 1.0, 0.0, 0.0};
}

namespace {

struct CellWeight {
    int lo = 0;
    double w = 0.0;  // weight of the upper node
};

CellWeight locate(const Axis& axis, double z) {
    if (axis.n == 1) return {0, 0.0};
    double x = physical_to_computational(axis, z);
    double s = x * (axis.n - 1);
    int lo = std::min(static_cast<int>(s), axis.n - 2);
    return {lo, s - lo};
}

}  // namespace

double interpolate_at(const Grid3& grid, double zr, double zv, double zy) {
    const CellWeight cr = locate(grid.r, zr);
    const CellWeight cv = locate(grid.v, zv);
    const CellWeight cy = locate(grid.y, zy);

    double acc = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) {
                double w = (a ? cr.w : 1.0 - cr.w) * (b ? cv.w : 1.0 - cv.w) *
                           (c ? cy.w : 1.0 - cy.w);
                if (w == 0.0) continue;
                acc += w * grid.at(std::min(cr.lo + a, grid.nr() - 1),
                                   std::min(cv.lo + b, grid.nv() - 1),
                                   std::min(cy.lo + c, grid.ny() - 1));
            }
    return acc;
}

std::pair<Grid3, Grid3> extract_greeks(const Grid3& grid) {
    Grid3 rho(grid.r, grid.v, grid.y), vega(grid.r, grid.v, grid.y);
    rho.time = vega.time = grid.time;
    const int nr = grid.nr(), nv = grid.nv(), ny = grid.ny();
    const double dxr = grid.r.dx(), dxv = grid.v.dx();

    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nv; ++j)
            for (int k = 0; k < ny; ++k) {
                double dr = 0.0;
                if (nr > 1) {
                    if (i == 0)
                        dr = (-3.0 * grid.at(0, j, k) + 4.0 * grid.at(1, j, k) -
                              grid.at(2, j, k)) /
                             (2.0 * dxr);
                    else if (i == nr - 1)
                        dr = (3.0 * grid.at(i, j, k) - 4.0 * grid.at(i - 1, j, k) +
                              grid.at(i - 2, j, k)) /
                             (2.0 * dxr);
                    else
                        dr = (grid.at(i + 1, j, k) - grid.at(i - 1, j, k)) / (2.0 * dxr);
                    dr /= grid.r.j1[i];
                }
                rho.at(i, j, k) = dr;

                double dv = 0.0;
                if (nv > 1) {
                    if (j == 0)
                        dv = (-3.0 * grid.at(i, 0, k) + 4.0 * grid.at(i, 1, k) -
                              grid.at(i, 2, k)) /
                             (2.0 * dxv);
                    else if (j == nv - 1)
                        dv = (3.0 * grid.at(i, j, k) - 4.0 * grid.at(i, j - 1, k) +
                              grid.at(i, j - 2, k)) /
                             (2.0 * dxv);
                    else
                        dv = (grid.at(i, j + 1, k) - grid.at(i, j - 1, k)) / (2.0 * dxv);
                    dv /= grid.v.j1[j];
                }
                vega.at(i, j, k) = dv;
            }
    return {std::move(rho), std::move(vega)};
}

namespace {

// The bond solution is v-independent, so a collapsed run may sit on any
// fixed-v plane. The v = 0 plane makes the rate direction purely convective
// (no CEV diffusion), which keeps the truncation-boundary mismatch at r_max
// from diffusing into the region of interest.
Axis make_v_axis(const MeshSpec& mesh, bool full_3d) {
    if (mesh.nv == 1 && !full_3d) return singleton_axis(0.0);
    return build_axis(mesh.v, std::max(mesh.nv, 3));
}

PriceResult finish(Grid3 grid, SolveReport report, const MeshSpec& mesh,
                   const StatePoint& spot) {
    PriceResult res;
    res.price = interpolate_at(grid, spot.r / mesh.r0, spot.v,
                               spot.y / (mesh.r0 * mesh.r0));
    auto [rho, vega] = extract_greeks(grid);
    // axis-coordinate derivative -> physical rate derivative
    for (double& x : rho.data) x /= mesh.r0;
    res.rho_grid = std::move(rho);
    res.vega_grid = std::move(vega);
    res.solution = std::move(grid);
    res.report = report;
    return res;
}

void check_spot(const MeshSpec& mesh, const StatePoint& spot, bool has_v) {
    const double zr = spot.r / mesh.r0;
    const double zy = spot.y / (mesh.r0 * mesh.r0);
    if (zr < mesh.r.z0 || zr > mesh.r.z_inf)
        throw std::invalid_argument("spot rate outside the mesh");
    if (zy < mesh.y.z0 || zy > mesh.y.z_inf)
        throw std::invalid_argument("spot convexity state outside the mesh");
    if (has_v && (spot.v < mesh.v.z0 || spot.v > mesh.v.z_inf))
        throw std::invalid_argument("spot variance outside the mesh");
}

}  // namespace

PriceResult price_zcb(double maturity, const InitialCurve& curve,
                      const ModelParams& params, const MeshSpec& mesh,
                      const SolverConfig& solver_cfg, const StatePoint& spot,
                      bool full_3d, const StepObserver& observer) {
    if (maturity < 0.0) throw std::invalid_argument("zcb maturity must be nonnegative");
    params.validate();
    check_spot(mesh, spot, full_3d || mesh.nv > 1);

    const double x0 = spot.r - curve.forward(0.0);
    const double reference =
        zcb_closed_form(0.0, maturity, x0, spot.y, curve, params.kappa);

    if (maturity == 0.0) {
        PriceResult res;
        res.price = 1.0;
        res.reference = 1.0;
        return res;
    }

    PdeProblem problem;
    problem.r_axis = build_axis(mesh.r, mesh.nr);
    problem.v_axis = make_v_axis(mesh, full_3d);
    problem.y_axis = build_axis(mesh.y, mesh.ny);
    problem.model = params;
    problem.curve = curve;
    problem.r0 = mesh.r0;
    problem.maturity = maturity;
    problem.terminal = [](double, double, double) { return 1.0; };
    problem.boundary = BoundarySpec::zcb(maturity, curve, params, mesh.r0);
    problem.observer = observer;

    auto [grid, report] = run(problem, solver_cfg);
    PriceResult res = finish(std::move(grid), report, mesh, spot);
    res.reference = reference;
    return res;
}

PriceResult price_caplet(const CapletSpec& spec, const InitialCurve& curve,
                         const ModelParams& params, const MeshSpec& mesh,
                         const SolverConfig& solver_cfg, const StatePoint& spot,
                         const StepObserver& observer) {
    spec.validate();
    params.validate();
    check_spot(mesh, spot, true);

    const double r0 = mesh.r0;
    PdeProblem problem;
    problem.r_axis = build_axis(mesh.r, mesh.nr);
    problem.v_axis = build_axis(mesh.v, mesh.nv);
    problem.y_axis = build_axis(mesh.y, mesh.ny);
    problem.model = params;
    problem.curve = curve;
    problem.r0 = r0;
    problem.maturity = spec.expiry;
    problem.terminal = [spec, curve, params, r0](double zr, double, double zy) {
        StatePoint terminal{r0 * zr, 1.0, r0 * r0 * zy, spec.expiry};
        return caplet_payoff(terminal, spec, curve, params);
    };
    problem.boundary = BoundarySpec::caplet(spec, curve, params, r0);
    problem.observer = observer;

    auto [grid, report] = run(problem, solver_cfg);
    return finish(std::move(grid), report, mesh, spot);
}

std::vector<std::pair<double, double>> caplet_ladder(
    const CapletSpec& base, const std::vector<double>& strikes,
    const InitialCurve& curve, const ModelParams& params, const MeshSpec& mesh,
    const SolverConfig& solver_cfg, const StatePoint& spot, int threads) {
    if (threads <= 0)
        threads = std::max(1u, std::thread::hardware_concurrency());

    std::vector<std::pair<double, double>> out(strikes.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t q = next.fetch_add(1); q < strikes.size();
             q = next.fetch_add(1)) {
            CapletSpec spec = base;
            spec.strike = strikes[q];
            PriceResult res = price_caplet(spec, curve, params, mesh, solver_cfg, spot);
            out[q] = {strikes[q], res.price};
        }
    };
    if (threads == 1 || strikes.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        int n_workers = std::min<std::size_t>(threads, strikes.size());
        pool.reserve(n_workers);
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return out;
}

}  // namespace hjmsv
