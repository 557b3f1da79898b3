#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "hjmsv/mesh.hpp"
#include "hjmsv/model.hpp"

namespace hjmsv {

/// Discretized solution over the (nr x nv x ny) tensor mesh at one time level.
struct Grid3 {
    Axis r, v, y;
    std::vector<double> data;
    double time = 0.0;   ///< calendar time of this level

    Grid3() = default;
    Grid3(Axis r_axis, Axis v_axis, Axis y_axis)
        : r(std::move(r_axis)), v(std::move(v_axis)), y(std::move(y_axis)),
          data(static_cast<std::size_t>(r.n) * v.n * y.n, 0.0) {}

    int nr() const { return r.n; }
    int nv() const { return v.n; }
    int ny() const { return y.n; }
    std::size_t idx(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * v.n + j) * y.n + k;
    }
    double& at(int i, int j, int k) { return data[idx(i, j, k)]; }
    double at(int i, int j, int k) const { return data[idx(i, j, k)]; }
};

/// Metric-corrected PDE coefficients at one mesh node, for the operator
///   F = g1 d_xx^r + g2 d_xx^v + g3 d_x^r d_x^v
///     + g4 d_x^r + g5 d_x^v + g6 d_x^y - reaction
/// written in the uniform computational coordinates of each axis.
struct GCoeffs {
    double g1 = 0.0, g2 = 0.0, g3 = 0.0;
    double g4 = 0.0, g5 = 0.0, g6 = 0.0;
    double reaction = 0.0;
};

/// Node-wise coefficient provider. prepare(t) fixes the time level; at(i,j,k)
/// must then be safe to call concurrently.
class CoefficientField {
public:
    virtual ~CoefficientField() = default;
    virtual void prepare(double t) = 0;
    virtual GCoeffs at(int i, int j, int k) const = 0;
};

/// Jacobian correction of the rescaled coefficients at one node:
///   g1 = h1/Jr^2, g2 = h2/Jv^2, g3 = h3/(Jr Jv),
///   g4 = h4/Jr - h1 J2r/Jr^3, g5 = h5/Jv - h2 J2v/Jv^3, g6 = h6/Jy,
/// with reaction r~ r0. Axes carry the rescaled coordinates (r/r0, v, y/r0^2).
GCoeffs metric_coefficients(double t, int i, int j, int k, const Axis& r_axis,
                            const Axis& v_axis, const Axis& y_axis,
                            const ModelParams& params, const InitialCurve& curve,
                            double r0);

/// Production coefficient field: same values as metric_coefficients, with the
/// separable per-axis factors cached per time level.
class HjmCoefficientField final : public CoefficientField {
public:
    HjmCoefficientField(const Axis& r_axis, const Axis& v_axis, const Axis& y_axis,
                        ModelParams params, InitialCurve curve, double r0);
    void prepare(double t) override;
    GCoeffs at(int i, int j, int k) const override;

private:
    const Axis &r_, &v_, &y_;
    ModelParams params_;
    InitialCurve curve_;
    double r0_;

    // per-level caches
    double half_eps2_ = 0.0, c4_ = 0.0, theta_ = 0.0, kappa_ = 0.0;
    std::vector<double> a_;        // 0.5 lambda^2 (r~^gamma r0^{gamma-1})^2 per i
    std::vector<double> b_;        // lambda eps rho r~^gamma r0^{gamma-1} per i
};

enum class Face { r_min = 0, r_max, v_min, v_max, y_min, y_max };

/// How one face of the 3D box is treated.
enum class FaceRule {
    dirichlet,             ///< prescribed value, identity row in factor solves
    degenerate_pde,        ///< PDE with vanished diffusion, one-sided convection
    one_sided_convection,  ///< full PDE row, one-sided first derivative
};

/// Boundary treatment of an instrument: one rule per face, plus the value
/// function (in axis coordinates and calendar time) for Dirichlet faces.
struct BoundarySpec {
    enum class Instrument { zcb, caplet, custom };
    using ValueFn = std::function<double(double t, double zr, double zv, double zy)>;

    Instrument instrument = Instrument::custom;
    std::array<FaceRule, 6> rule{};
    std::array<ValueFn, 6> value{};

    FaceRule face_rule(Face f) const { return rule[static_cast<int>(f)]; }

    /// Bond: r_max Dirichlet 0, y_max/v_max Dirichlet through the closed
    /// form, r=0 and v=0 degenerate rows, one-sided convection at y=0.
    static BoundarySpec zcb(double maturity, const InitialCurve& curve,
                            const ModelParams& params, double r0);

    /// Caplet: r_max and y_max Dirichlet 0, v_max Dirichlet
    /// p(t,T) - p(t,T_M), degenerate rows at r=0 and v=0, one-sided
    /// convection at y=0.
    static BoundarySpec caplet(const CapletSpec& spec, const InitialCurve& curve,
                               const ModelParams& params, double r0);

    /// All six faces Dirichlet with one value function (manufactured tests).
    static BoundarySpec dirichlet_all(ValueFn fn);

    void validate() const;  ///< throws on malformed specs (e.g. PDE row at a max face)
};

/// One tridiagonal line of a factor matrix. Entries lower[0] and
/// upper[n-1] are unused and kept at zero. rhs_adjust carries additive
/// right-hand-side contributions (boundary data). first_row_super2 holds the
/// (0,2) entry produced by the second-order advanced row at the y = 0 face;
/// the solver eliminates it against row 1 before the Thomas sweep, so the
/// solve stays O(n) and the row remains fully implicit.
struct TriDiagLine {
    std::vector<double> lower, diag, upper, rhs_adjust;
    double first_row_super2 = 0.0;

    explicit TriDiagLine(int n = 0)
        : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), rhs_adjust(n, 0.0) {}
    int size() const { return static_cast<int>(diag.size()); }
};

/// Assembles the directional operators L_r, L_v, L_y and the explicit mixed
/// operator L_rv on a fixed mesh, with boundary rows resolved per face rule.
///
/// The reaction term r~ r0 C is carried by L_y alone, so the three
/// directional operators sum to the full spatial discretization.
class SpatialOperator {
public:
    struct Options {
        int y_boundary_order = 2;  ///< 1 or 2 (advanced differences at y = 0)
        int r_boundary_order = 2;  ///< 1 or 2 (degenerate row at r = 0)
    };

    SpatialOperator(const Axis& r_axis, const Axis& v_axis, const Axis& y_axis,
                    CoefficientField& coeffs, const BoundarySpec& boundary,
                    Options options = Options{2, 2});

    /// Rows of I - theta_dt * L_r along the r-line at fixed (j,k).
    /// Coefficients must have been prepared at the factor time level.
    TriDiagLine assemble_line_r(int j, int k, double theta_dt) const;
    TriDiagLine assemble_line_v(int i, int k, double theta_dt) const;
    TriDiagLine assemble_line_y(int i, int j, double theta_dt) const;

    /// (L_r + L_v + L_y + L_rv) u at every non-Dirichlet node; Dirichlet
    /// entries of `out` are set to zero. Coefficients must be prepared.
    void apply_operator(const Grid3& u, Grid3& out) const;

    /// g3 * cross-difference field; zero wherever the centered (r,v) stencil
    /// cannot be formed and at Dirichlet nodes.
    Grid3 apply_mixed(const Grid3& u, double t) const;

    bool is_dirichlet(int i, int j, int k) const;
    /// Prescribed value at a Dirichlet node (axis coordinates, calendar t).
    double dirichlet_value(double t, int i, int j, int k) const;

    const Axis& r_axis() const { return r_; }
    const Axis& v_axis() const { return v_; }
    const Axis& y_axis() const { return y_; }
    const BoundarySpec& boundary() const { return boundary_; }
    CoefficientField& coefficients() const { return coeffs_; }
    const Options& options() const { return options_; }

private:
    const Axis &r_, &v_, &y_;
    CoefficientField& coeffs_;
    BoundarySpec boundary_;
    Options options_;
    double dxr_, dxv_, dxy_;
};

}  // namespace hjmsv
