#include "hjmsv/discretization.hpp"

#include <cmath>
#include <stdexcept>

namespace hjmsv {

GCoeffs metric_coefficients(double t, int i, int j, int k, const Axis& r_axis,
                            const Axis& v_axis, const Axis& y_axis,
                            const ModelParams& params, const InitialCurve& curve,
                            double r0) {
    const ScaledCoefficients h = rescaled_coefficients(
        t, r_axis.z[i], v_axis.z[j], y_axis.z[k], params, curve, r0);
    const double jr = r_axis.j1[i], j2r = r_axis.j2[i];
    const double jv = v_axis.j1[j], j2v = v_axis.j2[j];
    const double jy = y_axis.j1[k];

    GCoeffs g;
    g.g1 = h.h1 / (jr * jr);
    g.g2 = h.h2 / (jv * jv);
    g.g3 = h.h3 / (jr * jv);
    g.g4 = h.h4 / jr - h.h1 * j2r / (jr * jr * jr);
    g.g5 = h.h5 / jv - h.h2 * j2v / (jv * jv * jv);
    g.g6 = h.h6 / jy;
    g.reaction = r_axis.z[i] * r0;
    return g;
}

HjmCoefficientField::HjmCoefficientField(const Axis& r_axis, const Axis& v_axis,
                                         const Axis& y_axis, ModelParams params,
                                         InitialCurve curve, double r0)
    : r_(r_axis), v_(v_axis), y_(y_axis), params_(std::move(params)),
      curve_(std::move(curve)), r0_(r0) {
    if (r0_ <= 0.0) throw std::invalid_argument("rate scale r0 must be positive");
    params_.validate();
    a_.resize(r_.n);
    b_.resize(r_.n);
}

void HjmCoefficientField::prepare(double t) {
    const double lambda = params_.lambda_fn(t);
    const double gamma = params_.gamma_fn(t);
    const double eps = params_.eps_fn(t);
    kappa_ = params_.kappa;
    theta_ = params_.theta;
    half_eps2_ = 0.5 * eps * eps;
    c4_ = (curve_.forward_slope(t) + kappa_ * curve_.forward(t)) / r0_;
    const double r0_pow = std::pow(r0_, gamma - 1.0);
    for (int i = 0; i < r_.n; ++i) {
        double rp = r_.z[i] > 0.0 ? std::pow(r_.z[i], gamma) * r0_pow : 0.0;
        a_[i] = 0.5 * lambda * lambda * rp * rp;
        b_[i] = lambda * eps * params_.rho * rp;
    }
}

GCoeffs HjmCoefficientField::at(int i, int j, int k) const {
    const double v = v_.z[j];
    const double yt = y_.z[k];
    const double h1 = a_[i] * v;
    const double h2 = half_eps2_ * v;
    const double jr = r_.j1[i], jv = v_.j1[j];

    GCoeffs g;
    g.g1 = h1 / (jr * jr);
    g.g2 = h2 / (jv * jv);
    g.g3 = b_[i] * v / (jr * jv);
    g.g4 = (c4_ - kappa_ * r_.z[i] + r0_ * yt) / jr - h1 * r_.j2[i] / (jr * jr * jr);
    g.g5 = theta_ * (1.0 - v) / jv - h2 * v_.j2[j] / (jv * jv * jv);
    g.g6 = (2.0 * h1 - 2.0 * kappa_ * yt) / y_.j1[k];
    g.reaction = r_.z[i] * r0_;
    return g;
}

BoundarySpec BoundarySpec::zcb(double maturity, const InitialCurve& curve,
                               const ModelParams& params, double r0) {
    const double kappa = params.kappa;
    ValueFn closed_form = [maturity, curve, kappa, r0](double t, double zr, double,
                                                       double zy) {
        double x = r0 * zr - curve.forward(t);
        return zcb_closed_form(t, maturity, x, r0 * r0 * zy, curve, kappa);
    };

    BoundarySpec b;
    b.instrument = Instrument::zcb;
    b.rule = {FaceRule::degenerate_pde,        FaceRule::dirichlet,
              FaceRule::degenerate_pde,        FaceRule::dirichlet,
              FaceRule::one_sided_convection,  FaceRule::dirichlet};
    b.value[static_cast<int>(Face::r_max)] = [](double, double, double, double) {
        return 0.0;
    };
    b.value[static_cast<int>(Face::v_max)] = closed_form;
    b.value[static_cast<int>(Face::y_max)] = closed_form;
    return b;
}

BoundarySpec BoundarySpec::caplet(const CapletSpec& spec, const InitialCurve& curve,
                                  const ModelParams& params, double r0) {
    spec.validate();
    const double kappa = params.kappa;
    const double expiry = spec.expiry, payment = spec.payment;

    BoundarySpec b;
    b.instrument = Instrument::caplet;
    b.rule = {FaceRule::degenerate_pde,        FaceRule::dirichlet,
              FaceRule::degenerate_pde,        FaceRule::dirichlet,
              FaceRule::one_sided_convection,  FaceRule::dirichlet};
    auto zero = [](double, double, double, double) { return 0.0; };
    b.value[static_cast<int>(Face::r_max)] = zero;
    b.value[static_cast<int>(Face::y_max)] = zero;
    // infinite-variance limit: forward contract value p(t,T) - p(t,T_M)
    b.value[static_cast<int>(Face::v_max)] = [expiry, payment, curve, kappa, r0](
                                                 double t, double zr, double,
                                                 double zy) {
        double x = r0 * zr - curve.forward(t);
        double y = r0 * r0 * zy;
        return zcb_closed_form(t, expiry, x, y, curve, kappa) -
               zcb_closed_form(t, payment, x, y, curve, kappa);
    };
    return b;
}

BoundarySpec BoundarySpec::dirichlet_all(ValueFn fn) {
    BoundarySpec b;
    b.instrument = Instrument::custom;
    b.rule.fill(FaceRule::dirichlet);
    for (auto& v : b.value) v = fn;
    return b;
}

void BoundarySpec::validate() const {
    for (Face f : {Face::r_max, Face::v_max, Face::y_max})
        if (face_rule(f) != FaceRule::dirichlet)
            throw std::invalid_argument("upper faces must carry Dirichlet rules");
    for (int f = 0; f < 6; ++f)
        if (rule[f] == FaceRule::dirichlet && !value[f])
            throw std::invalid_argument("Dirichlet face lacks a value function");
}

SpatialOperator::SpatialOperator(const Axis& r_axis, const Axis& v_axis,
                                 const Axis& y_axis, CoefficientField& coeffs,
                                 const BoundarySpec& boundary, Options options)
    : r_(r_axis), v_(v_axis), y_(y_axis), coeffs_(coeffs), boundary_(boundary),
      options_(options), dxr_(r_axis.dx()), dxv_(v_axis.dx()), dxy_(y_axis.dx()) {
    boundary_.validate();
    if (options_.y_boundary_order != 1 && options_.y_boundary_order != 2)
        throw std::invalid_argument("y boundary order must be 1 or 2");
    if (options_.r_boundary_order != 1 && options_.r_boundary_order != 2)
        throw std::invalid_argument("r boundary order must be 1 or 2");
    if (y_.n > 1 && y_.n < 3)
        throw std::invalid_argument("y axis needs at least 3 nodes");
}

bool SpatialOperator::is_dirichlet(int i, int j, int k) const {
    if (r_.n > 1) {
        if (i == 0 && boundary_.face_rule(Face::r_min) == FaceRule::dirichlet) return true;
        if (i == r_.n - 1 && boundary_.face_rule(Face::r_max) == FaceRule::dirichlet)
            return true;
    }
    if (v_.n > 1) {
        if (j == 0 && boundary_.face_rule(Face::v_min) == FaceRule::dirichlet) return true;
        if (j == v_.n - 1 && boundary_.face_rule(Face::v_max) == FaceRule::dirichlet)
            return true;
    }
    if (y_.n > 1) {
        if (k == 0 && boundary_.face_rule(Face::y_min) == FaceRule::dirichlet) return true;
        if (k == y_.n - 1 && boundary_.face_rule(Face::y_max) == FaceRule::dirichlet)
            return true;
    }
    return false;
}

double SpatialOperator::dirichlet_value(double t, int i, int j, int k) const {
    // value precedence at shared edges: r_max, then y_max, then v_max,
    // then any Dirichlet lower face
    const double zr = r_.z[i], zv = v_.z[j], zy = y_.z[k];
    auto active = [&](Face f, bool on_face) {
        return on_face && boundary_.face_rule(f) == FaceRule::dirichlet;
    };
    if (active(Face::r_max, r_.n > 1 && i == r_.n - 1))
        return boundary_.value[static_cast<int>(Face::r_max)](t, zr, zv, zy);
    if (active(Face::y_max, y_.n > 1 && k == y_.n - 1))
        return boundary_.value[static_cast<int>(Face::y_max)](t, zr, zv, zy);
    if (active(Face::v_max, v_.n > 1 && j == v_.n - 1))
        return boundary_.value[static_cast<int>(Face::v_max)](t, zr, zv, zy);
    if (active(Face::r_min, r_.n > 1 && i == 0))
        return boundary_.value[static_cast<int>(Face::r_min)](t, zr, zv, zy);
    if (active(Face::y_min, y_.n > 1 && k == 0))
        return boundary_.value[static_cast<int>(Face::y_min)](t, zr, zv, zy);
    if (active(Face::v_min, v_.n > 1 && j == 0))
        return boundary_.value[static_cast<int>(Face::v_min)](t, zr, zv, zy);
    throw std::logic_error("dirichlet_value queried at a non-Dirichlet node");
}

TriDiagLine SpatialOperator::assemble_line_r(int j, int k, double theta_dt) const {
    const int n = r_.n;
    TriDiagLine line(n);
    if (n == 1) {
        line.diag[0] = 1.0;
        return line;
    }
    for (int i = 0; i < n; ++i) {
        if (is_dirichlet(i, j, k)) {
            line.diag[i] = 1.0;
            continue;
        }
        const GCoeffs c = coeffs_.at(i, j, k);
        if (i == 0) {
            // degenerate row: diffusion coefficient vanishes at r = 0,
            // convection one-sided into the domain
            const double w = c.g4 / dxr_;
            if (options_.r_boundary_order == 1) {
                line.diag[i] = 1.0 + theta_dt * w;
                line.upper[i] = -theta_dt * w;
            } else {
                line.diag[i] = 1.0 + theta_dt * 1.5 * w;
                line.upper[i] = -theta_dt * 2.0 * w;
                line.first_row_super2 = theta_dt * 0.5 * w;
            }
        } else if (i == n - 1) {
            throw std::logic_error("non-Dirichlet r_max row is unsupported");
        } else {
            const double w2 = c.g1 / (dxr_ * dxr_);
            const double w1 = c.g4 / (2.0 * dxr_);
            line.lower[i] = -theta_dt * (w2 - w1);
            line.diag[i] = 1.0 + theta_dt * 2.0 * w2;
            line.upper[i] = -theta_dt * (w2 + w1);
        }
    }
    return line;
}

TriDiagLine SpatialOperator::assemble_line_v(int i, int k, double theta_dt) const {
    const int n = v_.n;
    TriDiagLine line(n);
    if (n == 1) {
        line.diag[0] = 1.0;
        return line;
    }
    for (int j = 0; j < n; ++j) {
        if (is_dirichlet(i, j, k)) {
            line.diag[j] = 1.0;
            continue;
        }
        const GCoeffs c = coeffs_.at(i, j, k);
        if (j == 0) {
            line.diag[j] = 1.0 + theta_dt * c.g5 / dxv_;
            line.upper[j] = -theta_dt * c.g5 / dxv_;
        } else if (j == n - 1) {
            throw std::logic_error("non-Dirichlet v_max row is unsupported");
        } else {
            const double w2 = c.g2 / (dxv_ * dxv_);
            const double w1 = c.g5 / (2.0 * dxv_);
            line.lower[j] = -theta_dt * (w2 - w1);
            line.diag[j] = 1.0 + theta_dt * 2.0 * w2;
            line.upper[j] = -theta_dt * (w2 + w1);
        }
    }
    return line;
}

TriDiagLine SpatialOperator::assemble_line_y(int i, int j, double theta_dt) const {
    const int n = y_.n;
    TriDiagLine line(n);
    if (n == 1) {
        // collapsed direction still carries the reaction term
        if (is_dirichlet(i, j, 0)) {
            line.diag[0] = 1.0;
            return line;
        }
        const GCoeffs c = coeffs_.at(i, j, 0);
        line.diag[0] = 1.0 + theta_dt * c.reaction;
        return line;
    }
    for (int k = 0; k < n; ++k) {
        if (is_dirichlet(i, j, k)) {
            line.diag[k] = 1.0;
            continue;
        }
        const GCoeffs c = coeffs_.at(i, j, k);
        if (k == 0) {
            const double w = c.g6 / dxy_;
            if (options_.y_boundary_order == 1) {
                line.diag[k] = 1.0 + theta_dt * (w + c.reaction);
                line.upper[k] = -theta_dt * w;
            } else {
                line.diag[k] = 1.0 + theta_dt * (1.5 * w + c.reaction);
                line.upper[k] = -theta_dt * 2.0 * w;
                line.first_row_super2 = theta_dt * 0.5 * w;
            }
        } else if (k == n - 1) {
            throw std::logic_error("non-Dirichlet y_max row is unsupported");
        } else {
            const double w1 = c.g6 / (2.0 * dxy_);
            line.lower[k] = theta_dt * w1;
            line.diag[k] = 1.0 + theta_dt * c.reaction;
            line.upper[k] = -theta_dt * w1;
        }
    }
    return line;
}

void SpatialOperator::apply_operator(const Grid3& u, Grid3& out) const {
    const int nr = r_.n, nv = v_.n, ny = y_.n;
    const double inv_dxr2 = nr > 1 ? 1.0 / (dxr_ * dxr_) : 0.0;
    const double inv_2dxr = nr > 1 ? 0.5 / dxr_ : 0.0;
    const double inv_dxv2 = nv > 1 ? 1.0 / (dxv_ * dxv_) : 0.0;
    const double inv_2dxv = nv > 1 ? 0.5 / dxv_ : 0.0;
    const double inv_2dxy = ny > 1 ? 0.5 / dxy_ : 0.0;
    const double inv_cross = 0.25 / (dxr_ * dxv_);

    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nv; ++j)
            for (int k = 0; k < ny; ++k) {
                if (is_dirichlet(i, j, k)) {
                    out.at(i, j, k) = 0.0;
                    continue;
                }
                const GCoeffs c = coeffs_.at(i, j, k);
                const double u0 = u.at(i, j, k);
                double acc = -c.reaction * u0;

                if (nr > 1) {
                    if (i == 0) {
                        if (options_.r_boundary_order == 1)
                            acc += c.g4 * (u.at(1, j, k) - u0) / dxr_;
                        else
                            acc += c.g4 *
                                   (-u.at(2, j, k) + 4.0 * u.at(1, j, k) - 3.0 * u0) *
                                   inv_2dxr;
                    } else {
                        const double up = u.at(i + 1, j, k), dn = u.at(i - 1, j, k);
                        acc += c.g1 * (up - 2.0 * u0 + dn) * inv_dxr2 +
                               c.g4 * (up - dn) * inv_2dxr;
                    }
                }
                if (nv > 1) {
                    if (j == 0) {
                        acc += c.g5 * (u.at(i, 1, k) - u0) / dxv_;
                    } else {
                        const double up = u.at(i, j + 1, k), dn = u.at(i, j - 1, k);
                        acc += c.g2 * (up - 2.0 * u0 + dn) * inv_dxv2 +
                               c.g5 * (up - dn) * inv_2dxv;
                    }
                }
                if (ny > 1) {
                    if (k == 0) {
                        if (options_.y_boundary_order == 1)
                            acc += c.g6 * (u.at(i, j, 1) - u0) / dxy_;
                        else
                            acc += c.g6 *
                                   (-u.at(i, j, 2) + 4.0 * u.at(i, j, 1) - 3.0 * u0) *
                                   inv_2dxy;
                    } else {
                        acc += c.g6 * (u.at(i, j, k + 1) - u.at(i, j, k - 1)) * inv_2dxy;
                    }
                }
                if (i > 0 && i < nr - 1 && j > 0 && j < nv - 1) {
                    acc += c.g3 * inv_cross *
                           (u.at(i + 1, j + 1, k) - u.at(i + 1, j - 1, k) -
                            u.at(i - 1, j + 1, k) + u.at(i - 1, j - 1, k));
                }
                out.at(i, j, k) = acc;
            }
}

Grid3 SpatialOperator::apply_mixed(const Grid3& u, double t) const {
    coeffs_.prepare(t);
    Grid3 out(r_, v_, y_);
    out.time = t;
    const int nr = r_.n, nv = v_.n, ny = y_.n;
    if (nr < 3 || nv < 3) return out;
    const double inv_cross = 0.25 / (dxr_ * dxv_);
    for (int i = 1; i < nr - 1; ++i)
        for (int j = 1; j < nv - 1; ++j)
            for (int k = 0; k < ny; ++k) {
                if (is_dirichlet(i, j, k)) continue;
                out.at(i, j, k) = coeffs_.at(i, j, k).g3 * inv_cross *
                                  (u.at(i + 1, j + 1, k) - u.at(i + 1, j - 1, k) -
                                   u.at(i - 1, j + 1, k) + u.at(i - 1, j - 1, k));
            }
    return out;
}

}  // namespace hjmsv
