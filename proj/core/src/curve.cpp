#include "hjmsv/curve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hjmsv {

InitialCurve InitialCurve::flat(double base) {
    if (base <= 1.0)
        throw std::invalid_argument("flat curve base must exceed 1");
    InitialCurve c;
    c.flat_ = true;
    c.flat_forward_ = std::log(base);
    c.t_max_ = 1e9;
    c.extrap_rate_ = c.flat_forward_;
    return c;
}

InitialCurve InitialCurve::from_nodes(std::vector<std::pair<double, double>> nodes) {
    std::sort(nodes.begin(), nodes.end());
    if (nodes.empty())
        throw std::invalid_argument("curve needs at least one quote");
    if (nodes.front().first > 0.0)
        nodes.insert(nodes.begin(), {0.0, 1.0});
    if (std::abs(nodes.front().second - 1.0) > 1e-12)
        throw std::invalid_argument("curve must have p(0,0) = 1");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].second <= 0.0 || nodes[i].second > 1.0)
            throw std::invalid_argument("discounts must lie in (0,1]");
        if (i > 0) {
            if (nodes[i].first <= nodes[i - 1].first)
                throw std::invalid_argument("maturities must be strictly increasing");
            if (nodes[i].second >= nodes[i - 1].second)
                throw std::invalid_argument("discounts must be strictly decreasing");
        }
    }
    if (nodes.size() < 2)
        throw std::invalid_argument("spline curve needs a positive-maturity quote");

    InitialCurve c;
    c.flat_ = false;
    c.nodes_ = std::move(nodes);
    c.fit_spline();
    return c;
}

InitialCurve InitialCurve::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open curve file: " + path);
    std::vector<std::pair<double, double>> nodes;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double t, p;
        if (ls >> t >> p) nodes.emplace_back(t, p);
    }
    if (nodes.empty())
        throw std::runtime_error("curve file holds no quotes: " + path);
    return from_nodes(std::move(nodes));
}

void InitialCurve::fit_spline() {
    const int n = static_cast<int>(nodes_.size());
    knots_.resize(n);
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) {
        knots_[i] = nodes_[i].first;
        g[i] = std::log(nodes_[i].second);
    }

    // Natural cubic spline: solve for second-derivative moments m_i with
    // m_0 = m_{n-1} = 0 via the standard tridiagonal system.
    std::vector<double> h(n - 1);
    for (int i = 0; i + 1 < n; ++i) h[i] = knots_[i + 1] - knots_[i];

    std::vector<double> m(n, 0.0);
    if (n > 2) {
        std::vector<double> diag(n - 2), rhs(n - 2), sub(n - 2), sup(n - 2);
        for (int i = 1; i + 1 < n; ++i) {
            diag[i - 1] = 2.0 * (h[i - 1] + h[i]);
            sub[i - 1] = h[i - 1];
            sup[i - 1] = h[i];
            rhs[i - 1] = 6.0 * ((g[i + 1] - g[i]) / h[i] - (g[i] - g[i - 1]) / h[i - 1]);
        }
        for (int i = 1; i < n - 2; ++i) {
            double w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        for (int i = n - 3; i >= 0; --i) {
            double upper = (i + 1 < n - 2) ? sup[i] * m[i + 2] : 0.0;
            m[i + 1] = (rhs[i] - upper) / diag[i];
        }
    }

    a_.resize(n - 1);
    b_.resize(n - 1);
    c_.resize(n - 1);
    d_.resize(n - 1);
    for (int i = 0; i + 1 < n; ++i) {
        a_[i] = g[i];
        c_[i] = m[i] / 2.0;
        d_[i] = (m[i + 1] - m[i]) / (6.0 * h[i]);
        b_[i] = (g[i + 1] - g[i]) / h[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0;
    }

    t_max_ = knots_.back();
    log_p_max_ = g.back();
    // forward at the last knot, taken from the last polynomial piece
    double dt = h[n - 2];
    extrap_rate_ = -(b_[n - 2] + 2.0 * c_[n - 2] * dt + 3.0 * d_[n - 2] * dt * dt);

    // The drift coefficient needs f(0,t) >= 0 everywhere it is sampled.
    const int probes = 16;
    for (int i = 0; i + 1 < n; ++i)
        for (int q = 0; q <= probes; ++q)
            if (forward(knots_[i] + h[i] * q / probes) < 0.0)
                throw std::invalid_argument("curve implies a negative forward rate");
    if (extrap_rate_ < 0.0)
        throw std::invalid_argument("curve implies a negative extrapolation forward");
}

int InitialCurve::find_interval(double t) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    int i = static_cast<int>(it - knots_.begin()) - 1;
    return std::clamp(i, 0, static_cast<int>(knots_.size()) - 2);
}

double InitialCurve::discount(double maturity) const {
    if (maturity < 0.0)
        throw std::domain_error("discount: negative maturity");
    if (flat_) return std::exp(-flat_forward_ * maturity);
    if (maturity >= t_max_)
        return std::exp(log_p_max_ - extrap_rate_ * (maturity - t_max_));
    int i = find_interval(maturity);
    double dt = maturity - knots_[i];
    return std::exp(a_[i] + dt * (b_[i] + dt * (c_[i] + dt * d_[i])));
}

double InitialCurve::forward(double t) const {
    if (flat_) return flat_forward_;
    if (t >= t_max_) return extrap_rate_;
    int i = find_interval(t);
    double dt = t - knots_[i];
    return -(b_[i] + dt * (2.0 * c_[i] + dt * 3.0 * d_[i]));
}

double InitialCurve::forward_slope(double t) const {
    if (flat_) return 0.0;
    if (t >= t_max_) return 0.0;
    int i = find_interval(t);
    double dt = t - knots_[i];
    return -(2.0 * c_[i] + 6.0 * d_[i] * dt);
}

}  // namespace hjmsv
