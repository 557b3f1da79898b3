#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <utility>

#include "hjmsv/model.hpp"

namespace hjmsv {

/// Monte Carlo settings. Paths are simulated in fixed-size batches whose
/// seeds derive from the root seed, so estimates do not depend on the worker
/// count.
struct McConfig {
    long n_paths = 200000;
    int steps_per_year = 96;
    std::uint64_t seed = 20070423;
    bool full_truncation = true;  ///< clip v at 0 inside drift and diffusion
    int threads = 1;              ///< 0 = hardware concurrency

    /// optional per-step hook (t, x, y, v), serial runs only (tests)
    std::function<void(double, double, double, double)> observer;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long n_paths = 0;
};

/// splitmix64 step; also used to derive per-batch seeds from the root seed.
std::uint64_t mix_seed(std::uint64_t root, std::uint64_t stream);

/// Draws the pair of Wiener increments per step: dw drives the rate, the
/// variance shock is dz = rho dw + sqrt(1-rho^2) dw_perp.
std::pair<double, double> correlated_normals(std::mt19937_64& rng,
                                             std::normal_distribution<double>& normal,
                                             double rho);

/// Simulates the state SDEs path by path and averages the discounted caplet
/// payoff max(1 - delta_m p(T,T_M), 0) e^{-int r dt}, with p(T,T_M) taken
/// from the closed form at the terminal state. The deviation x = r - f(0,t)
/// follows an Euler step, the locally linear y equation an exact
/// integrating-factor step, and the variance a (full-truncation) Euler step.
McEstimate simulate_caplet(const CapletSpec& spec, const InitialCurve& curve,
                           const ModelParams& params, const McConfig& config);

/// Averages e^{-int_0^T r dt}; converges to the input discount p(0,T).
McEstimate simulate_zcb(double maturity, const InitialCurve& curve,
                        const ModelParams& params, const McConfig& config);

}  // namespace hjmsv
