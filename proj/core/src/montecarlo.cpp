#include "hjmsv/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

namespace hjmsv {

std::uint64_t mix_seed(std::uint64_t root, std::uint64_t stream) {
    std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::pair<double, double> correlated_normals(std::mt19937_64& rng,
                                             std::normal_distribution<double>& normal,
                                             double rho) {
    const double dw = normal(rng);
    const double dz = rho * dw + std::sqrt(1.0 - rho * rho) * normal(rng);
    return {dw, dz};
}

namespace {

constexpr long kBatch = 8192;

struct Accumulator {
    double sum = 0.0, sum_sq = 0.0;
    long n = 0;
};

// One path of (x, y, v, int r dt) to the horizon; returns the discounted
// payoff sample produced by `payout` from the terminal state.
template <typename Payout>
double run_path(std::mt19937_64& rng, std::normal_distribution<double>& normal,
                double horizon, int n_steps, const InitialCurve& curve,
                const ModelParams& params, bool full_truncation,
                const std::function<void(double, double, double, double)>& observer,
                const Payout& payout) {
    const double dt = horizon / n_steps;
    const double sqrt_dt = std::sqrt(dt);
    const double kappa = params.kappa, theta = params.theta, rho = params.rho;
    const double decay_y = std::exp(-2.0 * kappa * dt);
    const double decay_h = std::exp(-kappa * dt);

    double x = 0.0, y = 0.0, v = 1.0;
    double integral_r = 0.0;
    double r = curve.forward(0.0);

    for (int s = 0; s < n_steps; ++s) {
        const double t = s * dt;
        const double lambda = params.lambda_fn(t);
        const double gamma = params.gamma_fn(t);
        const double eps = params.eps_fn(t);

        const double v_pos = full_truncation ? std::max(v, 0.0) : std::abs(v);
        const double r_pos = std::max(r, 0.0);
        const double eta = std::sqrt(v_pos) * lambda *
                           (r_pos > 0.0 ? std::pow(r_pos, gamma) : 0.0);

        const auto [dw, dz] = correlated_normals(rng, normal, rho);

        x += (-kappa * x + y) * dt + eta * sqrt_dt * dw;
        y = y * decay_y + eta * eta * dt * decay_h;
        v += theta * (1.0 - v_pos) * dt + eps * std::sqrt(v_pos) * sqrt_dt * dz;

        const double r_next = x + curve.forward(t + dt);
        integral_r += 0.5 * (r + r_next) * dt;
        r = r_next;
        if (observer) observer(t + dt, x, y, v);
    }
    return payout(x, y, v) * std::exp(-integral_r);
}

template <typename Payout>
McEstimate simulate(double horizon, const InitialCurve& curve,
                    const ModelParams& params, const McConfig& config,
                    const Payout& payout) {
    params.validate();
    if (config.n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
    if (config.steps_per_year < 1)
        throw std::invalid_argument("mc steps_per_year must be >= 1");
    if (horizon < 0.0) throw std::invalid_argument("horizon must be nonnegative");

    if (horizon == 0.0) return {payout(0.0, 0.0, 1.0), 0.0, config.n_paths};

    const int n_steps =
        std::max(1, static_cast<int>(std::lround(config.steps_per_year * horizon)));
    const long n_batches = (config.n_paths + kBatch - 1) / kBatch;
    std::vector<Accumulator> partial(n_batches);

    auto run_batch = [&](long b) {
        std::mt19937_64 rng(mix_seed(config.seed, static_cast<std::uint64_t>(b)));
        std::normal_distribution<double> normal;
        const long lo = b * kBatch;
        const long hi = std::min<long>(lo + kBatch, config.n_paths);
        Accumulator acc;
        for (long p = lo; p < hi; ++p) {
            double sample = run_path(rng, normal, horizon, n_steps, curve, params,
                                     config.full_truncation, config.observer, payout);
            acc.sum += sample;
            acc.sum_sq += sample * sample;
            ++acc.n;
        }
        partial[b] = acc;
    };

    int threads = config.threads;
    if (threads <= 0) threads = std::max(1u, std::thread::hardware_concurrency());
    if (threads == 1 || n_batches == 1 || config.observer) {
        for (long b = 0; b < n_batches; ++b) run_batch(b);
    } else {
        std::atomic<long> next{0};
        auto worker = [&]() {
            for (long b = next.fetch_add(1); b < n_batches; b = next.fetch_add(1))
                run_batch(b);
        };
        std::vector<std::thread> pool;
        int n_workers = std::min<long>(threads, n_batches);
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // merge in batch order: worker-count independent
    double sum = 0.0, sum_sq = 0.0;
    long n = 0;
    for (const Accumulator& acc : partial) {
        sum += acc.sum;
        sum_sq += acc.sum_sq;
        n += acc.n;
    }
    const double mean = sum / n;
    double variance = n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)) : 0.0;
    return {mean, std::sqrt(variance / n), n};
}

}  // namespace

McEstimate simulate_caplet(const CapletSpec& spec, const InitialCurve& curve,
                           const ModelParams& params, const McConfig& config) {
    spec.validate();
    const double delta_m = spec.accrual_factor();
    auto payout = [&](double x, double y, double) {
        double p = zcb_closed_form(spec.expiry, spec.payment, x, y, curve, params.kappa);
        double value = 1.0 - delta_m * p;
        return value > 0.0 ? value : 0.0;
    };
    return simulate(spec.expiry, curve, params, config, payout);
}

McEstimate simulate_zcb(double maturity, const InitialCurve& curve,
                        const ModelParams& params, const McConfig& config) {
    auto payout = [](double, double, double) { return 1.0; };
    return simulate(maturity, curve, params, config, payout);
}

}  // namespace hjmsv
