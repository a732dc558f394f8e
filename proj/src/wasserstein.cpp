#include "wclt/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wclt {

double w1_empirical_1d(std::vector<double> xs, std::vector<double> ys) {
    if (xs.empty() || xs.size() != ys.size()) {
        throw ConfigError("w1_empirical_1d requires equal non-empty sample sizes");
    }
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double term = std::fabs(xs[i] - ys[i]) - comp;
        const double next = sum + term;
        comp = (next - sum) - term;
        sum = next;
    }
    return sum / static_cast<double>(xs.size());
}

CoupledTrajectoryStats coupled_run(const Kernel& kernel, const State& x, const State& y,
                                   std::size_t n, RngStream rng, const Metric& psi) {
    if (x.dimension() != kernel.dimension() || y.dimension() != kernel.dimension()) {
        throw ConfigError("coupled_run: state dimension does not match kernel dimension");
    }
    CoupledTrajectoryStats stats{{}, x, y};
    stats.distances.reserve(n + 1);
    std::vector<double> xs = x.coords, ys = y.coords;
    stats.distances.push_back(psi(xs, ys));
    for (std::size_t k = 0; k < n; ++k) {
        kernel.coupled_step(std::span<double>(xs), std::span<double>(ys), rng);
        stats.distances.push_back(psi(xs, ys));
    }
    return stats;
}

std::vector<double> coupled_mean_distances(const Kernel& kernel, const State& x, const State& y,
                                           std::size_t n, std::size_t replicates,
                                           std::uint64_t seed, std::uint64_t stream0, int threads,
                                           Exec exec, const Metric& psi,
                                           std::vector<double>* ratio_variance) {
    if (replicates == 0) throw ConfigError("coupled_mean_distances needs replicates >= 1");
    std::vector<std::vector<double>> per_rep(replicates);
    parallel_for(replicates, threads, exec, [&](std::size_t r) {
        RngStream rng(seed, stream0 + r);
        per_rep[r] = coupled_run(kernel, x, y, n, rng, psi).distances;
    });
    // Deterministic merge in replicate order.
    std::vector<double> mean(n + 1, 0.0);
    for (std::size_t r = 0; r < replicates; ++r) {
        for (std::size_t k = 0; k <= n; ++k) mean[k] += per_rep[r][k];
    }
    for (double& v : mean) v /= static_cast<double>(replicates);
    if (ratio_variance != nullptr) {
        // Sample variance across replicates of the per-step ratio d_{k+1}/d_k.
        ratio_variance->assign(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            double m = 0.0;
            std::size_t count = 0;
            for (std::size_t r = 0; r < replicates; ++r) {
                if (per_rep[r][k] > 0.0) {
                    m += per_rep[r][k + 1] / per_rep[r][k];
                    ++count;
                }
            }
            if (count < 2) {
                (*ratio_variance)[k] = 0.0;
                continue;
            }
            m /= static_cast<double>(count);
            double v = 0.0;
            for (std::size_t r = 0; r < replicates; ++r) {
                if (per_rep[r][k] > 0.0) {
                    const double d = per_rep[r][k + 1] / per_rep[r][k] - m;
                    v += d * d;
                }
            }
            (*ratio_variance)[k] = v / static_cast<double>(count - 1);
        }
    }
    return mean;
}

ContractionEstimate estimate_contraction(const Kernel& kernel,
                                         const std::vector<std::pair<State, State>>& pairs,
                                         const ContractionOptions& opts) {
    if (pairs.empty()) throw ConfigError("estimate_contraction needs at least one start pair");
    if (opts.steps < 1) throw ConfigError("estimate_contraction needs steps >= 1");
    for (const auto& [x, y] : pairs) {
        if (x.coords == y.coords) {
            throw ConfigError("estimate_contraction: start pair members must be distinct");
        }
    }

    ContractionEstimate est;
    est.deterministic = true;
    std::uint64_t stream = opts.stream0;
    for (const auto& [x, y] : pairs) {
        std::vector<double> ratio_var;
        const std::vector<double> mean =
            coupled_mean_distances(kernel, x, y, opts.steps, opts.replicates, opts.seed, stream,
                                   opts.threads, opts.exec, opts.psi, &ratio_var);
        stream += opts.replicates;

        // Ratio window ends at coalescence (exact zero mean distance).
        std::vector<double> ratios;
        for (std::size_t k = 0; k < opts.steps; ++k) {
            if (mean[k] == 0.0 || mean[k + 1] == 0.0) {
                est.truncated = true;
                break;
            }
            ratios.push_back(mean[k + 1] / mean[k]);
            if (ratio_var[k] >= 1e-14) est.deterministic = false;
        }
        double rate = std::numeric_limits<double>::quiet_NaN();
        if (!ratios.empty()) {
            double log_sum = 0.0;
            for (double r : ratios) log_sum += std::log(r);
            rate = std::exp(log_sum / static_cast<double>(ratios.size()));
        }
        est.pair_rates.push_back(rate);
        est.step_ratios.push_back(std::move(ratios));
    }

    est.gamma_hat = 0.0;
    for (double r : est.pair_rates) {
        if (std::isfinite(r)) est.gamma_hat = std::max(est.gamma_hat, r);
    }
    return est;
}

std::vector<std::pair<State, State>> default_pair_lattice(double lo, double hi) {
    // 5x5 lattice of (x, y) with x != y, thinned to 25 distinct pairs.
    std::vector<double> pts;
    for (int i = 0; i < 5; ++i) pts.push_back(lo + (hi - lo) * i / 4.0);
    std::vector<std::pair<State, State>> pairs;
    for (double x : pts) {
        for (double y : pts) {
            if (x == y) continue;
            pairs.emplace_back(State::scalar(x), State::scalar(y));
            if (pairs.size() == 25) return pairs;
        }
    }
    return pairs;
}

} // namespace wclt
