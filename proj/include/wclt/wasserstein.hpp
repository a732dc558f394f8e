#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "wclt/kernels.hpp"
#include "wclt/parallel.hpp"
#include "wclt/rng.hpp"
#include "wclt/state.hpp"

namespace wclt {

// Exact L1-Wasserstein distance between two empirical measures on the real
// line via the order-statistics coupling: (1/m) sum |x_(i) - y_(i)|.
// Requires equal sample sizes.
double w1_empirical_1d(std::vector<double> xs, std::vector<double> ys);

// Per-step distances psi(X_n, Y_n) of one synchronously coupled run.
struct CoupledTrajectoryStats {
    std::vector<double> distances; // length n + 1; distances[0] = psi(x, y)
    State x0, y0;
};

CoupledTrajectoryStats coupled_run(const Kernel& kernel, const State& x, const State& y,
                                   std::size_t n, RngStream rng,
                                   const Metric& psi = Metric::euclidean());

// Mean coupled distance per step, averaged over `replicates` runs with
// consecutive stream ids. Parallel kernel with a serial reference; results
// are merged by replicate index so both policies agree bit for bit.
std::vector<double> coupled_mean_distances(const Kernel& kernel, const State& x, const State& y,
                                           std::size_t n, std::size_t replicates,
                                           std::uint64_t seed, std::uint64_t stream0, int threads,
                                           Exec exec, const Metric& psi = Metric::euclidean(),
                                           std::vector<double>* ratio_variance = nullptr);

struct ContractionEstimate {
    double gamma_hat = 0.0;          // max over start pairs of per-pair rates
    bool deterministic = false;      // replicate variance of ratios < 1e-14
    bool truncated = false;          // some pair coalesced before step n
    std::vector<double> pair_rates;  // geometric-mean contraction per pair
    std::vector<std::vector<double>> step_ratios; // per pair, mean-distance ratios
};

struct ContractionOptions {
    std::size_t steps = 8;
    std::size_t replicates = 100;
    std::uint64_t seed = 1;
    std::uint64_t stream0 = 0;
    int threads = 0;
    Exec exec = Exec::openmp;
    Metric psi = Metric::euclidean();
};

// Grid estimate of the one-step contraction rate: mean coupled distances per
// pair, geometric-mean ratio over the window, max over pairs.
ContractionEstimate estimate_contraction(const Kernel& kernel,
                                         const std::vector<std::pair<State, State>>& pairs,
                                         const ContractionOptions& opts);

// 25 start pairs on a lattice over [lo, hi] (d = 1), diagonal excluded.
std::vector<std::pair<State, State>> default_pair_lattice(double lo, double hi);

} // namespace wclt
