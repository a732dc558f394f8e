#include "wclt/simulate.hpp"

#include <cmath>

namespace wclt {

State step(const Kernel& kernel, const State& x, RngStream& rng) {
    if (x.dimension() != kernel.dimension()) {
        throw ConfigError("step: state dimension does not match kernel dimension");
    }
    std::vector<double> coords = x.coords;
    kernel.step(std::span<double>(coords), rng);
    return State(std::move(coords));
}

Trajectory simulate(const Kernel& kernel, const State& x0, std::size_t n, RngStream rng) {
    if (x0.dimension() != kernel.dimension()) {
        throw ConfigError("simulate: state dimension does not match kernel dimension");
    }
    Trajectory traj;
    traj.family = kernel.family();
    traj.seed = rng.seed();
    traj.stream = rng.stream();
    traj.states.reserve(n + 1);
    traj.states.push_back(x0);
    std::vector<double> coords = x0.coords;
    for (std::size_t k = 0; k < n; ++k) {
        kernel.step(std::span<double>(coords), rng);
        for (double v : coords) {
            if (!std::isfinite(v)) throw NumericError("simulate: chain diverged to non-finite state");
        }
        traj.states.push_back(State(coords));
    }
    return traj;
}

} // namespace wclt
