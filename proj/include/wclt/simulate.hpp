#pragma once

#include <cstdint>
#include <vector>

#include "wclt/kernels.hpp"
#include "wclt/rng.hpp"
#include "wclt/state.hpp"

namespace wclt {

struct Trajectory {
    std::vector<State> states; // length n + 1; states[0] is the start
    Family family;
    std::uint64_t seed;
    std::uint64_t stream;
};

// One transition of the kernel. Errors on dimension mismatch.
State step(const Kernel& kernel, const State& x, RngStream& rng);

// n steps from x0; trajectory of length n + 1, deterministic given
// (kernel, x0, rng identifiers). Throws NumericError if the chain leaves the
// finite range (divergent configurations are probed via the condition
// checker, not here).
Trajectory simulate(const Kernel& kernel, const State& x0, std::size_t n, RngStream rng);

} // namespace wclt
