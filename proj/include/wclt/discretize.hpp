#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <memory>

#include "wclt/finite_chain.hpp"
#include "wclt/kernels.hpp"

namespace wclt {

// Uniform grid of cell centers on [lo, hi].
struct Grid1d {
    double lo, hi;
    std::size_t n;

    Grid1d(double lo_, double hi_, std::size_t n_) : lo(lo_), hi(hi_), n(n_) {
        if (!(hi > lo) || n < 2) throw ConfigError("grid needs hi > lo and n >= 2");
    }
    double width() const { return (hi - lo) / static_cast<double>(n); }
    double center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * width(); }
    double edge(std::size_t i) const { return lo + static_cast<double>(i) * width(); }
    // Piecewise-linear value of a grid function at x, constant outside.
    double interpolate(const Eigen::VectorXd& values, double x) const;
};

// Row-stochastic discretizations of the 1-d kernels on a uniform grid.
// Continuous noise distributes mass by CDF differences across cell edges;
// point-mass noise splits each atom linearly between the bracketing centers.
Eigen::MatrixXd discretize_bernoulli_ar1(const BernoulliAr1Params& p, const Grid1d& grid);
Eigen::MatrixXd discretize_nar(const NarParams& p, const Grid1d& grid);
Eigen::MatrixXd discretize_ula_1d(const UlaParams& p, const Grid1d& grid);

// Convenience: discretized chain with its stationary vector.
std::shared_ptr<const FiniteChain> discretized_chain(const Eigen::MatrixXd& P);

} // namespace wclt
