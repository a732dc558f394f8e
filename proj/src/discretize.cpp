#include "wclt/discretize.hpp"

#include <algorithm>
#include <cmath>

#include "wclt/rng.hpp"

namespace wclt {

double Grid1d::interpolate(const Eigen::VectorXd& values, double x) const {
    if (values.size() != static_cast<Eigen::Index>(n)) {
        throw ConfigError("grid interpolation: value length mismatch");
    }
    const double w = width();
    const double t = (x - center(0)) / w;
    if (t <= 0.0) return values(0);
    const double last = static_cast<double>(n - 1);
    if (t >= last) return values(static_cast<Eigen::Index>(n - 1));
    const std::size_t j = static_cast<std::size_t>(t);
    const double frac = t - static_cast<double>(j);
    return values(static_cast<Eigen::Index>(j)) * (1.0 - frac) +
           values(static_cast<Eigen::Index>(j + 1)) * frac;
}

namespace {

// Add mass at point x to the row, split linearly between bracketing centers.
void deposit_atom(Eigen::MatrixXd& P, std::size_t row, const Grid1d& grid, double x, double mass) {
    const double t = (x - grid.center(0)) / grid.width();
    if (t <= 0.0) {
        P(row, 0) += mass;
        return;
    }
    const double last = static_cast<double>(grid.n - 1);
    if (t >= last) {
        P(row, static_cast<Eigen::Index>(grid.n - 1)) += mass;
        return;
    }
    const std::size_t j = static_cast<std::size_t>(t);
    const double frac = t - static_cast<double>(j);
    P(row, static_cast<Eigen::Index>(j)) += mass * (1.0 - frac);
    P(row, static_cast<Eigen::Index>(j + 1)) += mass * frac;
}

// Fill one row from drift m plus continuous noise with CDF F((x - m)/scale):
// cell j receives F at its right edge minus F at its left edge, boundary cells
// absorb the tails.
template <class Cdf>
void deposit_cdf(Eigen::MatrixXd& P, std::size_t row, const Grid1d& grid, double m, Cdf cdf) {
    double prev = 0.0;
    for (std::size_t j = 0; j < grid.n; ++j) {
        const double right = j + 1 == grid.n ? 1.0 : cdf(grid.edge(j + 1) - m);
        P(row, static_cast<Eigen::Index>(j)) = right - prev;
        prev = right;
    }
}

void normalize_rows(Eigen::MatrixXd& P) {
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
        double s = P.row(i).sum();
        P.row(i) /= s;
    }
}

} // namespace

Eigen::MatrixXd discretize_bernoulli_ar1(const BernoulliAr1Params& p, const Grid1d& grid) {
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(grid.n, grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double x = grid.center(i);
        deposit_atom(P, i, grid, p.a * x, 0.5);
        deposit_atom(P, i, grid, p.a * x + (1.0 - p.a), 0.5);
    }
    normalize_rows(P);
    return P;
}

Eigen::MatrixXd discretize_nar(const NarParams& p, const Grid1d& grid) {
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(grid.n, grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double m = nar_drift(p, grid.center(i));
        switch (p.noise.kind()) {
            case NoiseSpec::Kind::gaussian:
                deposit_cdf(P, i, grid, m,
                            [&](double d) { return normal_cdf(d / p.noise.scale()); });
                break;
            case NoiseSpec::Kind::symmetric_uniform:
                deposit_cdf(P, i, grid, m, [&](double d) {
                    const double w = p.noise.scale();
                    return std::clamp((d + w) / (2.0 * w), 0.0, 1.0);
                });
                break;
            case NoiseSpec::Kind::bernoulli_pair:
                deposit_atom(P, i, grid, m - p.noise.scale(), 0.5);
                deposit_atom(P, i, grid, m + p.noise.scale(), 0.5);
                break;
        }
    }
    normalize_rows(P);
    return P;
}

Eigen::MatrixXd discretize_ula_1d(const UlaParams& p, const Grid1d& grid) {
    if (p.dimension() != 1) throw ConfigError("discretize_ula_1d needs a 1-d target");
    const double sd = std::sqrt(2.0 * p.h);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(grid.n, grid.n);
    Eigen::VectorXd x(1);
    for (std::size_t i = 0; i < grid.n; ++i) {
        x(0) = grid.center(i);
        const double m = x(0) - p.h * ula_gradient(p, x)(0);
        deposit_cdf(P, i, grid, m, [&](double d) { return normal_cdf(d / sd); });
    }
    normalize_rows(P);
    return P;
}

std::shared_ptr<const FiniteChain> discretized_chain(const Eigen::MatrixXd& P) {
    return FiniteChain::from_matrix(P);
}

} // namespace wclt
