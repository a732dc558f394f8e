#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <memory>

#include "wclt/errors.hpp"

namespace wclt {

// Solves pi P = pi, sum(pi) = 1 for a row-stochastic P with a single
// recurrent class. Dense LU for n <= 1000, power iteration above. Throws
// ConfigError("non-unique invariant distribution") when the chain has more
// than one recurrent class.
Eigen::VectorXd finite_stationary(const Eigen::MatrixXd& P);

// Inverse-CDF sample from one row of P: smallest j with u < sum_{k<=j} P(i,k).
int finite_row_sample(const Eigen::MatrixXd& P, int row, double u);

// Exact finite-state chain: row-stochastic matrix plus its invariant vector,
// immutable after construction and safe to share across threads.
class FiniteChain {
  public:
    // Validates rows (sum 1 within 1e-12, entries >= 0) and pi P = pi within
    // 1e-10.
    FiniteChain(Eigen::MatrixXd P, Eigen::VectorXd pi);

    // Computes pi with finite_stationary.
    static std::shared_ptr<const FiniteChain> from_matrix(Eigen::MatrixXd P);

    std::size_t n_states() const { return static_cast<std::size_t>(P_.rows()); }
    const Eigen::MatrixXd& P() const { return P_; }
    const Eigen::VectorXd& pi() const { return pi_; }

    // Qg = P g.
    Eigen::VectorXd apply(const Eigen::VectorXd& g) const;

    double pi_mean(const Eigen::VectorXd& g) const { return pi_.dot(g); }
    // L2(pi) norm.
    double pi_norm(const Eigen::VectorXd& g) const;

  private:
    Eigen::MatrixXd P_;
    Eigen::VectorXd pi_;
};

} // namespace wclt
