#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "wclt/finite_chain.hpp"
#include "wclt/simulate.hpp"

namespace wclt {

// Function in L0^2(pi): construction removes the pi-mean and records it.
class CenteredFunction {
  public:
    CenteredFunction(const FiniteChain& chain, Eigen::VectorXd raw);

    const Eigen::VectorXd& values() const { return g_; }
    double original_mean() const { return original_mean_; }

  private:
    Eigen::VectorXd g_;
    double original_mean_;
};

// V_n g = sum_{k=0}^{n-1} Q^k g, exact iterated application.
Eigen::VectorXd v_n(const FiniteChain& chain, const CenteredFunction& g, std::size_t n);

// Partial sums of n^{-3/2} ||V_n g||_pi for n = 1..n_max, plus the final
// increment as a Cauchy-tail diagnostic (small increments indicate the series
// is summable, a non-vanishing n^{-1/2}-scale increment indicates divergence).
struct MwConditionReport {
    std::vector<double> cumulative; // cumulative[n-1] = sum_{m<=n} m^{-3/2} ||V_m g||
    double last_increment = 0.0;
    bool summable_evidence = false; // last_increment < 1e-3
};

MwConditionReport mw_condition_sum(const FiniteChain& chain, const CenteredFunction& g,
                                   std::size_t n_max);

// Solves ((1+eps) I - P) h = g. Always well posed for eps > 0; residual is
// checked against 1e-10.
Eigen::VectorXd resolvent_solve(const FiniteChain& chain, const CenteredFunction& g, double eps);

struct PoissonSolution {
    Eigen::VectorXd h;        // pi-mean pinned to 0
    double residual = 0.0;    // ||h - Qh - g||_inf
    bool series_checked = false; // truncated power series converged and was compared
    double series_gap = 0.0;     // ||sum_{n<=N} Q^n g - h||_inf when checked
    bool least_squares_fallback = false;
};

// Solves h - Qh = g on the complement of constants. Direct solve of the
// rank-one-corrected system (I - P + 1 pi') h = g; least-squares fallback is
// flagged. Cross-checked against the truncated power series when the spectral
// gap makes it converge.
PoissonSolution poisson_solve(const FiniteChain& chain, const CenteredFunction& g);

struct MaDecomposition {
    std::vector<double> increments; // m_k = h(X_k) - Qh(X_{k-1}), k = 1..n
    std::vector<double> remainders; // R_n = Qh(X_0) - Qh(X_n), n = 1..n
};

// Martingale decomposition S_n(g) = M_n + R_n along a simulated trajectory of
// the finite chain (states carried as indices).
MaDecomposition ma_decompose(const FiniteChain& chain, const CenteredFunction& g,
                             const Trajectory& traj);

// sigma^2(g) = E_pi[h^2] - E_pi[(Qh)^2] via the Poisson solution. Values in
// [-1e-12, 0) are clamped to 0; anything lower throws NumericError.
double asymptotic_variance(const FiniteChain& chain, const CenteredFunction& g);

// E_pi[g^2], the variance expression appearing in the compact-state-space CLT
// statement. It equals asymptotic_variance only for chains whose increments
// are uncorrelated (e.g. iid rows); both are exposed so the two can be
// compared.
double stationary_second_moment(const FiniteChain& chain, const CenteredFunction& g);

} // namespace wclt
