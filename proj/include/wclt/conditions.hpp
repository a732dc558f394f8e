#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "wclt/kernels.hpp"
#include "wclt/parallel.hpp"
#include "wclt/state.hpp"

namespace wclt {

// ---------------------------------------------------------------------------
// Condition H of the nonlinear AR family.
// ---------------------------------------------------------------------------

// zeta(x,y) = |a(x-y) + (1-a)(s(x)-s(y))| / |x-y|, x != y.
double nar_zeta(const NarParams& p, double x, double y);
// kappa(x,y) = ([ax+(1-a)s(x)]^2 + [ay+(1-a)s(y)]^2 + 2 sigma^2 + 1) / (x^2+y^2+1).
double nar_kappa(const NarParams& p, double x, double y);

struct HWitness {
    enum class Kind { pair_quotient, derivative_point };
    Kind kind;
    double x = 0.0, y = 0.0; // pair witness: slope (s(x)-s(y))/(x-y)
    double value = 0.0;      // the certified quantity (slope or derivative)
    double threshold = 0.0;  // the inequality it certifies (value >= threshold
                             // or value <= threshold for negative thresholds)
};

struct HReport {
    bool holds = false;      // a witness was found (grid-true implies H true)
    bool inconclusive = false; // grid-false: the sup conditions may still hold
    std::optional<HWitness> witness;
    std::size_t grid_size = 0;
};

// Witness search over grid points: a pair slope >= 1 or <= -(1+a)/(1-a)
// certifies one of the sup conditions; where s has an analytic derivative,
// s'(x0) >= 1 at a grid point certifies H as well. Absence of a witness is
// inconclusive, never a refutation.
HReport check_H(const SSpec& s, double a, const std::vector<double>& grid_points);

// Default probe grid for the nonlinear AR conditions: a uniform lattice on
// [-10, 10] plus the first few multiples of pi, where sine-type slopes peak.
std::vector<double> default_nar_point_grid();
std::vector<std::pair<double, double>> default_nar_pair_grid();

// ---------------------------------------------------------------------------
// Condition C1 (and grid evidence for C2/C4).
// ---------------------------------------------------------------------------

struct C1Report {
    bool holds = false;     // best grid sup < 1 (grid evidence only)
    double best_r = 0.0;    // r achieving the smallest grid sup
    double best_sup = 0.0;
    std::vector<double> r_grid;
    std::vector<double> sup_per_r;
    double zeta_sup = 0.0;  // grid sup of zeta alone (C2 evidence)
    bool grid_evidence_only = true;
};

// Grid sup of zeta^r kappa^(1-r) per r; reports the smallest sup and its r.
// The pair grid should exclude the diagonal and include large-|x| tail pairs.
C1Report check_C1(const NarParams& p, const std::vector<double>& r_grid,
                  const std::vector<std::pair<double, double>>& pair_grid, int threads = 0,
                  Exec exec = Exec::openmp);

std::vector<double> default_r_grid(); // {0.05, 0.10, ..., 0.95}

// ---------------------------------------------------------------------------
// ULA contraction constants (gradient Lipschitz / strong convexity).
// ---------------------------------------------------------------------------

struct UlaContractionCert {
    double L = 0.0;     // Lipschitz constant of grad U
    double M = 0.0;     // strong-convexity constant
    double h_max = 0.0; // 2 M / L^2

    // gamma(h) = sqrt(1 + h^2 L^2 - 2 h M); < 1 iff 0 < h < h_max.
    double gamma(double h) const;
};

// Quadratic target: L = lambda_max(A), M = lambda_min(A). Logistic target:
// L = lambda_max(G)/2 + lambda_max(X'X)/4, M = lambda_min(G)/2.
UlaContractionCert ula_constants(const UlaParams& p);

// Extreme eigenvalues of a symmetric matrix: dense solve for p <= 64, shifted
// power iteration (tolerance 1e-10, at most 1e4 iterations) above.
std::pair<double, double> extreme_eigenvalues_sym(const Eigen::MatrixXd& M);

// ---------------------------------------------------------------------------
// Moment evidence: A2 (Lambda in L^2(pi)) and pi in P^2_psi.
// ---------------------------------------------------------------------------

class LambdaSpec {
  public:
    enum class Kind { gc_distance, nar_drift, bounded_one };

    // Lambda(x) = W_psi(delta_x, pi) = E_pi psi(x, Y), estimated against a
    // stored sample from pi.
    static LambdaSpec gc_distance(std::vector<State> pi_sample, Metric psi);
    // Lambda(x) = ((a x + (1-a) s(x))^2 + sigma^2 + x^2 + 1) / (1 - rho_r).
    static LambdaSpec nar_drift(NarParams p, double rho_r);
    static LambdaSpec bounded_one(double constant = 1.0);

    Kind kind() const { return kind_; }
    double operator()(const State& x) const;

  private:
    LambdaSpec() = default;
    Kind kind_ = Kind::bounded_one;
    double constant_ = 1.0;
    std::optional<NarParams> nar_;
    double rho_r_ = 0.0;
    std::vector<State> pi_sample_;
    std::optional<Metric> psi_;
};

struct MomentReport {
    double estimate = 0.0;
    double std_error = 0.0;
    std::vector<double> prefix_estimates; // running estimate at doubling prefixes
    bool evidence_finite = false;
    bool diverged = false; // chain left the finite range
    std::size_t samples_used = 0;
};

// Ergodic-average estimate of E_pi f(X)^2 over a post-burn-in trajectory with
// a prefix-stability verdict: relative change over the last factor of two of
// samples below 5% reads as evidence-finite.
MomentReport moment_evidence(const Kernel& kernel, const std::function<double(const State&)>& f,
                             const State& x0, std::size_t burn_in, std::size_t samples,
                             RngStream rng);

MomentReport check_A2(const LambdaSpec& lambda, const Kernel& kernel, const State& x0,
                      std::size_t burn_in, std::size_t samples, RngStream rng);

MomentReport check_P2(const Kernel& kernel, const Metric& psi, const State& x0,
                      std::size_t burn_in, std::size_t samples, RngStream rng);

} // namespace wclt
