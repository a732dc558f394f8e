#pragma once

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wclt/errors.hpp"
#include "wclt/rng.hpp"

namespace wclt {

enum class Family { finite, nar, ula, ei_mala, bernoulli_ar1 };

std::string family_name(Family f);

// ---------------------------------------------------------------------------
// Nonlinearity s(x) for the nonlinear AR family.
// ---------------------------------------------------------------------------

class SSpec {
  public:
    enum class Kind { neg_sin, bounded_table, affine_cap };

    // s(x) = -sin(x)
    static SSpec neg_sin();
    // Piecewise-linear interpolant of (xs, ys); constant extension outside,
    // so the function stays bounded.
    static SSpec bounded_table(std::vector<double> xs, std::vector<double> ys);
    // s(x) = clamp(slope * x, -cap, cap). A slope >= 1 makes condition H
    // toggle on; slope 0 gives a flat nonlinearity.
    static SSpec affine_cap(double slope, double cap);

    Kind kind() const { return kind_; }
    double value(double x) const;
    bool has_derivative() const { return kind_ != Kind::bounded_table; }
    double derivative(double x) const;
    // An upper bound for sup |s|.
    double bound() const;

  private:
    SSpec() = default;
    Kind kind_ = Kind::neg_sin;
    double slope_ = 0.0;
    double cap_ = 0.0;
    std::vector<double> xs_, ys_;
};

// ---------------------------------------------------------------------------
// Symmetric zero-mean innovation law for the nonlinear AR family.
// ---------------------------------------------------------------------------

class NoiseSpec {
  public:
    enum class Kind { gaussian, symmetric_uniform, bernoulli_pair };

    static NoiseSpec gaussian(double sigma);
    // Uniform on (-half_width, half_width).
    static NoiseSpec symmetric_uniform(double half_width);
    // +/- c with probability 1/2 each.
    static NoiseSpec bernoulli_pair(double c);

    Kind kind() const { return kind_; }
    double sigma2() const { return sigma2_; }
    double scale() const { return scale_; }
    double sample(RngStream& rng) const;

  private:
    NoiseSpec(Kind k, double scale, double sigma2) : kind_(k), scale_(scale), sigma2_(sigma2) {}
    Kind kind_;
    double scale_;
    double sigma2_;
};

// ---------------------------------------------------------------------------
// Nonlinear AR(1): X_{n+1} = a X_n + (1 - a) s(X_n) + Z_n.
// ---------------------------------------------------------------------------

struct NarParams {
    double a;
    SSpec s;
    NoiseSpec noise;

    NarParams(double a_, SSpec s_, NoiseSpec noise_);
};

double nar_drift(const NarParams& p, double x);
double nar_step_with(const NarParams& p, double x, double z);
double nar_step(const NarParams& p, double x, RngStream& rng);

// ---------------------------------------------------------------------------
// Unadjusted Langevin: X_{n+1} = X_n - h grad U(X_n) + sqrt(2h) Z_{n+1}.
// ---------------------------------------------------------------------------

// U(x) = x' A x / 2 with A symmetric positive definite.
struct QuadraticTarget {
    Eigen::MatrixXd A;
};

// Bayesian logistic regression posterior with N(0, G^{-1}) prior:
//   grad U(b) = G b / 2 + sum_i [sigmoid(x_i' b) - y_i] x_i,
// i.e. U(b) = b' G b / 4 + sum_i [log(1 + e^{x_i' b}) - y_i x_i' b].
struct LogisticTarget {
    Eigen::MatrixXd X; // k x p design
    Eigen::VectorXd y; // k responses in {0, 1}
    Eigen::MatrixXd G; // p x p positive-definite prior precision
};

struct UlaParams {
    std::variant<QuadraticTarget, LogisticTarget> target;
    double h;

    UlaParams(QuadraticTarget t, double h_);
    UlaParams(LogisticTarget t, double h_);

    std::size_t dimension() const;
};

double ula_potential(const UlaParams& p, const Eigen::VectorXd& x);
Eigen::VectorXd ula_gradient(const UlaParams& p, const Eigen::VectorXd& x);
Eigen::VectorXd ula_step_with(const UlaParams& p, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& z);
Eigen::VectorXd ula_step(const UlaParams& p, const Eigen::VectorXd& x, RngStream& rng);

// ---------------------------------------------------------------------------
// Exponential-integrator MALA.
// ---------------------------------------------------------------------------

// Smooth components of the target exp(-x'Hx/2 - gamma(x) - Gamma(x)).
class FunctionSpec {
  public:
    enum class Kind { zero, quadratic, radial_power };

    static FunctionSpec zero();
    // f(x) = x' C x / 2 + d' x, C symmetric PSD.
    static FunctionSpec quadratic(Eigen::MatrixXd C, Eigen::VectorXd d);
    // f(x) = lambda1 (x'x + delta)^beta with beta in (1/2, 1).
    static FunctionSpec radial_power(double lambda1, double delta, double beta);

    Kind kind() const { return kind_; }
    double value(const Eigen::VectorXd& x) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;

  private:
    FunctionSpec() = default;
    Kind kind_ = Kind::zero;
    Eigen::MatrixXd C_;
    Eigen::VectorXd d_;
    double lambda1_ = 0.0, delta_ = 0.0, beta_ = 0.0;
};

class EiMalaParams {
  public:
    // H symmetric positive definite (eigenvalue floor 1e-10), 0 < h < 2.
    EiMalaParams(Eigen::MatrixXd H, FunctionSpec gamma_fn, FunctionSpec big_gamma_fn, double h);

    std::size_t dimension() const { return static_cast<std::size_t>(H_.rows()); }
    double h() const { return h_; }
    const Eigen::MatrixXd& H() const { return H_; }
    const Eigen::MatrixXd& H_inv() const { return H_inv_; }
    const Eigen::MatrixXd& H_inv_sqrt() const { return H_inv_sqrt_; }
    const FunctionSpec& gamma_fn() const { return gamma_; }
    const FunctionSpec& big_gamma_fn() const { return big_gamma_; }

  private:
    Eigen::MatrixXd H_, H_inv_, H_inv_sqrt_;
    FunctionSpec gamma_, big_gamma_;
    double h_;
};

// Posterior of the Bayesian linear inverse problem b ~ A x + noise with prior
// exp(-lambda1 (x'x + delta)^beta - lambda2 x'x / 2):
//   H = A'A + lambda2 I, gamma(x) = -<b, Ax>, Gamma(x) = lambda1 (x'x + delta)^beta.
EiMalaParams make_bayes_inverse_eimala(double lambda1, double lambda2, double delta, double beta,
                                       const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                       double h);

Eigen::VectorXd eimala_propose_with(const EiMalaParams& p, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& z);
Eigen::VectorXd eimala_propose(const EiMalaParams& p, const Eigen::VectorXd& x, RngStream& rng);
double eimala_log_G(const EiMalaParams& p, const Eigen::VectorXd& x, const Eigen::VectorXd& y);
// Accept iff log(u) < -max(G_h, 0); returns true when the proposal was taken.
bool eimala_step_with(const EiMalaParams& p, Eigen::VectorXd& x, const Eigen::VectorXd& z,
                      double u);
bool eimala_step(const EiMalaParams& p, Eigen::VectorXd& x, RngStream& rng);

// ---------------------------------------------------------------------------
// Bernoulli-shift AR(1) on [0, 1]: X_{n+1} = a X_n + (1 - a) theta_{n+1}.
// ---------------------------------------------------------------------------

struct BernoulliAr1Params {
    double a;

    explicit BernoulliAr1Params(double a_);
};

double bernoulli_ar1_step_with(const BernoulliAr1Params& p, double x, int theta);
double bernoulli_ar1_step(const BernoulliAr1Params& p, double x, RngStream& rng);

// ---------------------------------------------------------------------------
// Polymorphic kernel facade used by trajectories, couplings and experiments.
// ---------------------------------------------------------------------------

class Kernel {
  public:
    virtual ~Kernel() = default;
    virtual Family family() const = 0;
    virtual std::size_t dimension() const = 0;

    // One transition in place. Returns false only when a Metropolis proposal
    // was rejected (non-Metropolis kernels always return true). Consumes a
    // fixed number of draws per family so replay is exact.
    virtual bool step(std::span<double> x, RngStream& rng) const = 0;

    // Synchronous coupling: advance both states with shared innovations
    // (same Z, same theta, same acceptance uniform).
    virtual void coupled_step(std::span<double> x, std::span<double> y, RngStream& rng) const = 0;
};

class FiniteChain; // finite_chain.hpp

std::shared_ptr<const Kernel> make_nar_kernel(NarParams p);
std::shared_ptr<const Kernel> make_ula_kernel(UlaParams p);
std::shared_ptr<const Kernel> make_eimala_kernel(EiMalaParams p);
std::shared_ptr<const Kernel> make_bernoulli_ar1_kernel(BernoulliAr1Params p);
std::shared_ptr<const Kernel> make_finite_kernel(std::shared_ptr<const FiniteChain> chain);

} // namespace wclt
