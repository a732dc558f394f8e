#include "wclt/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "wclt/finite_chain.hpp"

namespace wclt {

std::string family_name(Family f) {
    switch (f) {
        case Family::finite: return "finite";
        case Family::nar: return "nar";
        case Family::ula: return "ula";
        case Family::ei_mala: return "ei-mala";
        case Family::bernoulli_ar1: return "bernoulli-ar1";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// SSpec
// ---------------------------------------------------------------------------

SSpec SSpec::neg_sin() {
    SSpec s;
    s.kind_ = Kind::neg_sin;
    return s;
}

SSpec SSpec::bounded_table(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() < 2 || xs.size() != ys.size()) {
        throw ConfigError("bounded_table needs >= 2 matching grid points");
    }
    if (!std::is_sorted(xs.begin(), xs.end())) {
        throw ConfigError("bounded_table grid must be sorted");
    }
    SSpec s;
    s.kind_ = Kind::bounded_table;
    s.xs_ = std::move(xs);
    s.ys_ = std::move(ys);
    return s;
}

SSpec SSpec::affine_cap(double slope, double cap) {
    if (!(cap > 0.0)) throw ConfigError("affine_cap cap must be > 0");
    SSpec s;
    s.kind_ = Kind::affine_cap;
    s.slope_ = slope;
    s.cap_ = cap;
    return s;
}

double SSpec::value(double x) const {
    switch (kind_) {
        case Kind::neg_sin: return -std::sin(x);
        case Kind::affine_cap: return std::clamp(slope_ * x, -cap_, cap_);
        case Kind::bounded_table: {
            if (x <= xs_.front()) return ys_.front();
            if (x >= xs_.back()) return ys_.back();
            const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
            const std::size_t j = static_cast<std::size_t>(it - xs_.begin());
            const double t = (x - xs_[j - 1]) / (xs_[j] - xs_[j - 1]);
            return ys_[j - 1] + t * (ys_[j] - ys_[j - 1]);
        }
    }
    return 0.0;
}

double SSpec::derivative(double x) const {
    switch (kind_) {
        case Kind::neg_sin: return -std::cos(x);
        case Kind::affine_cap: return std::fabs(slope_ * x) < cap_ ? slope_ : 0.0;
        case Kind::bounded_table:
            throw ConfigError("bounded_table has no analytic derivative");
    }
    return 0.0;
}

double SSpec::bound() const {
    switch (kind_) {
        case Kind::neg_sin: return 1.0;
        case Kind::affine_cap: return cap_;
        case Kind::bounded_table: {
            double m = 0.0;
            for (double v : ys_) m = std::max(m, std::fabs(v));
            return m;
        }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// NoiseSpec
// ---------------------------------------------------------------------------

NoiseSpec NoiseSpec::gaussian(double sigma) {
    if (!(sigma > 0.0)) throw ConfigError("gaussian noise sigma must be > 0");
    return NoiseSpec(Kind::gaussian, sigma, sigma * sigma);
}

NoiseSpec NoiseSpec::symmetric_uniform(double half_width) {
    if (!(half_width > 0.0)) throw ConfigError("uniform noise half-width must be > 0");
    return NoiseSpec(Kind::symmetric_uniform, half_width, half_width * half_width / 3.0);
}

NoiseSpec NoiseSpec::bernoulli_pair(double c) {
    if (!(c > 0.0)) throw ConfigError("bernoulli-pair noise scale must be > 0");
    return NoiseSpec(Kind::bernoulli_pair, c, c * c);
}

double NoiseSpec::sample(RngStream& rng) const {
    switch (kind_) {
        case Kind::gaussian: return scale_ * rng.gaussian();
        case Kind::symmetric_uniform: return scale_ * (2.0 * rng.uniform() - 1.0);
        case Kind::bernoulli_pair: return rng.uniform() < 0.5 ? -scale_ : scale_;
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Nonlinear AR
// ---------------------------------------------------------------------------

NarParams::NarParams(double a_, SSpec s_, NoiseSpec noise_)
    : a(a_), s(std::move(s_)), noise(noise_) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("a must lie in (0,1)");
}

double nar_drift(const NarParams& p, double x) { return p.a * x + (1.0 - p.a) * p.s.value(x); }

double nar_step_with(const NarParams& p, double x, double z) { return nar_drift(p, x) + z; }

double nar_step(const NarParams& p, double x, RngStream& rng) {
    return nar_step_with(p, x, p.noise.sample(rng));
}

// ---------------------------------------------------------------------------
// ULA
// ---------------------------------------------------------------------------

namespace {

void validate_symmetric(const Eigen::MatrixXd& M, const char* what) {
    if (M.rows() != M.cols() || M.rows() < 1) throw ConfigError(std::string(what) + " must be square");
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, M.cwiseAbs().maxCoeff())) {
        throw ConfigError(std::string(what) + " must be symmetric");
    }
}

inline double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

inline double log1pexp(double t) {
    if (t > 30.0) return t + std::log1p(std::exp(-t));
    return std::log1p(std::exp(t));
}

} // namespace

UlaParams::UlaParams(QuadraticTarget t, double h_) : target(std::move(t)), h(h_) {
    const auto& q = std::get<QuadraticTarget>(target);
    validate_symmetric(q.A, "quadratic target matrix");
    if (!(h >= 0.0)) throw ConfigError("step size h must be >= 0");
}

UlaParams::UlaParams(LogisticTarget t, double h_) : target(std::move(t)), h(h_) {
    const auto& l = std::get<LogisticTarget>(target);
    validate_symmetric(l.G, "prior precision G");
    if (l.X.rows() != l.y.size()) throw ConfigError("logistic target: X rows must match y length");
    if (l.X.cols() != l.G.rows()) throw ConfigError("logistic target: X cols must match G size");
    for (int i = 0; i < l.y.size(); ++i) {
        if (l.y(i) != 0.0 && l.y(i) != 1.0) throw ConfigError("logistic responses must be 0 or 1");
    }
    if (!(h >= 0.0)) throw ConfigError("step size h must be >= 0");
}

std::size_t UlaParams::dimension() const {
    if (const auto* q = std::get_if<QuadraticTarget>(&target)) {
        return static_cast<std::size_t>(q->A.rows());
    }
    return static_cast<std::size_t>(std::get<LogisticTarget>(target).G.rows());
}

double ula_potential(const UlaParams& p, const Eigen::VectorXd& x) {
    if (static_cast<std::size_t>(x.size()) != p.dimension()) {
        throw ConfigError("ula: dimension mismatch");
    }
    if (const auto* q = std::get_if<QuadraticTarget>(&p.target)) {
        return 0.5 * x.dot(q->A * x);
    }
    const auto& l = std::get<LogisticTarget>(p.target);
    double u = 0.25 * x.dot(l.G * x);
    for (int i = 0; i < l.X.rows(); ++i) {
        const double t = l.X.row(i).dot(x);
        u += log1pexp(t) - l.y(i) * t;
    }
    return u;
}

Eigen::VectorXd ula_gradient(const UlaParams& p, const Eigen::VectorXd& x) {
    if (static_cast<std::size_t>(x.size()) != p.dimension()) {
        throw ConfigError("ula: dimension mismatch");
    }
    if (const auto* q = std::get_if<QuadraticTarget>(&p.target)) {
        return q->A * x;
    }
    const auto& l = std::get<LogisticTarget>(p.target);
    Eigen::VectorXd grad = 0.5 * (l.G * x);
    for (int i = 0; i < l.X.rows(); ++i) {
        const double t = l.X.row(i).dot(x);
        grad += (sigmoid(t) - l.y(i)) * l.X.row(i).transpose();
    }
    return grad;
}

Eigen::VectorXd ula_step_with(const UlaParams& p, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& z) {
    return x - p.h * ula_gradient(p, x) + std::sqrt(2.0 * p.h) * z;
}

Eigen::VectorXd ula_step(const UlaParams& p, const Eigen::VectorXd& x, RngStream& rng) {
    Eigen::VectorXd z(x.size());
    for (int i = 0; i < z.size(); ++i) z(i) = rng.gaussian();
    return ula_step_with(p, x, z);
}

// ---------------------------------------------------------------------------
// EI-MALA
// ---------------------------------------------------------------------------

FunctionSpec FunctionSpec::zero() { return FunctionSpec(); }

FunctionSpec FunctionSpec::quadratic(Eigen::MatrixXd C, Eigen::VectorXd d) {
    validate_symmetric(C, "quadratic coefficient matrix");
    if (C.rows() != d.size()) throw ConfigError("quadratic spec: C and d sizes differ");
    FunctionSpec f;
    f.kind_ = Kind::quadratic;
    f.C_ = std::move(C);
    f.d_ = std::move(d);
    return f;
}

FunctionSpec FunctionSpec::radial_power(double lambda1, double delta, double beta) {
    if (!(lambda1 > 0.0 && delta > 0.0)) throw ConfigError("radial_power needs lambda1, delta > 0");
    if (!(beta > 0.5 && beta < 1.0)) throw ConfigError("radial_power beta must lie in (1/2, 1)");
    FunctionSpec f;
    f.kind_ = Kind::radial_power;
    f.lambda1_ = lambda1;
    f.delta_ = delta;
    f.beta_ = beta;
    return f;
}

double FunctionSpec::value(const Eigen::VectorXd& x) const {
    switch (kind_) {
        case Kind::zero: return 0.0;
        case Kind::quadratic: return 0.5 * x.dot(C_ * x) + d_.dot(x);
        case Kind::radial_power: return lambda1_ * std::pow(x.squaredNorm() + delta_, beta_);
    }
    return 0.0;
}

Eigen::VectorXd FunctionSpec::gradient(const Eigen::VectorXd& x) const {
    switch (kind_) {
        case Kind::zero: return Eigen::VectorXd::Zero(x.size());
        case Kind::quadratic: return C_ * x + d_;
        case Kind::radial_power:
            return 2.0 * lambda1_ * beta_ * std::pow(x.squaredNorm() + delta_, beta_ - 1.0) * x;
    }
    return Eigen::VectorXd::Zero(x.size());
}

EiMalaParams::EiMalaParams(Eigen::MatrixXd H, FunctionSpec gamma_fn, FunctionSpec big_gamma_fn,
                           double h)
    : H_(std::move(H)), gamma_(std::move(gamma_fn)), big_gamma_(std::move(big_gamma_fn)), h_(h) {
    validate_symmetric(H_, "H");
    if (!(h_ > 0.0 && h_ < 2.0)) throw ConfigError("EI-MALA step size h must lie in (0,2)");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H_);
    if (es.info() != Eigen::Success) throw NumericError("eigendecomposition of H failed");
    if (!(es.eigenvalues().minCoeff() > 1e-10)) {
        throw ConfigError("H must be positive definite (eigenvalue floor 1e-10)");
    }
    const Eigen::VectorXd lam = es.eigenvalues();
    H_inv_ = es.eigenvectors() * lam.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    H_inv_sqrt_ = es.eigenvectors() * lam.cwiseSqrt().cwiseInverse().asDiagonal() *
                  es.eigenvectors().transpose();
}

EiMalaParams make_bayes_inverse_eimala(double lambda1, double lambda2, double delta, double beta,
                                       const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                       double h) {
    if (!(lambda2 > 0.0)) throw ConfigError("bayes-inverse: lambda2 must be > 0");
    if (A.rows() != b.size()) throw ConfigError("bayes-inverse: A rows must match b length");
    const int d = static_cast<int>(A.cols());
    Eigen::MatrixXd H = A.transpose() * A + lambda2 * Eigen::MatrixXd::Identity(d, d);
    FunctionSpec gamma =
        FunctionSpec::quadratic(Eigen::MatrixXd::Zero(d, d), -(A.transpose() * b));
    FunctionSpec big_gamma = FunctionSpec::radial_power(lambda1, delta, beta);
    return EiMalaParams(std::move(H), std::move(gamma), std::move(big_gamma), h);
}

Eigen::VectorXd eimala_propose_with(const EiMalaParams& p, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& z) {
    const double h = p.h();
    return (1.0 - 0.5 * h) * x + 0.5 * h * (p.H_inv() * p.gamma_fn().gradient(x)) +
           std::sqrt(h - 0.25 * h * h) * (p.H_inv_sqrt() * z);
}

Eigen::VectorXd eimala_propose(const EiMalaParams& p, const Eigen::VectorXd& x, RngStream& rng) {
    Eigen::VectorXd z(x.size());
    for (int i = 0; i < z.size(); ++i) z(i) = rng.gaussian();
    return eimala_propose_with(p, x, z);
}

double eimala_log_G(const EiMalaParams& p, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const double h = p.h();
    const double c = h / (8.0 - 2.0 * h);
    const Eigen::VectorXd gx = p.gamma_fn().gradient(x);
    const Eigen::VectorXd gy = p.gamma_fn().gradient(y);
    double G = p.gamma_fn().value(y) - p.gamma_fn().value(x);
    G += p.big_gamma_fn().value(y) - p.big_gamma_fn().value(x);
    G -= 0.5 * (y - x).dot(gx + gy);
    G += c * (y + x).dot(gy - gx);
    G += c * ((p.H_inv_sqrt() * gy).squaredNorm() - (p.H_inv_sqrt() * gx).squaredNorm());
    return G;
}

bool eimala_step_with(const EiMalaParams& p, Eigen::VectorXd& x, const Eigen::VectorXd& z,
                      double u) {
    const Eigen::VectorXd y = eimala_propose_with(p, x, z);
    const double G = eimala_log_G(p, x, y);
    // alpha = exp(-G^+), compared in log space.
    if (std::log(u) < -std::max(G, 0.0)) {
        x = y;
        return true;
    }
    return false;
}

bool eimala_step(const EiMalaParams& p, Eigen::VectorXd& x, RngStream& rng) {
    Eigen::VectorXd z(x.size());
    for (int i = 0; i < z.size(); ++i) z(i) = rng.gaussian();
    const double u = rng.uniform();
    return eimala_step_with(p, x, z, u);
}

// ---------------------------------------------------------------------------
// Bernoulli-shift AR(1)
// ---------------------------------------------------------------------------

BernoulliAr1Params::BernoulliAr1Params(double a_) : a(a_) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("a must lie in (0,1)");
}

double bernoulli_ar1_step_with(const BernoulliAr1Params& p, double x, int theta) {
    if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("bernoulli-ar1 state must lie in [0,1]");
    return theta ? p.a * x + (1.0 - p.a) : p.a * x;
}

double bernoulli_ar1_step(const BernoulliAr1Params& p, double x, RngStream& rng) {
    return bernoulli_ar1_step_with(p, x, rng.uniform() < 0.5 ? 1 : 0);
}

// ---------------------------------------------------------------------------
// Kernel facade
// ---------------------------------------------------------------------------

namespace {

class NarKernel final : public Kernel {
  public:
    explicit NarKernel(NarParams p) : p_(std::move(p)) {}
    Family family() const override { return Family::nar; }
    std::size_t dimension() const override { return 1; }
    bool step(std::span<double> x, RngStream& rng) const override {
        x[0] = nar_step(p_, x[0], rng);
        return true;
    }
    void coupled_step(std::span<double> x, std::span<double> y, RngStream& rng) const override {
        const double z = p_.noise.sample(rng);
        x[0] = nar_step_with(p_, x[0], z);
        y[0] = nar_step_with(p_, y[0], z);
    }
    const NarParams& params() const { return p_; }

  private:
    NarParams p_;
};

class UlaKernel final : public Kernel {
  public:
    explicit UlaKernel(UlaParams p) : p_(std::move(p)) {}
    Family family() const override { return Family::ula; }
    std::size_t dimension() const override { return p_.dimension(); }
    bool step(std::span<double> x, RngStream& rng) const override {
        Eigen::Map<Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
        const Eigen::VectorXd next = ula_step(p_, xv, rng);
        xv = next;
        return true;
    }
    void coupled_step(std::span<double> x, std::span<double> y, RngStream& rng) const override {
        Eigen::VectorXd z(static_cast<Eigen::Index>(x.size()));
        for (int i = 0; i < z.size(); ++i) z(i) = rng.gaussian();
        Eigen::Map<Eigen::VectorXd> xv(x.data(), z.size());
        Eigen::Map<Eigen::VectorXd> yv(y.data(), z.size());
        const Eigen::VectorXd nx = ula_step_with(p_, xv, z);
        const Eigen::VectorXd ny = ula_step_with(p_, yv, z);
        xv = nx;
        yv = ny;
    }

  private:
    UlaParams p_;
};

class EiMalaKernel final : public Kernel {
  public:
    explicit EiMalaKernel(EiMalaParams p) : p_(std::move(p)) {}
    Family family() const override { return Family::ei_mala; }
    std::size_t dimension() const override { return p_.dimension(); }
    bool step(std::span<double> x, RngStream& rng) const override {
        Eigen::Map<Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
        Eigen::VectorXd cur = xv;
        const bool accepted = eimala_step(p_, cur, rng);
        xv = cur;
        return accepted;
    }
    void coupled_step(std::span<double> x, std::span<double> y, RngStream& rng) const override {
        Eigen::VectorXd z(static_cast<Eigen::Index>(x.size()));
        for (int i = 0; i < z.size(); ++i) z(i) = rng.gaussian();
        const double u = rng.uniform();
        Eigen::Map<Eigen::VectorXd> xv(x.data(), z.size());
        Eigen::Map<Eigen::VectorXd> yv(y.data(), z.size());
        Eigen::VectorXd cx = xv, cy = yv;
        eimala_step_with(p_, cx, z, u);
        eimala_step_with(p_, cy, z, u);
        xv = cx;
        yv = cy;
    }

  private:
    EiMalaParams p_;
};

class BernoulliAr1Kernel final : public Kernel {
  public:
    explicit BernoulliAr1Kernel(BernoulliAr1Params p) : p_(p) {}
    Family family() const override { return Family::bernoulli_ar1; }
    std::size_t dimension() const override { return 1; }
    bool step(std::span<double> x, RngStream& rng) const override {
        x[0] = bernoulli_ar1_step(p_, x[0], rng);
        return true;
    }
    void coupled_step(std::span<double> x, std::span<double> y, RngStream& rng) const override {
        const int theta = rng.uniform() < 0.5 ? 1 : 0;
        x[0] = bernoulli_ar1_step_with(p_, x[0], theta);
        y[0] = bernoulli_ar1_step_with(p_, y[0], theta);
    }

  private:
    BernoulliAr1Params p_;
};

class FiniteKernel final : public Kernel {
  public:
    explicit FiniteKernel(std::shared_ptr<const FiniteChain> chain) : chain_(std::move(chain)) {
        if (!chain_) throw ConfigError("finite kernel requires a chain");
    }
    Family family() const override { return Family::finite; }
    std::size_t dimension() const override { return 1; }
    bool step(std::span<double> x, RngStream& rng) const override {
        const int i = state_index(x[0]);
        x[0] = static_cast<double>(finite_row_sample(chain_->P(), i, rng.uniform()));
        return true;
    }
    void coupled_step(std::span<double> x, std::span<double> y, RngStream& rng) const override {
        const double u = rng.uniform();
        x[0] = static_cast<double>(finite_row_sample(chain_->P(), state_index(x[0]), u));
        y[0] = static_cast<double>(finite_row_sample(chain_->P(), state_index(y[0]), u));
    }

  private:
    int state_index(double v) const {
        const int i = static_cast<int>(std::llround(v));
        if (i < 0 || i >= static_cast<int>(chain_->n_states())) {
            throw ConfigError("finite kernel: state index out of range");
        }
        return i;
    }
    std::shared_ptr<const FiniteChain> chain_;
};

} // namespace

std::shared_ptr<const Kernel> make_nar_kernel(NarParams p) {
    return std::make_shared<NarKernel>(std::move(p));
}
std::shared_ptr<const Kernel> make_ula_kernel(UlaParams p) {
    return std::make_shared<UlaKernel>(std::move(p));
}
std::shared_ptr<const Kernel> make_eimala_kernel(EiMalaParams p) {
    return std::make_shared<EiMalaKernel>(std::move(p));
}
std::shared_ptr<const Kernel> make_bernoulli_ar1_kernel(BernoulliAr1Params p) {
    return std::make_shared<BernoulliAr1Kernel>(p);
}
std::shared_ptr<const Kernel> make_finite_kernel(std::shared_ptr<const FiniteChain> chain) {
    return std::make_shared<FiniteKernel>(std::move(chain));
}

} // namespace wclt
