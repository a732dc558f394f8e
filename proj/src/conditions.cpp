#include "wclt/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wclt {

// ---------------------------------------------------------------------------
// H
// ---------------------------------------------------------------------------

double nar_zeta(const NarParams& p, double x, double y) {
    if (x == y) throw ConfigError("zeta is undefined on the diagonal");
    return std::fabs(p.a * (x - y) + (1.0 - p.a) * (p.s.value(x) - p.s.value(y))) /
           std::fabs(x - y);
}

double nar_kappa(const NarParams& p, double x, double y) {
    const double dx = nar_drift(p, x);
    const double dy = nar_drift(p, y);
    return (dx * dx + dy * dy + 2.0 * p.noise.sigma2() + 1.0) / (x * x + y * y + 1.0);
}

HReport check_H(const SSpec& s, double a, const std::vector<double>& grid_points) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("a must lie in (0,1)");
    if (grid_points.size() < 2) throw ConfigError("check_H needs at least two grid points");
    HReport rep;
    rep.grid_size = grid_points.size();
    const double neg_threshold = -(1.0 + a) / (1.0 - a);

    // Pair witnesses: a slope >= 1 certifies the increasing sup condition; a
    // slope <= -(1+a)/(1-a) certifies the decreasing one (swapped orientation).
    for (std::size_t i = 0; i < grid_points.size() && !rep.holds; ++i) {
        for (std::size_t j = i + 1; j < grid_points.size(); ++j) {
            const double u = grid_points[i], v = grid_points[j];
            if (u == v) continue;
            const double slope = (s.value(u) - s.value(v)) / (u - v);
            if (slope >= 1.0) {
                rep.holds = true;
                rep.witness = HWitness{HWitness::Kind::pair_quotient, u, v, slope, 1.0};
                break;
            }
            if (slope <= neg_threshold) {
                rep.holds = true;
                rep.witness =
                    HWitness{HWitness::Kind::pair_quotient, u, v, slope, neg_threshold};
                break;
            }
        }
    }

    // Derivative witness: s'(x0) >= 1 at a point certifies H (the difference
    // quotients approach the derivative).
    if (!rep.holds && s.has_derivative()) {
        for (double x : grid_points) {
            const double d = s.derivative(x);
            if (d >= 1.0) {
                rep.holds = true;
                rep.witness = HWitness{HWitness::Kind::derivative_point, x, x, d, 1.0};
                break;
            }
        }
    }

    rep.inconclusive = !rep.holds;
    return rep;
}

std::vector<double> default_nar_point_grid() {
    std::vector<double> pts;
    for (int i = 0; i <= 80; ++i) pts.push_back(-10.0 + 0.25 * i);
    const double pi = 3.14159265358979323846;
    for (int k = 1; k <= 3; ++k) {
        pts.push_back(k * pi);
        pts.push_back(-k * pi);
    }
    return pts;
}

std::vector<std::pair<double, double>> default_nar_pair_grid() {
    std::vector<std::pair<double, double>> pairs;
    std::vector<double> pts;
    for (int i = 0; i <= 40; ++i) pts.push_back(-10.0 + 0.5 * i);
    for (double x : pts) {
        for (double y : pts) {
            if (x < y) pairs.emplace_back(x, y);
        }
        // Near-diagonal probes where zeta approaches the derivative bound.
        pairs.emplace_back(x, x + 1e-3);
    }
    // Large-|x| tail pairs guard the asymptotics of kappa.
    for (double t : {50.0, 100.0, 500.0, 1000.0}) {
        for (double sgn : {-1.0, 1.0}) {
            const double x = sgn * t;
            pairs.emplace_back(x, x + 1.0);
            pairs.emplace_back(x, x * (1.0 + 1e-3));
            pairs.emplace_back(x, 0.0);
        }
    }
    return pairs;
}

// ---------------------------------------------------------------------------
// C1
// ---------------------------------------------------------------------------

std::vector<double> default_r_grid() {
    std::vector<double> r;
    for (int i = 1; i <= 19; ++i) r.push_back(0.05 * i);
    return r;
}

C1Report check_C1(const NarParams& p, const std::vector<double>& r_grid,
                  const std::vector<std::pair<double, double>>& pair_grid, int threads,
                  Exec exec) {
    if (r_grid.empty() || pair_grid.empty()) {
        throw ConfigError("check_C1 needs non-empty r and pair grids");
    }
    for (const auto& [x, y] : pair_grid) {
        if (x == y) throw ConfigError("check_C1 pair grid must exclude the diagonal");
    }

    // Evaluate zeta and kappa once per pair, then sweep r.
    const std::size_t m = pair_grid.size();
    std::vector<double> zeta(m), kappa(m);
    parallel_for(m, threads, exec, [&](std::size_t i) {
        zeta[i] = nar_zeta(p, pair_grid[i].first, pair_grid[i].second);
        kappa[i] = nar_kappa(p, pair_grid[i].first, pair_grid[i].second);
    });

    C1Report rep;
    rep.r_grid = r_grid;
    rep.sup_per_r.assign(r_grid.size(), 0.0);
    rep.zeta_sup = *std::max_element(zeta.begin(), zeta.end());
    for (std::size_t ri = 0; ri < r_grid.size(); ++ri) {
        const double r = r_grid[ri];
        double sup = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double v = std::pow(zeta[i], r) * std::pow(kappa[i], 1.0 - r);
            sup = std::max(sup, v);
        }
        rep.sup_per_r[ri] = sup;
    }
    std::size_t best = 0;
    for (std::size_t ri = 1; ri < r_grid.size(); ++ri) {
        if (rep.sup_per_r[ri] < rep.sup_per_r[best]) best = ri;
    }
    rep.best_r = r_grid[best];
    rep.best_sup = rep.sup_per_r[best];
    rep.holds = rep.best_sup < 1.0;
    return rep;
}

// ---------------------------------------------------------------------------
// ULA constants
// ---------------------------------------------------------------------------

namespace {

// Largest-magnitude eigenvalue of a symmetric matrix by power iteration.
double power_iteration_abs(const Eigen::MatrixXd& M) {
    const Eigen::Index n = M.rows();
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    // Deterministic, mildly irregular start vector to avoid orthogonality traps.
    for (Eigen::Index i = 0; i < n; ++i) v(i) = 1.0 + 0.01 * static_cast<double>(i % 7);
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 10000; ++it) {
        Eigen::VectorXd w = M * v;
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        w /= norm;
        const double next = w.dot(M * w);
        if (std::fabs(next - lambda) <= 1e-10 * std::max(1.0, std::fabs(next))) {
            return next;
        }
        lambda = next;
        v = w;
    }
    return lambda;
}

} // namespace

std::pair<double, double> extreme_eigenvalues_sym(const Eigen::MatrixXd& M) {
    if (M.rows() != M.cols() || M.rows() < 1) throw ConfigError("matrix must be square");
    if (M.rows() <= 64) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
        if (es.info() != Eigen::Success) throw NumericError("symmetric eigensolve failed");
        return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
    }
    // Shifted power iterations: first the dominant |lambda|, then shift to
    // expose each end of the spectrum.
    const Eigen::Index n = M.rows();
    const double mu = std::fabs(power_iteration_abs(M));
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    const double lmax = power_iteration_abs(M + mu * I) - mu;
    const double lmin = lmax - power_iteration_abs(lmax * I - M);
    return {lmin, lmax};
}

double UlaContractionCert::gamma(double h) const {
    const double sq = 1.0 + h * h * L * L - 2.0 * h * M;
    if (sq < 0.0) throw NumericError("gamma(h): 1 + h^2 L^2 - 2 h M negative");
    return std::sqrt(sq);
}

UlaContractionCert ula_constants(const UlaParams& p) {
    UlaContractionCert cert;
    if (const auto* q = std::get_if<QuadraticTarget>(&p.target)) {
        const auto [lmin, lmax] = extreme_eigenvalues_sym(q->A);
        if (!(lmin > 0.0)) throw ConfigError("quadratic target must be positive definite");
        cert.L = lmax;
        cert.M = lmin;
    } else {
        const auto& l = std::get<LogisticTarget>(p.target);
        const auto [gmin, gmax] = extreme_eigenvalues_sym(l.G);
        if (!(gmin > 0.0)) throw ConfigError("prior precision G must be positive definite");
        double xtx_max = 0.0;
        if (l.X.rows() > 0) {
            const Eigen::MatrixXd XtX = l.X.transpose() * l.X;
            xtx_max = extreme_eigenvalues_sym(XtX).second;
        }
        cert.L = 0.5 * gmax + 0.25 * xtx_max;
        cert.M = 0.5 * gmin;
    }
    cert.h_max = 2.0 * cert.M / (cert.L * cert.L);
    return cert;
}

// ---------------------------------------------------------------------------
// Moment evidence
// ---------------------------------------------------------------------------

LambdaSpec LambdaSpec::gc_distance(std::vector<State> pi_sample, Metric psi) {
    if (pi_sample.empty()) throw ConfigError("gc_distance needs a non-empty pi sample");
    LambdaSpec l;
    l.kind_ = Kind::gc_distance;
    l.pi_sample_ = std::move(pi_sample);
    l.psi_ = psi;
    return l;
}

LambdaSpec LambdaSpec::nar_drift(NarParams p, double rho_r) {
    if (!(rho_r > 0.0 && rho_r < 1.0)) throw ConfigError("nar_drift Lambda needs rho_r in (0,1)");
    LambdaSpec l;
    l.kind_ = Kind::nar_drift;
    l.nar_ = std::move(p);
    l.rho_r_ = rho_r;
    return l;
}

LambdaSpec LambdaSpec::bounded_one(double constant) {
    if (!(constant >= 0.0)) throw ConfigError("bounded Lambda must be >= 0");
    LambdaSpec l;
    l.kind_ = Kind::bounded_one;
    l.constant_ = constant;
    return l;
}

double LambdaSpec::operator()(const State& x) const {
    switch (kind_) {
        case Kind::bounded_one:
            return constant_;
        case Kind::nar_drift: {
            const double v = x.coords[0];
            const double drift = ::wclt::nar_drift(*nar_, v);
            return (drift * drift + nar_->noise.sigma2() + v * v + 1.0) / (1.0 - rho_r_);
        }
        case Kind::gc_distance: {
            double sum = 0.0;
            for (const State& y : pi_sample_) sum += (*psi_)(x, y);
            return sum / static_cast<double>(pi_sample_.size());
        }
    }
    return 0.0;
}

MomentReport moment_evidence(const Kernel& kernel, const std::function<double(const State&)>& f,
                             const State& x0, std::size_t burn_in, std::size_t samples,
                             RngStream rng) {
    if (samples < 4) throw ConfigError("moment_evidence needs samples >= 4");
    MomentReport rep;
    std::vector<double> coords = x0.coords;
    auto finite = [&]() {
        for (double v : coords) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    };

    for (std::size_t k = 0; k < burn_in; ++k) {
        kernel.step(std::span<double>(coords), rng);
        if (!finite()) {
            rep.diverged = true;
            rep.evidence_finite = false;
            return rep;
        }
    }

    // Running mean of f(X)^2 with snapshots at doubling prefixes.
    double sum = 0.0, comp = 0.0, sum_sq = 0.0;
    double half_estimate = 0.0;
    const std::size_t half = samples / 2;
    std::size_t next_snapshot = std::max<std::size_t>(samples / 64, 2);
    for (std::size_t k = 1; k <= samples; ++k) {
        kernel.step(std::span<double>(coords), rng);
        if (!finite()) {
            rep.diverged = true;
            rep.evidence_finite = false;
            rep.samples_used = k - 1;
            return rep;
        }
        const double v = f(State(coords));
        const double v2 = v * v;
        if (!std::isfinite(v2)) {
            rep.diverged = true;
            rep.evidence_finite = false;
            rep.samples_used = k - 1;
            return rep;
        }
        const double term = v2 - comp;
        const double next = sum + term;
        comp = (next - sum) - term;
        sum = next;
        sum_sq += v2 * v2;
        if (k == half) half_estimate = sum / static_cast<double>(k);
        if (k == next_snapshot || k == samples) {
            rep.prefix_estimates.push_back(sum / static_cast<double>(k));
            next_snapshot = std::min(samples, next_snapshot * 2);
        }
    }
    rep.samples_used = samples;
    rep.estimate = sum / static_cast<double>(samples);
    const double var =
        std::max(0.0, sum_sq / static_cast<double>(samples) - rep.estimate * rep.estimate);
    rep.std_error = std::sqrt(var / static_cast<double>(samples));

    // Prefix stability: relative change over the last factor of two of samples.
    const double denom = std::max(std::fabs(rep.estimate), 1e-300);
    rep.evidence_finite = std::fabs(rep.estimate - half_estimate) / denom < 0.05;
    return rep;
}

MomentReport check_A2(const LambdaSpec& lambda, const Kernel& kernel, const State& x0,
                      std::size_t burn_in, std::size_t samples, RngStream rng) {
    return moment_evidence(
        kernel, [&](const State& s) { return lambda(s); }, x0, burn_in, samples, rng);
}

MomentReport check_P2(const Kernel& kernel, const Metric& psi, const State& x0,
                      std::size_t burn_in, std::size_t samples, RngStream rng) {
    return moment_evidence(
        kernel, [&](const State& s) { return psi(x0, s); }, x0, burn_in, samples, rng);
}

} // namespace wclt
