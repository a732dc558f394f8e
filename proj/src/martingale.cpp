#include "wclt/martingale.hpp"

#include <cmath>

namespace wclt {

CenteredFunction::CenteredFunction(const FiniteChain& chain, Eigen::VectorXd raw) {
    if (raw.size() != static_cast<Eigen::Index>(chain.n_states())) {
        throw ConfigError("function length must match number of states");
    }
    original_mean_ = chain.pi_mean(raw);
    g_ = raw.array() - original_mean_;
}

Eigen::VectorXd v_n(const FiniteChain& chain, const CenteredFunction& g, std::size_t n) {
    if (n < 1) throw ConfigError("v_n needs n >= 1");
    Eigen::VectorXd qk = g.values(); // Q^k g, starting at k = 0
    Eigen::VectorXd sum = qk;
    for (std::size_t k = 1; k < n; ++k) {
        qk = chain.apply(qk);
        sum += qk;
    }
    return sum;
}

MwConditionReport mw_condition_sum(const FiniteChain& chain, const CenteredFunction& g,
                                   std::size_t n_max) {
    if (n_max < 1) throw ConfigError("mw_condition_sum needs n_max >= 1");
    MwConditionReport rep;
    rep.cumulative.reserve(n_max);
    Eigen::VectorXd qk = g.values();
    Eigen::VectorXd vn = qk;
    double sum = 0.0, comp = 0.0;
    for (std::size_t n = 1; n <= n_max; ++n) {
        const double inc = std::pow(static_cast<double>(n), -1.5) * chain.pi_norm(vn);
        const double term = inc - comp;
        const double next = sum + term;
        comp = (next - sum) - term;
        sum = next;
        rep.cumulative.push_back(sum);
        rep.last_increment = inc;
        if (n < n_max) {
            qk = chain.apply(qk);
            vn += qk;
        }
    }
    rep.summable_evidence = rep.last_increment < 1e-3;
    return rep;
}

Eigen::VectorXd resolvent_solve(const FiniteChain& chain, const CenteredFunction& g, double eps) {
    if (!(eps > 0.0)) throw ConfigError("resolvent_solve needs eps > 0");
    const Eigen::Index n = static_cast<Eigen::Index>(chain.n_states());
    const Eigen::MatrixXd A =
        (1.0 + eps) * Eigen::MatrixXd::Identity(n, n) - chain.P();
    Eigen::VectorXd h = A.partialPivLu().solve(g.values());
    const double residual =
        ((1.0 + eps) * h - chain.apply(h) - g.values()).cwiseAbs().maxCoeff();
    if (!(residual <= 1e-10)) {
        throw NumericError("resolvent solve residual above 1e-10");
    }
    return h;
}

PoissonSolution poisson_solve(const FiniteChain& chain, const CenteredFunction& g) {
    const Eigen::Index n = static_cast<Eigen::Index>(chain.n_states());
    // (I - P + 1 pi') h = g: nonsingular for a unichain, and multiplying by pi
    // shows pi . h = pi . g = 0, so the mean-zero pin comes for free.
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - chain.P();
    A.rowwise() += chain.pi().transpose();
    PoissonSolution sol;
    sol.h = A.partialPivLu().solve(g.values());
    sol.h.array() -= chain.pi_mean(sol.h); // remove round-off drift of the pin
    sol.residual = (sol.h - chain.apply(sol.h) - g.values()).cwiseAbs().maxCoeff();
    if (!(sol.residual <= 1e-10)) {
        // Near-periodic unichain edge: least squares with the mean-zero pin as
        // an extra row.
        Eigen::MatrixXd B(n + 1, n);
        B.topRows(n) = Eigen::MatrixXd::Identity(n, n) - chain.P();
        B.row(n) = chain.pi().transpose();
        Eigen::VectorXd rhs(n + 1);
        rhs.head(n) = g.values();
        rhs(n) = 0.0;
        sol.h = B.colPivHouseholderQr().solve(rhs);
        sol.least_squares_fallback = true;
        sol.residual = (sol.h - chain.apply(sol.h) - g.values()).cwiseAbs().maxCoeff();
        if (!(sol.residual <= 1e-10)) {
            throw NumericError("Poisson solve residual above 1e-10");
        }
    }

    // Power-series cross-check sum_{n<=N} Q^n g when the tail has died out.
    constexpr std::size_t kSeriesN = 1000;
    const double g_norm = chain.pi_norm(g.values());
    if (g_norm > 0.0) {
        Eigen::VectorXd qk = g.values();
        Eigen::VectorXd series = qk;
        for (std::size_t k = 1; k <= kSeriesN; ++k) {
            qk = chain.apply(qk);
            series += qk;
        }
        if (chain.pi_norm(qk) <= 1e-9 * g_norm) {
            sol.series_checked = true;
            sol.series_gap = (series - sol.h).cwiseAbs().maxCoeff();
        }
    } else {
        sol.series_checked = true;
        sol.series_gap = sol.h.cwiseAbs().maxCoeff();
    }
    return sol;
}

MaDecomposition ma_decompose(const FiniteChain& chain, const CenteredFunction& g,
                             const Trajectory& traj) {
    if (traj.family != Family::finite) {
        throw ConfigError("ma_decompose expects a finite-chain trajectory");
    }
    const PoissonSolution sol = poisson_solve(chain, g);
    const Eigen::VectorXd qh = chain.apply(sol.h);

    auto index_of = [&](const State& s) {
        const int i = static_cast<int>(std::llround(s.coords[0]));
        if (i < 0 || i >= static_cast<int>(chain.n_states())) {
            throw ConfigError("trajectory state outside chain");
        }
        return i;
    };

    MaDecomposition dec;
    const std::size_t n = traj.states.size() - 1;
    dec.increments.reserve(n);
    dec.remainders.reserve(n);
    const int i0 = index_of(traj.states[0]);
    for (std::size_t k = 1; k <= n; ++k) {
        const int prev = index_of(traj.states[k - 1]);
        const int cur = index_of(traj.states[k]);
        dec.increments.push_back(sol.h(cur) - qh(prev));
        dec.remainders.push_back(qh(i0) - qh(cur));
    }
    return dec;
}

double asymptotic_variance(const FiniteChain& chain, const CenteredFunction& g) {
    const PoissonSolution sol = poisson_solve(chain, g);
    const Eigen::VectorXd qh = chain.apply(sol.h);
    double s = 0.0;
    for (Eigen::Index i = 0; i < sol.h.size(); ++i) {
        s += chain.pi()(i) * (sol.h(i) * sol.h(i) - qh(i) * qh(i));
    }
    if (s < -1e-12) throw NumericError("asymptotic variance came out negative");
    return std::max(s, 0.0);
}

double stationary_second_moment(const FiniteChain& chain, const CenteredFunction& g) {
    const double norm = chain.pi_norm(g.values());
    return norm * norm;
}

} // namespace wclt
