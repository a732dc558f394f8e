#include <doctest.h>

#include <cmath>

#include "wclt/errors.hpp"
#include "wclt/martingale.hpp"
#include "wclt/rng.hpp"
#include "wclt/simulate.hpp"

using namespace wclt;

namespace {

std::shared_ptr<const FiniteChain> two_state(double p, double q) {
    Eigen::MatrixXd P(2, 2);
    P << 1.0 - p, p, q, 1.0 - q;
    return FiniteChain::from_matrix(P);
}

std::shared_ptr<const FiniteChain> identity_chain(int n) {
    return std::make_shared<FiniteChain>(Eigen::MatrixXd::Identity(n, n),
                                         Eigen::VectorXd::Constant(n, 1.0 / n));
}

// Doeblin mixture keeps the second eigenvalue away from 1, so truncated
// autocovariance sums converge quickly.
std::shared_ptr<const FiniteChain> random_ergodic_chain(int n, RngStream& rng) {
    Eigen::MatrixXd P(n, n);
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int j = 0; j < n; ++j) {
            P(i, j) = rng.uniform();
            sum += P(i, j);
        }
        P.row(i) /= sum;
    }
    P = 0.7 * P + 0.3 * Eigen::MatrixXd::Constant(n, n, 1.0 / n);
    for (int i = 0; i < n; ++i) P.row(i) /= P.row(i).sum();
    return FiniteChain::from_matrix(P);
}

Eigen::VectorXd random_vector(int n, RngStream& rng) {
    Eigen::VectorXd g(n);
    for (int i = 0; i < n; ++i) g(i) = rng.gaussian();
    return g;
}

// Brute-force asymptotic variance: Var_pi(g) + 2 sum_{k=1}^K Cov_pi(g, Q^k g).
double autocov_variance(const FiniteChain& chain, const CenteredFunction& g, int K) {
    const Eigen::VectorXd& v = g.values();
    double total = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) total += chain.pi()(i) * v(i) * v(i);
    Eigen::VectorXd qk = v;
    for (int k = 1; k <= K; ++k) {
        qk = chain.apply(qk);
        double cov = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i) cov += chain.pi()(i) * v(i) * qk(i);
        total += 2.0 * cov;
    }
    return total;
}

} // namespace

TEST_CASE("CenteredFunction removes the pi mean") {
    auto chain = two_state(0.25, 0.25);
    Eigen::VectorXd raw(2);
    raw << 0.0, 1.0;
    const CenteredFunction g(*chain, raw);
    CHECK(g.original_mean() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::fabs(chain->pi_mean(g.values())) <= 1e-12);
    CHECK(g.values()(0) == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("v_n partial sums: identity, one term, eigenfunction") {
    auto chain = two_state(0.25, 0.25); // eigenvalue 0.5 on the centered space
    Eigen::VectorXd raw(2);
    raw << -0.5, 0.5;
    const CenteredFunction g(*chain, raw);

    CHECK((v_n(*chain, g, 1) - g.values()).cwiseAbs().maxCoeff() <= 1e-15);
    const Eigen::VectorXd v3 = v_n(*chain, g, 3);
    CHECK((v3 - 1.75 * g.values()).cwiseAbs().maxCoeff() <= 1e-14);

    auto id = identity_chain(2);
    const CenteredFunction gid(*id, raw);
    CHECK((v_n(*id, gid, 5) - 5.0 * gid.values()).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("mw_condition_sum separates summable from divergent") {
    Eigen::VectorXd raw(2);
    raw << -0.5, 0.5;

    auto chain = two_state(0.25, 0.25);
    const CenteredFunction g(*chain, raw);
    const MwConditionReport rep = mw_condition_sum(*chain, g, 10000);
    CHECK(rep.summable_evidence);
    CHECK(rep.last_increment < 1e-3);
    // Closed form: ||V_n g|| = (1 - 0.5^n)/(1 - 0.5) * ||g||, ||g|| = 0.5.
    double expect = 0.0;
    for (std::size_t n = 1; n <= 10000; ++n) {
        expect += std::pow(static_cast<double>(n), -1.5) *
                  (1.0 - std::pow(0.5, static_cast<double>(n)));
        if (n == 10 || n == 10000) {
            CHECK(rep.cumulative[n - 1] == doctest::Approx(expect).epsilon(1e-12));
        }
    }

    auto id = identity_chain(2);
    const CenteredFunction gid(*id, raw);
    const MwConditionReport div = mw_condition_sum(*id, gid, 10000);
    CHECK_FALSE(div.summable_evidence);
    CHECK(div.last_increment == doctest::Approx(0.5 / 100.0).epsilon(1e-12));

    const CenteredFunction zero(*chain, Eigen::VectorXd::Zero(2));
    const MwConditionReport z = mw_condition_sum(*chain, zero, 100);
    CHECK(z.cumulative.back() == 0.0);
}

TEST_CASE("resolvent_solve: eigen identity and dominant-term limit") {
    auto chain = two_state(0.25, 0.25);
    Eigen::VectorXd raw(2);
    raw << -0.5, 0.5;
    const CenteredFunction g(*chain, raw);

    CHECK(resolvent_solve(*chain, CenteredFunction(*chain, Eigen::VectorXd::Zero(2)), 0.5)
              .cwiseAbs()
              .maxCoeff() == 0.0);

    // (1 + eps - lambda) h = g with lambda = 0.5, eps = 0.5 gives h = g.
    const Eigen::VectorXd h = resolvent_solve(*chain, g, 0.5);
    CHECK((h - g.values()).cwiseAbs().maxCoeff() <= 1e-12);

    const Eigen::VectorXd h_large = resolvent_solve(*chain, g, 1e6);
    const Eigen::VectorXd expected = g.values() / (1.0 + 1e6);
    CHECK((h_large - expected).cwiseAbs().maxCoeff() / expected.cwiseAbs().maxCoeff() < 1e-5);

    CHECK_THROWS_AS((void)resolvent_solve(*chain, g, 0.0), ConfigError);
}

TEST_CASE("resolvent residuals stay below 1e-10 on random chains") {
    RngStream rng(71, 0);
    for (int t = 0; t < 20; ++t) {
        auto chain = random_ergodic_chain(3 + t % 18, rng);
        const CenteredFunction g(*chain,
                                 random_vector(static_cast<int>(chain->n_states()), rng));
        for (double eps : {1e-3, 1e-2, 0.1, 1.0}) {
            const Eigen::VectorXd h = resolvent_solve(*chain, g, eps);
            const double residual =
                ((1.0 + eps) * h - chain->apply(h) - g.values()).cwiseAbs().maxCoeff();
            CHECK(residual <= 1e-10);
        }
    }
}

TEST_CASE("poisson_solve: eigen case, zero case, series check") {
    auto chain = two_state(0.25, 0.25);
    Eigen::VectorXd raw(2);
    raw << -0.5, 0.5;
    const CenteredFunction g(*chain, raw);
    const PoissonSolution sol = poisson_solve(*chain, g);
    CHECK(sol.residual <= 1e-10);
    CHECK(sol.h(0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(sol.h(1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sol.series_checked);
    CHECK(sol.series_gap <= 1e-8);
    CHECK_FALSE(sol.least_squares_fallback);

    const PoissonSolution zero = poisson_solve(*chain, CenteredFunction(*chain, Eigen::VectorXd::Zero(2)));
    CHECK(zero.h.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("poisson_solve handles the periodic two-cycle") {
    Eigen::MatrixXd P(2, 2);
    P << 0.0, 1.0, 1.0, 0.0;
    auto chain = FiniteChain::from_matrix(P);
    Eigen::VectorXd raw(2);
    raw << 1.0, -1.0;
    const CenteredFunction g(*chain, raw);
    const PoissonSolution sol = poisson_solve(*chain, g);
    CHECK(sol.residual <= 1e-10);
    // h - Qh = g with Qh(0) = h(1): h = (0.5, -0.5) up to constants.
    CHECK(sol.h(0) - sol.h(1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("epsilon-limit: resolvent approaches the Poisson solution") {
    RngStream rng(72, 0);
    for (int t = 0; t < 10; ++t) {
        auto chain = random_ergodic_chain(4 + t, rng);
        const CenteredFunction g(*chain,
                                 random_vector(static_cast<int>(chain->n_states()), rng));
        const PoissonSolution sol = poisson_solve(*chain, g);
        double prev_gap = 1e300;
        for (double eps : {1.0, 0.1, 0.01, 0.001}) {
            const double gap =
                (resolvent_solve(*chain, g, eps) - sol.h).cwiseAbs().maxCoeff();
            CHECK(gap <= prev_gap + 1e-12);
            prev_gap = gap;
        }
        CHECK(prev_gap <= 1e-2 * std::max(1.0, sol.h.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("ma_decompose reconstructs S_n and has martingale increments") {
    auto chain = two_state(0.25, 0.25);
    Eigen::VectorXd raw(2);
    raw << -0.5, 0.5;
    const CenteredFunction g(*chain, raw);
    auto kernel = make_finite_kernel(chain);

    const Trajectory traj = simulate(*kernel, State::scalar(0.0), 1000, RngStream(81, 0));
    const MaDecomposition dec = ma_decompose(*chain, g, traj);
    REQUIRE(dec.increments.size() == 1000);

    double s_n = 0.0, m_n = 0.0;
    for (std::size_t k = 1; k <= 1000; ++k) {
        const int state = static_cast<int>(traj.states[k].coords[0]);
        s_n += g.values()(state);
        m_n += dec.increments[k - 1];
        CHECK(std::fabs(s_n - (m_n + dec.remainders[k - 1])) <= 1e-10);
    }

    // E[m_k | X_{k-1} = i] = 0 per state, checked over 1e5 transitions.
    const Trajectory long_traj = simulate(*kernel, State::scalar(0.0), 100000, RngStream(82, 0));
    const MaDecomposition long_dec = ma_decompose(*chain, g, long_traj);
    double sum_per_state[2] = {0.0, 0.0};
    double sq_per_state[2] = {0.0, 0.0};
    std::size_t count_per_state[2] = {0, 0};
    for (std::size_t k = 1; k <= 100000; ++k) {
        const int prev = static_cast<int>(long_traj.states[k - 1].coords[0]);
        const double m = long_dec.increments[k - 1];
        sum_per_state[prev] += m;
        sq_per_state[prev] += m * m;
        ++count_per_state[prev];
    }
    for (int i = 0; i < 2; ++i) {
        const double n = static_cast<double>(count_per_state[i]);
        const double mean = sum_per_state[i] / n;
        const double var = sq_per_state[i] / n - mean * mean;
        CHECK(std::fabs(mean) <= 3.0 * std::sqrt(var / n));
    }

    // Remainder bound |R_n| <= 2 ||Qh||_inf.
    const PoissonSolution sol = poisson_solve(*chain, g);
    const double qh_inf = chain->apply(sol.h).cwiseAbs().maxCoeff();
    for (double r : long_dec.remainders) CHECK(r * r <= 4.0 * qh_inf * qh_inf + 1e-12);
}

TEST_CASE("asymptotic_variance: hand value, zero, iid chain") {
    auto chain = two_state(0.25, 0.25);
    Eigen::VectorXd raw(2);
    raw << 0.0, 1.0; // indicator(state 1), centered internally
    const CenteredFunction g(*chain, raw);
    CHECK(asymptotic_variance(*chain, g) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(std::fabs(asymptotic_variance(*chain, g) - autocov_variance(*chain, g, 200)) <= 1e-8);

    const CenteredFunction zero(*chain, Eigen::VectorXd::Zero(2));
    CHECK(asymptotic_variance(*chain, zero) == 0.0);

    // iid rows: sigma^2 reduces to Var_pi(g).
    RngStream rng(83, 0);
    Eigen::VectorXd pi(3);
    pi << 0.2, 0.5, 0.3;
    Eigen::MatrixXd P(3, 3);
    for (int i = 0; i < 3; ++i) P.row(i) = pi.transpose();
    auto iid = FiniteChain::from_matrix(P);
    const CenteredFunction gi(*iid, random_vector(3, rng));
    double var_pi = 0.0;
    for (int i = 0; i < 3; ++i) var_pi += pi(i) * gi.values()(i) * gi.values()(i);
    CHECK(asymptotic_variance(*iid, gi) == doctest::Approx(var_pi).epsilon(1e-12));
}

TEST_CASE("sigma^2 equals the martingale-increment second moment") {
    RngStream rng(85, 0);
    for (int t = 0; t < 10; ++t) {
        auto chain = random_ergodic_chain(3 + t, rng);
        const CenteredFunction g(*chain,
                                 random_vector(static_cast<int>(chain->n_states()), rng));
        const PoissonSolution sol = poisson_solve(*chain, g);
        const Eigen::VectorXd ph = chain->apply(sol.h);
        double m2 = 0.0; // E_{pi,Q} (h(X_1) - Qh(X_0))^2
        for (std::size_t i = 0; i < chain->n_states(); ++i) {
            for (std::size_t j = 0; j < chain->n_states(); ++j) {
                const double d = sol.h(static_cast<Eigen::Index>(j)) -
                                 ph(static_cast<Eigen::Index>(i));
                m2 += chain->pi()(static_cast<Eigen::Index>(i)) *
                      chain->P()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                      d * d;
            }
        }
        CHECK(asymptotic_variance(*chain, g) == doctest::Approx(m2).epsilon(1e-12));
    }
}

TEST_CASE("E_pi g^2 is exposed next to the general variance") {
    // The compact-chain CLT statement carries E_pi g^2; on correlated chains
    // it differs from the Poisson-based asymptotic variance.
    auto chain = two_state(0.25, 0.25);
    Eigen::VectorXd raw(2);
    raw << 0.0, 1.0;
    const CenteredFunction g(*chain, raw);
    CHECK(stationary_second_moment(*chain, g) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(asymptotic_variance(*chain, g) == doctest::Approx(0.75).epsilon(1e-12));

    // On an iid chain the two coincide.
    Eigen::VectorXd pi(3);
    pi << 0.2, 0.5, 0.3;
    Eigen::MatrixXd P(3, 3);
    for (int i = 0; i < 3; ++i) P.row(i) = pi.transpose();
    auto iid = FiniteChain::from_matrix(P);
    RngStream rng(86, 0);
    const CenteredFunction gi(*iid, random_vector(3, rng));
    CHECK(stationary_second_moment(*iid, gi) ==
          doctest::Approx(asymptotic_variance(*iid, gi)).epsilon(1e-12));
}

TEST_CASE("variance equivalence on random ergodic chains") {
    RngStream rng(84, 0);
    for (int t = 0; t < 20; ++t) {
        auto chain = random_ergodic_chain(2 + t % 9, rng);
        const CenteredFunction g(*chain,
                                 random_vector(static_cast<int>(chain->n_states()), rng));
        const PoissonSolution sol = poisson_solve(*chain, g);
        CHECK(sol.residual <= 1e-10);
        const double direct = asymptotic_variance(*chain, g);
        CHECK(std::fabs(direct - autocov_variance(*chain, g, 400)) <= 1e-8);
        CHECK(direct >= -1e-12);
    }
}
