#include <doctest.h>

#include <cmath>

#include "wclt/conditions.hpp"
#include "wclt/errors.hpp"
#include "wclt/wasserstein.hpp"

using namespace wclt;

namespace {

NarParams neg_sin_nar(double a = 0.5, double sigma = 1.0) {
    return NarParams(a, SSpec::neg_sin(), NoiseSpec::gaussian(sigma));
}

} // namespace

// ---------------------------------------------------------------------------
// H
// ---------------------------------------------------------------------------

TEST_CASE("check_H finds a witness for -sin and verifies it") {
    const SSpec s = SSpec::neg_sin();
    const HReport rep = check_H(s, 0.5, default_nar_point_grid());
    REQUIRE(rep.holds);
    REQUIRE(rep.witness.has_value());

    // Soundness: re-evaluate the witness independently.
    const HWitness& w = *rep.witness;
    if (w.kind == HWitness::Kind::pair_quotient) {
        const double slope = (s.value(w.x) - s.value(w.y)) / (w.x - w.y);
        if (w.threshold >= 0.0) {
            CHECK(slope >= w.threshold);
        } else {
            CHECK(slope <= w.threshold);
        }
    } else {
        CHECK(s.derivative(w.x) >= 1.0);
        CHECK(-std::cos(w.x) >= 1.0);
    }
}

TEST_CASE("check_H is inconclusive for a flat nonlinearity") {
    const SSpec flat = SSpec::affine_cap(0.0, 1.0);
    const HReport rep = check_H(flat, 0.5, default_nar_point_grid());
    CHECK_FALSE(rep.holds);
    CHECK(rep.inconclusive);
}

TEST_CASE("check_H certifies a capped slope-2 segment by a pair quotient") {
    const SSpec steep = SSpec::affine_cap(2.0, 5.0);
    const HReport rep = check_H(steep, 0.5, {-1.0, -0.5, 0.0, 0.5, 1.0});
    REQUIRE(rep.holds);
    REQUIRE(rep.witness.has_value());
    CHECK(rep.witness->value >= 2.0 - 1e-12);
}

// ---------------------------------------------------------------------------
// C1 / C2 evidence
// ---------------------------------------------------------------------------

TEST_CASE("check_C1 holds for the -sin example and zeta stays below 1") {
    const NarParams p = neg_sin_nar();
    const C1Report rep = check_C1(p, default_r_grid(), default_nar_pair_grid());
    CHECK(rep.holds);
    CHECK(rep.best_sup < 1.0);
    CHECK(rep.best_r > 0.0);
    CHECK(rep.best_r < 1.0);
    CHECK(rep.zeta_sup <= 1.0 + 1e-12);
    CHECK(rep.grid_evidence_only);
}

TEST_CASE("check_C1 fails when zeta and kappa exceed 1 together") {
    // Steep nonlinearity and huge noise variance: near the origin zeta ~ 2.5
    // and kappa >> 1 at the same pair, so the product beats 1 for every r.
    const NarParams p(0.5, SSpec::affine_cap(4.0, 100.0), NoiseSpec::gaussian(1000.0));
    const C1Report rep = check_C1(p, default_r_grid(), default_nar_pair_grid());
    CHECK_FALSE(rep.holds);
    CHECK(rep.best_sup >= 1.0);
}

TEST_CASE("enlarging the pair grid never decreases the reported sup") {
    const NarParams p = neg_sin_nar();
    std::vector<std::pair<double, double>> small_grid, big_grid;
    for (double x = -4.0; x <= 4.0; x += 1.0) {
        for (double y = -4.0; y <= 4.0; y += 1.0) {
            if (x < y) small_grid.emplace_back(x, y);
        }
    }
    big_grid = small_grid;
    for (double x = -6.0; x <= 6.0; x += 0.5) big_grid.emplace_back(x, x + 0.25);
    const std::vector<double> r_grid = default_r_grid();
    const C1Report small_rep = check_C1(p, r_grid, small_grid);
    const C1Report big_rep = check_C1(p, r_grid, big_grid);
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        CHECK(big_rep.sup_per_r[i] >= small_rep.sup_per_r[i]);
    }
}

TEST_CASE("C1 grid sups agree between serial and OpenMP execution") {
    const NarParams p = neg_sin_nar();
    const auto grid = default_nar_pair_grid();
    const C1Report serial = check_C1(p, default_r_grid(), grid, 1, Exec::serial);
    const C1Report parallel = check_C1(p, default_r_grid(), grid, 4, Exec::openmp);
    for (std::size_t i = 0; i < serial.sup_per_r.size(); ++i) {
        CHECK(serial.sup_per_r[i] == parallel.sup_per_r[i]);
    }
    CHECK(serial.zeta_sup == parallel.zeta_sup);
}

// ---------------------------------------------------------------------------
// ULA constants
// ---------------------------------------------------------------------------

TEST_CASE("ula_constants on the identity quadratic") {
    UlaParams p(QuadraticTarget{Eigen::MatrixXd::Identity(1, 1)}, 0.1);
    const UlaContractionCert cert = ula_constants(p);
    CHECK(cert.L == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(cert.M == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(cert.h_max == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(cert.gamma(0.1) == doctest::Approx(0.9).epsilon(1e-14));
}

TEST_CASE("ula_constants on a logistic with empty design") {
    UlaParams p(LogisticTarget{Eigen::MatrixXd::Zero(0, 2), Eigen::VectorXd::Zero(0),
                               2.0 * Eigen::MatrixXd::Identity(2, 2)},
                0.1);
    const UlaContractionCert cert = ula_constants(p);
    CHECK(cert.L == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(cert.M == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("logistic constants match a closed-form 2x2 eigen oracle") {
    Eigen::MatrixXd X(4, 2);
    X << 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, -1.0;
    Eigen::VectorXd y(4);
    y << 1.0, 0.0, 1.0, 0.0;
    Eigen::MatrixXd G(2, 2);
    G << 2.0, 0.5, 0.5, 3.0;
    UlaParams p(LogisticTarget{X, y, G}, 0.1);
    const UlaContractionCert cert = ula_constants(p);

    auto eig2 = [](const Eigen::MatrixXd& M) {
        const double tr2 = 0.5 * (M(0, 0) + M(1, 1));
        const double disc = std::sqrt(0.25 * (M(0, 0) - M(1, 1)) * (M(0, 0) - M(1, 1)) +
                                      M(0, 1) * M(0, 1));
        return std::pair<double, double>{tr2 - disc, tr2 + disc};
    };
    const auto [gmin, gmax] = eig2(G);
    const auto [xmin, xmax] = eig2(X.transpose() * X);
    CHECK(cert.L == doctest::Approx(0.5 * gmax + 0.25 * xmax).epsilon(1e-8));
    CHECK(cert.M == doctest::Approx(0.5 * gmin).epsilon(1e-8));
    CHECK(cert.M <= cert.L);
}

TEST_CASE("gamma(h) algebra: square identity, boundary, interior") {
    Eigen::MatrixXd A(2, 2);
    A << 3.0, 0.4, 0.4, 1.5;
    UlaParams p(QuadraticTarget{A}, 0.1);
    const UlaContractionCert cert = ula_constants(p);
    CHECK(cert.M <= cert.L);
    for (double h : {0.01, 0.05, 0.1, 0.2}) {
        const double g = cert.gamma(h);
        CHECK(g * g == doctest::Approx(1.0 + h * h * cert.L * cert.L - 2.0 * h * cert.M)
                           .epsilon(1e-14));
        if (h < cert.h_max) CHECK(g < 1.0);
    }
    CHECK(cert.gamma(cert.h_max) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("quadratic cert gamma matches the coupling estimate when L = M") {
    UlaParams p(QuadraticTarget{Eigen::MatrixXd::Identity(1, 1)}, 0.1);
    const UlaContractionCert cert = ula_constants(p);
    auto kernel = make_ula_kernel(p);
    ContractionOptions opts;
    opts.steps = 8;
    opts.replicates = 100;
    opts.seed = 31;
    opts.exec = Exec::serial;
    const auto est = estimate_contraction(*kernel, default_pair_lattice(-5.0, 5.0), opts);
    CHECK(std::fabs(cert.gamma(0.1) - est.gamma_hat) <= 1e-10);
}

TEST_CASE("power-iteration path agrees with a dense oracle above p = 64") {
    const int n = 80;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    RngStream rng(55, 0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double v = rng.gaussian();
            M(i, j) = v;
            M(j, i) = v;
        }
    }
    const auto [lmin, lmax] = extreme_eigenvalues_sym(M);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    CHECK(lmax == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-8));
    CHECK(lmin == doctest::Approx(es.eigenvalues().minCoeff()).epsilon(1e-8));
}

// ---------------------------------------------------------------------------
// Moment evidence
// ---------------------------------------------------------------------------

TEST_CASE("check_A2 with constant Lambda is exact") {
    auto kernel = make_bernoulli_ar1_kernel(BernoulliAr1Params(0.5));
    const MomentReport rep = check_A2(LambdaSpec::bounded_one(), *kernel, State::scalar(0.0),
                                      100, 10000, RngStream(61, 0));
    CHECK(rep.estimate == 1.0);
    CHECK(rep.evidence_finite);
    CHECK_FALSE(rep.diverged);
}

TEST_CASE("check_A2 drift Lambda for the -sin chain is stably finite") {
    const NarParams p = neg_sin_nar();
    auto kernel = make_nar_kernel(p);
    const MomentReport rep = check_A2(LambdaSpec::nar_drift(p, 0.9), *kernel, State::scalar(0.0),
                                      1000, 200000, RngStream(62, 0));
    CHECK(rep.evidence_finite);
    CHECK(rep.estimate > 0.0);
    CHECK_FALSE(rep.diverged);
}

TEST_CASE("divergent ULA probe reports unstable") {
    // h beyond 2M/L^2 = 2: the linear recursion has factor |1 - h| > 1.
    UlaParams p(QuadraticTarget{Eigen::MatrixXd::Identity(1, 1)}, 2.5);
    auto kernel = make_ula_kernel(p);
    const MomentReport rep = check_P2(*kernel, Metric::euclidean(), State::scalar(1.0), 0, 100000,
                                      RngStream(63, 0));
    CHECK_FALSE(rep.evidence_finite);
    CHECK(rep.diverged);
}

TEST_CASE("check_P2 on the compact bernoulli chain is bounded by 1") {
    auto kernel = make_bernoulli_ar1_kernel(BernoulliAr1Params(1.0 / 3.0));
    const MomentReport rep = check_P2(*kernel, Metric::euclidean(), State::scalar(0.0), 1000,
                                      100000, RngStream(64, 0));
    CHECK(rep.evidence_finite);
    CHECK(rep.estimate <= 1.0);
}

TEST_CASE("check_P2 on an admissible logistic ULA is stably finite") {
    Eigen::MatrixXd X(4, 2);
    X << 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, -1.0;
    Eigen::VectorXd y(4);
    y << 1.0, 0.0, 1.0, 0.0;
    Eigen::MatrixXd G(2, 2);
    G << 2.0, 0.0, 0.0, 3.0;
    UlaParams p(LogisticTarget{X, y, G}, 0.05);
    REQUIRE(0.05 < ula_constants(p).h_max);
    auto kernel = make_ula_kernel(p);
    const MomentReport rep = check_P2(*kernel, Metric::euclidean(),
                                      State(std::vector<double>{0.0, 0.0}), 1000, 100000,
                                      RngStream(65, 0));
    CHECK(rep.evidence_finite);
    CHECK_FALSE(rep.diverged);
}

TEST_CASE("gc-distance Lambda averages metric distances to a pi sample") {
    std::vector<State> sample{State::scalar(0.0), State::scalar(1.0)};
    const LambdaSpec lambda = LambdaSpec::gc_distance(std::move(sample), Metric::euclidean());
    CHECK(lambda(State::scalar(0.5)) == 0.5);
    CHECK(lambda(State::scalar(2.0)) == 1.5);
}
