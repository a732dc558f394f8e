#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "wclt/finite_chain.hpp"
#include "wclt/kernels.hpp"
#include "wclt/martingale.hpp"
#include "wclt/parallel.hpp"
#include "wclt/state.hpp"

namespace wclt {

class Grid1d; // discretize.hpp

// Lipschitz test function g for the CLT experiments.
class TestFunction {
  public:
    enum class Kind { coordinate, lipschitz_custom, indicator_smoothed };

    // g(x) = x[index] - center.
    static TestFunction coordinate(std::size_t index, double center);
    // Piecewise-linear interpolant (constant outside); the Lipschitz constant
    // is the maximum grid slope, recorded at construction.
    static TestFunction table(std::vector<double> xs, std::vector<double> ys);
    // Ramp from 0 below lo to 1 above hi; bounded, Lipschitz 1/(hi-lo).
    static TestFunction smoothed_indicator(double lo, double hi);

    Kind kind() const { return kind_; }
    double eval(const State& x) const;
    double eval(std::span<const double> coords) const; // allocation-free path
    double eval1(double x) const;                      // 1-d fast path
    double lipschitz() const { return lipschitz_; }

  private:
    TestFunction() = default;
    Kind kind_ = Kind::coordinate;
    std::size_t index_ = 0;
    double center_ = 0.0;
    double lo_ = 0.0, hi_ = 1.0;
    std::vector<double> xs_, ys_;
    double lipschitz_ = 1.0;
};

// ---------------------------------------------------------------------------
// Output-analysis estimators.
// ---------------------------------------------------------------------------

struct BatchMeansEstimate {
    std::size_t batches = 0;
    std::size_t batch_len = 0;
    double estimate = 0.0;
    double std_error = 0.0; // estimate * sqrt(2/(b-1))
};

// Asymptotic-variance estimate b*l-consistent: batch_len * Var(batch means).
// Requires b >= 20 and batch length >= 100 (remainder truncated).
BatchMeansEstimate batch_means(const std::vector<double>& values, std::size_t b);

enum class KsLevel { five_percent, one_percent };

struct KsResult {
    double statistic = 0.0;
    double critical = 0.0; // c(level)/sqrt(R), c = 1.358 (5%) / 1.628 (1%)
    bool pass = false;
};

// One-sample Kolmogorov-Smirnov test of `values` against N(0, sigma2).
// Requires sigma2 > 0 and at least 200 values.
KsResult ks_normality(std::vector<double> values, double sigma2, KsLevel level);

// ---------------------------------------------------------------------------
// Replicated CLT experiment.
// ---------------------------------------------------------------------------

// Normalized sums S_n/sqrt(n) per replicate, S_n summing g over the n+1
// states X_burnin .. X_burnin+n. Replicate r draws from stream stream0 + r;
// results are stored by replicate index, so serial and OpenMP execution agree
// bit for bit. Optionally accumulates the Metropolis acceptance rate.
std::vector<double> replicate_normalized_sums(const Kernel& kernel, const TestFunction& g,
                                              double center, const State& x0, std::size_t n,
                                              std::size_t burn_in, std::size_t replicates,
                                              std::uint64_t seed, std::uint64_t stream0,
                                              int threads, Exec exec,
                                              double* acceptance_rate = nullptr);

struct CltOptions {
    std::size_t n = 10000;
    std::size_t replicates = 2000;
    std::size_t burn_in = 0;
    std::optional<double> center;    // extra shift applied to g
    bool estimate_center = false;    // estimate the shift from a long run
    std::size_t center_run_length = 1000000;
    std::size_t bm_run_length = 0;   // 0: max(n, 100000)
    std::size_t bm_batches = 0;      // 0: floor(sqrt(length))
    std::optional<double> sigma2_reference;
    KsLevel level = KsLevel::one_percent;
    std::uint64_t seed = 1;
    int threads = 0;
    Exec exec = Exec::openmp;
};

// Stream layout per experiment: stream 0 centers g, stream 1 drives the
// batch-means run, streams 2 .. R+1 drive the replicates.
struct CltReport {
    std::size_t n = 0, replicates = 0, burn_in = 0;
    double center = 0.0;
    bool center_estimated = false;
    double center_std_error = 0.0;
    std::vector<double> replicate_values; // S_n/sqrt(n), ordered by stream id
    double replicate_mean = 0.0;
    double replicate_variance = 0.0; // sample variance
    BatchMeansEstimate batch;
    std::optional<double> sigma2_reference;
    double ks_sigma2 = 0.0; // reference when supplied, else batch means
    KsResult ks;
    bool degenerate = false; // all replicate values equal; no KS verdict
    std::optional<double> acceptance_rate;
    std::uint64_t seed = 0;
};

// Runs the full experiment. Throws VerdictError when replicates < 200 (no
// pass/fail verdict is issued below that) and ConfigError when g has no
// center and estimation was not requested.
CltReport run_clt_experiment(const Kernel& kernel, const TestFunction& g, const State& x0,
                             const CltOptions& opts);

// ---------------------------------------------------------------------------
// Remainder diagnostic E[R_n^2]/n.
// ---------------------------------------------------------------------------

// Candidate Poisson solution h and its one-step average Qh, evaluated at
// chain states.
struct HProxy {
    std::function<double(std::span<const double>)> h;
    std::function<double(std::span<const double>)> Qh;
};

// Exact proxy on a finite chain (states carried as indices).
HProxy finite_h_proxy(const FiniteChain& chain, const CenteredFunction& g);
// Same, but from an arbitrary candidate h vector (e.g. a resolvent solution).
HProxy finite_vector_proxy(const FiniteChain& chain, const Eigen::VectorXd& h);
// Grid-interpolated proxy for a 1-d continuous kernel discretized on `grid`.
HProxy grid_h_proxy(const FiniteChain& disc, const Grid1d& grid, const CenteredFunction& g);

struct RemainderDiagnostic {
    std::vector<std::size_t> ns;
    std::vector<double> r2_over_n; // Monte Carlo E[R_n^2]/n per checkpoint
    bool decreasing = false;       // strictly decreasing across checkpoints
};

// Monte Carlo estimates of E[R_n^2]/n with R_n = S_n - M_n, S_n summing the
// centered g over X_1..X_n and M_n the candidate martingale from the proxy.
RemainderDiagnostic remainder_diagnostic(const Kernel& kernel, const TestFunction& g,
                                         double center, const HProxy& proxy, const State& x0,
                                         const std::vector<std::size_t>& ns,
                                         std::size_t replicates, std::uint64_t seed,
                                         std::uint64_t stream0, int threads, Exec exec);

} // namespace wclt
