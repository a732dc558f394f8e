#include "wclt/clt.hpp"

#include <algorithm>
#include <cmath>

#include "wclt/discretize.hpp"
#include "wclt/rng.hpp"

namespace wclt {

// ---------------------------------------------------------------------------
// TestFunction
// ---------------------------------------------------------------------------

TestFunction TestFunction::coordinate(std::size_t index, double center) {
    TestFunction g;
    g.kind_ = Kind::coordinate;
    g.index_ = index;
    g.center_ = center;
    g.lipschitz_ = 1.0;
    return g;
}

TestFunction TestFunction::table(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() < 2 || xs.size() != ys.size()) {
        throw ConfigError("table test function needs >= 2 matching grid points");
    }
    if (!std::is_sorted(xs.begin(), xs.end())) {
        throw ConfigError("table test function grid must be sorted");
    }
    TestFunction g;
    g.kind_ = Kind::lipschitz_custom;
    g.xs_ = std::move(xs);
    g.ys_ = std::move(ys);
    double lip = 0.0;
    for (std::size_t i = 1; i < g.xs_.size(); ++i) {
        const double dx = g.xs_[i] - g.xs_[i - 1];
        if (!(dx > 0.0)) throw ConfigError("table test function grid must be strictly increasing");
        lip = std::max(lip, std::fabs(g.ys_[i] - g.ys_[i - 1]) / dx);
    }
    g.lipschitz_ = lip;
    return g;
}

TestFunction TestFunction::smoothed_indicator(double lo, double hi) {
    if (!(hi > lo)) throw ConfigError("smoothed indicator needs hi > lo");
    TestFunction g;
    g.kind_ = Kind::indicator_smoothed;
    g.lo_ = lo;
    g.hi_ = hi;
    g.lipschitz_ = 1.0 / (hi - lo);
    return g;
}

double TestFunction::eval1(double x) const {
    switch (kind_) {
        case Kind::coordinate:
            return x - center_;
        case Kind::indicator_smoothed:
            if (x <= lo_) return 0.0;
            if (x >= hi_) return 1.0;
            return (x - lo_) / (hi_ - lo_);
        case Kind::lipschitz_custom: {
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

double TestFunction::eval(std::span<const double> coords) const {
    if (kind_ == Kind::coordinate) {
        if (index_ >= coords.size()) throw ConfigError("test function index out of range");
        return coords[index_] - center_;
    }
    if (coords.size() != 1) {
        throw ConfigError("1-d test function applied to a multi-dimensional state");
    }
    return eval1(coords[0]);
}

double TestFunction::eval(const State& x) const {
    return eval(std::span<const double>(x.coords));
}

// ---------------------------------------------------------------------------
// Batch means and KS
// ---------------------------------------------------------------------------

BatchMeansEstimate batch_means(const std::vector<double>& values, std::size_t b) {
    if (b < 20) throw ConfigError("batch means needs b >= 20");
    const std::size_t len = values.size() / b;
    if (len < 100) throw ConfigError("batch means needs batch length >= 100");
    BatchMeansEstimate est;
    est.batches = b;
    est.batch_len = len;
    std::vector<double> means(b, 0.0);
    for (std::size_t i = 0; i < b; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < len; ++k) s += values[i * len + k];
        means[i] = s / static_cast<double>(len);
    }
    double grand = 0.0;
    for (double m : means) grand += m;
    grand /= static_cast<double>(b);
    double var = 0.0;
    for (double m : means) var += (m - grand) * (m - grand);
    var /= static_cast<double>(b - 1);
    est.estimate = static_cast<double>(len) * var;
    est.std_error = est.estimate * std::sqrt(2.0 / static_cast<double>(b - 1));
    return est;
}

KsResult ks_normality(std::vector<double> values, double sigma2, KsLevel level) {
    if (!(sigma2 > 0.0)) throw ConfigError("ks_normality needs sigma2 > 0");
    if (values.size() < 200) throw ConfigError("ks_normality needs at least 200 values");
    std::sort(values.begin(), values.end());
    const double sigma = std::sqrt(sigma2);
    const double r = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double f = normal_cdf(values[i] / sigma);
        const double lo = static_cast<double>(i) / r;
        const double hi = static_cast<double>(i + 1) / r;
        d = std::max(d, std::max(f - lo, hi - f));
    }
    KsResult res;
    res.statistic = d;
    const double c = level == KsLevel::one_percent ? 1.628 : 1.358;
    res.critical = c / std::sqrt(r);
    res.pass = d < res.critical;
    return res;
}

// ---------------------------------------------------------------------------
// Replicated experiment
// ---------------------------------------------------------------------------

std::vector<double> replicate_normalized_sums(const Kernel& kernel, const TestFunction& g,
                                              double center, const State& x0, std::size_t n,
                                              std::size_t burn_in, std::size_t replicates,
                                              std::uint64_t seed, std::uint64_t stream0,
                                              int threads, Exec exec, double* acceptance_rate) {
    if (n < 1) throw ConfigError("replicate run needs n >= 1");
    if (replicates < 1) throw ConfigError("replicate run needs replicates >= 1");
    if (x0.dimension() != kernel.dimension()) {
        throw ConfigError("replicate run: start dimension does not match kernel");
    }
    std::vector<double> values(replicates, 0.0);
    std::vector<double> accepted(replicates, 0.0);
    parallel_for(replicates, threads, exec, [&](std::size_t r) {
        RngStream rng(seed, stream0 + r);
        std::vector<double> coords = x0.coords;
        const std::span<double> x(coords);
        for (std::size_t k = 0; k < burn_in; ++k) kernel.step(x, rng);
        double sum = g.eval(std::span<const double>(coords)) - center;
        std::size_t acc = 0;
        for (std::size_t k = 0; k < n; ++k) {
            acc += kernel.step(x, rng) ? 1 : 0;
            sum += g.eval(std::span<const double>(coords)) - center;
        }
        values[r] = sum / std::sqrt(static_cast<double>(n));
        accepted[r] = static_cast<double>(acc) / static_cast<double>(n);
    });
    if (acceptance_rate != nullptr) {
        double total = 0.0;
        for (double a : accepted) total += a;
        *acceptance_rate = total / static_cast<double>(replicates);
    }
    return values;
}

namespace {

// Long single run collecting centered g-values; stream is fixed by caller.
std::vector<double> collect_g_values(const Kernel& kernel, const TestFunction& g, double center,
                                     const State& x0, std::size_t burn_in, std::size_t length,
                                     RngStream rng) {
    std::vector<double> out;
    out.reserve(length);
    std::vector<double> coords = x0.coords;
    const std::span<double> x(coords);
    for (std::size_t k = 0; k < burn_in; ++k) kernel.step(x, rng);
    for (std::size_t k = 0; k < length; ++k) {
        kernel.step(x, rng);
        out.push_back(g.eval(std::span<const double>(coords)) - center);
    }
    return out;
}

double sample_variance(const std::vector<double>& v, double* mean_out) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(v.size() - 1);
    if (mean_out != nullptr) *mean_out = mean;
    return var;
}

} // namespace

CltReport run_clt_experiment(const Kernel& kernel, const TestFunction& g, const State& x0,
                             const CltOptions& opts) {
    if (opts.replicates < 200) {
        throw VerdictError("R >= 200 required for a CLT verdict");
    }
    if (!opts.center.has_value() && !opts.estimate_center) {
        throw ConfigError("g is not centered: supply a center or request estimation");
    }

    CltReport rep;
    rep.n = opts.n;
    rep.replicates = opts.replicates;
    rep.burn_in = opts.burn_in;
    rep.seed = opts.seed;
    rep.sigma2_reference = opts.sigma2_reference;

    // Stream 0: centering run. The estimate targets E_pi[g] itself, so any
    // supplied center is superseded.
    if (opts.estimate_center) {
        const std::vector<double> raw = collect_g_values(
            kernel, g, 0.0, x0, std::max<std::size_t>(opts.burn_in, 1000), opts.center_run_length,
            RngStream(opts.seed, 0));
        double mean = 0.0;
        sample_variance(raw, &mean);
        rep.center = mean;
        rep.center_estimated = true;
        const std::size_t b = std::max<std::size_t>(
            20, static_cast<std::size_t>(std::sqrt(static_cast<double>(raw.size()))));
        const BatchMeansEstimate bm = batch_means(raw, b);
        rep.center_std_error = std::sqrt(bm.estimate / static_cast<double>(raw.size()));
    } else {
        rep.center = *opts.center;
    }

    // Streams 2..R+1: replicates.
    double acc_rate = 0.0;
    rep.replicate_values = replicate_normalized_sums(
        kernel, g, rep.center, x0, opts.n, opts.burn_in, opts.replicates, opts.seed, 2,
        opts.threads, opts.exec, &acc_rate);
    if (kernel.family() == Family::ei_mala) rep.acceptance_rate = acc_rate;
    rep.replicate_variance = sample_variance(rep.replicate_values, &rep.replicate_mean);

    // Stream 1: batch-means run.
    const std::size_t bm_len =
        opts.bm_run_length > 0 ? opts.bm_run_length : std::max<std::size_t>(opts.n, 100000);
    const std::vector<double> series =
        collect_g_values(kernel, g, rep.center, x0, opts.burn_in, bm_len, RngStream(opts.seed, 1));
    const std::size_t b =
        opts.bm_batches > 0
            ? opts.bm_batches
            : std::max<std::size_t>(20, static_cast<std::size_t>(
                                            std::sqrt(static_cast<double>(series.size()))));
    rep.batch = batch_means(series, b);

    rep.ks_sigma2 = opts.sigma2_reference.value_or(rep.batch.estimate);
    if (rep.replicate_variance < 1e-300 || !(rep.ks_sigma2 > 0.0)) {
        rep.degenerate = true;
        return rep;
    }
    rep.ks = ks_normality(rep.replicate_values, rep.ks_sigma2, opts.level);
    return rep;
}

// ---------------------------------------------------------------------------
// Remainder diagnostic
// ---------------------------------------------------------------------------

HProxy finite_h_proxy(const FiniteChain& chain, const CenteredFunction& g) {
    const PoissonSolution sol = poisson_solve(chain, g);
    return finite_vector_proxy(chain, sol.h);
}

HProxy finite_vector_proxy(const FiniteChain& chain, const Eigen::VectorXd& h) {
    const Eigen::VectorXd qh = chain.apply(h);
    auto index_of = [n = chain.n_states()](std::span<const double> s) {
        const int i = static_cast<int>(std::llround(s[0]));
        if (i < 0 || i >= static_cast<int>(n)) throw ConfigError("state outside finite chain");
        return i;
    };
    HProxy proxy;
    proxy.h = [h, index_of](std::span<const double> s) { return h(index_of(s)); };
    proxy.Qh = [qh, index_of](std::span<const double> s) { return qh(index_of(s)); };
    return proxy;
}

HProxy grid_h_proxy(const FiniteChain& disc, const Grid1d& grid, const CenteredFunction& g) {
    const PoissonSolution sol = poisson_solve(disc, g);
    const Eigen::VectorXd qh = disc.apply(sol.h);
    HProxy proxy;
    proxy.h = [grid, h = sol.h](std::span<const double> s) { return grid.interpolate(h, s[0]); };
    proxy.Qh = [grid, qh](std::span<const double> s) { return grid.interpolate(qh, s[0]); };
    return proxy;
}

RemainderDiagnostic remainder_diagnostic(const Kernel& kernel, const TestFunction& g,
                                         double center, const HProxy& proxy, const State& x0,
                                         const std::vector<std::size_t>& ns,
                                         std::size_t replicates, std::uint64_t seed,
                                         std::uint64_t stream0, int threads, Exec exec) {
    if (ns.empty() || replicates < 1) {
        throw ConfigError("remainder diagnostic needs checkpoints and replicates");
    }
    if (!std::is_sorted(ns.begin(), ns.end())) {
        throw ConfigError("remainder diagnostic checkpoints must be sorted");
    }
    const std::size_t n_max = ns.back();
    std::vector<std::vector<double>> r2(replicates, std::vector<double>(ns.size(), 0.0));
    parallel_for(replicates, threads, exec, [&](std::size_t r) {
        RngStream rng(seed, stream0 + r);
        std::vector<double> coords = x0.coords;
        const std::span<double> x(coords);
        const std::span<const double> cx(coords);
        double s_n = 0.0, m_n = 0.0;
        std::size_t next = 0;
        for (std::size_t k = 1; k <= n_max; ++k) {
            const double qh_prev = proxy.Qh(cx);
            kernel.step(x, rng);
            s_n += g.eval(cx) - center;
            m_n += proxy.h(cx) - qh_prev;
            if (next < ns.size() && k == ns[next]) {
                const double rn = s_n - m_n;
                r2[r][next] = rn * rn;
                ++next;
            }
        }
    });
    RemainderDiagnostic diag;
    diag.ns = ns;
    diag.r2_over_n.assign(ns.size(), 0.0);
    for (std::size_t j = 0; j < ns.size(); ++j) {
        double mean = 0.0;
        for (std::size_t r = 0; r < replicates; ++r) mean += r2[r][j];
        mean /= static_cast<double>(replicates);
        diag.r2_over_n[j] = mean / static_cast<double>(ns[j]);
    }
    diag.decreasing = true;
    for (std::size_t j = 1; j < ns.size(); ++j) {
        if (!(diag.r2_over_n[j] < diag.r2_over_n[j - 1])) diag.decreasing = false;
    }
    return diag;
}

} // namespace wclt
