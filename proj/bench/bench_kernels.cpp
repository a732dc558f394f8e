// Timing comparison of the OpenMP kernels against their serial references.
// The two paths must agree bit for bit; this binary checks that too and
// reports the speedup.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "wclt/clt.hpp"
#include "wclt/conditions.hpp"
#include "wclt/kernels.hpp"
#include "wclt/wasserstein.hpp"

using namespace wclt;

namespace {

double time_ms(const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(t1 - t0)
        .count();
}

void row(const char* name, double serial_ms, double omp_ms, bool identical) {
    std::printf("%-28s %10.1f ms %10.1f ms %8.2fx %s\n", name, serial_ms, omp_ms,
                serial_ms / omp_ms, identical ? "identical" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    int threads = 0; // 0 = all cores
    if (argc > 2 && std::string(argv[1]) == "--threads") threads = std::atoi(argv[2]);

    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

    {
        auto kernel = make_bernoulli_ar1_kernel(BernoulliAr1Params(0.5));
        const TestFunction g = TestFunction::coordinate(0, 0.5);
        const State x0 = State::scalar(0.0);
        std::vector<double> serial, parallel;
        const double t_serial = time_ms([&] {
            serial = replicate_normalized_sums(*kernel, g, 0.0, x0, 20000, 0, 512, 1, 2, 1,
                                               Exec::serial);
        });
        const double t_omp = time_ms([&] {
            parallel = replicate_normalized_sums(*kernel, g, 0.0, x0, 20000, 0, 512, 1, 2,
                                                 threads, Exec::openmp);
        });
        row("clt replicate sums", t_serial, t_omp, serial == parallel);
    }

    {
        auto kernel =
            make_ula_kernel(UlaParams(QuadraticTarget{Eigen::MatrixXd::Identity(1, 1)}, 0.1));
        const State x = State::scalar(-5.0), y = State::scalar(5.0);
        std::vector<double> serial, parallel;
        const double t_serial = time_ms([&] {
            serial = coupled_mean_distances(*kernel, x, y, 200, 2000, 1, 0, 1, Exec::serial);
        });
        const double t_omp = time_ms([&] {
            parallel =
                coupled_mean_distances(*kernel, x, y, 200, 2000, 1, 0, threads, Exec::openmp);
        });
        row("coupled mean distances", t_serial, t_omp, serial == parallel);
    }

    {
        const NarParams p(0.5, SSpec::neg_sin(), NoiseSpec::gaussian(1.0));
        // Densify the default grid to give the sup evaluation some weight.
        std::vector<std::pair<double, double>> grid;
        for (double x = -20.0; x <= 20.0; x += 0.05) {
            for (double off : {1e-3, 0.5, 1.0, 2.0, 5.0}) grid.emplace_back(x, x + off);
        }
        C1Report serial, parallel;
        const double t_serial =
            time_ms([&] { serial = check_C1(p, default_r_grid(), grid, 1, Exec::serial); });
        const double t_omp =
            time_ms([&] { parallel = check_C1(p, default_r_grid(), grid, threads, Exec::openmp); });
        row("condition C1 grid sups", t_serial, t_omp,
            serial.sup_per_r == parallel.sup_per_r && serial.zeta_sup == parallel.zeta_sup);
    }

    return 0;
}
