// Wall-clock comparison of the serial and OpenMP kernels, and of the
// pseudospectral nonlinear term against the direct convolution reference.
//
//   bench_kernels [n_grid] [repeats]

#include "impulsive/kernels.hpp"
#include "impulsive/ns2d.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

namespace {

using impulsive::kernels::cplx;
namespace k = impulsive::kernels;

template <class F>
double seconds_per_call(int repeats, F&& f) {
    f(); // warm-up
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < repeats; ++r) f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / repeats;
}

void row(const char* name, double serial, double omp) {
    std::printf("%-22s %12.3e %12.3e %8.2fx\n", name, serial, omp, serial / omp);
}

}  // namespace

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 256;
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 20;
    if (n < 8 || n % 2 != 0 || repeats < 1) {
        std::fprintf(stderr, "usage: bench_kernels [even n_grid >= 8] [repeats >= 1]\n");
        return 2;
    }
    const std::size_t pts = static_cast<std::size_t>(n) * n;
    std::mt19937_64 rng(42);
    std::normal_distribution<double> normal;
    auto random_grid = [&] {
        std::vector<cplx> v(pts);
        for (auto& z : v) z = {normal(rng), normal(rng)};
        return v;
    };
    std::vector<double> lambda(pts), in(pts), out(pts);
    for (std::size_t i = 0; i < pts; ++i) {
        lambda[i] = static_cast<double>(i % 977) * 0.01;
        in[i] = normal(rng);
    }
    const auto vel = random_grid(), g1 = random_grid(), g2 = random_grid();
    std::vector<cplx> w(pts), a = random_grid(), b = random_grid();

    std::printf("grid %d x %d, %d threads, %d repeats (seconds per call)\n", n, n,
                omp_get_max_threads(), repeats);
    std::printf("%-22s %12s %12s %9s\n", "kernel", "serial", "openmp", "speedup");
    row("diag_exp_scale",
        seconds_per_call(repeats, [&] { k::serial::diag_exp_scale(lambda, 0.3, in, out); }),
        seconds_per_call(repeats, [&] { k::omp::diag_exp_scale(lambda, 0.3, in, out); }));
    row("advect_pointwise",
        seconds_per_call(repeats, [&] { k::serial::advect_pointwise(vel, g1, g2, w); }),
        seconds_per_call(repeats, [&] { k::omp::advect_pointwise(vel, g1, g2, w); }));
    row("leray_project",
        seconds_per_call(repeats, [&] { k::serial::leray_project(n, a, b); }),
        seconds_per_call(repeats, [&] { k::omp::leray_project(n, a, b); }));
    row("tanh_pointwise",
        seconds_per_call(repeats, [&] { k::serial::tanh_pointwise(1.0, vel, w); }),
        seconds_per_call(repeats, [&] { k::omp::tanh_pointwise(1.0, vel, w); }));

    // The direct sum is O(modes^2); keep it to a small grid.
    const int n_small = 32;
    impulsive::ns2d::TorusGrid grid(n_small);
    const auto u = impulsive::ns2d::random_divfree(grid, 1, 0.5);
    const auto v = impulsive::ns2d::random_divfree(grid, 2, 0.5);
    const double fft = seconds_per_call(repeats, [&] { (void)impulsive::ns2d::nonlinear_term(grid, 1.0, u, v); });
    const double direct =
        seconds_per_call(1, [&] { (void)impulsive::ns2d::nonlinear_term_reference(grid, 1.0, u, v); });
    std::printf("\nnonlinear term, n_modes=%d: direct sum %.3e s, pseudospectral %.3e s (%.1fx)\n",
                n_small, direct, fft, direct / fft);
    return 0;
}
