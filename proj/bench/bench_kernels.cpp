// Serial vs OpenMP timings for the three parallel kernels; also checks that
// both paths agree.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include <omp.h>

#include "wavegame/kernels.hpp"
#include "wavegame/phase_plane.hpp"
#include "wavegame/wave_builder.hpp"

using namespace wavegame;
using kernels::Exec;

namespace {

template <class F>
double best_of(int reps, F&& body) {
    double best = INFINITY;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        body();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void report(const char* name, double serial, double parallel, double mismatch) {
    std::printf("%-16s serial %9.4f s  parallel %9.4f s  speedup %5.2fx  max|diff| %.1e\n", name, serial, parallel,
                serial / parallel, mismatch);
}

}  // namespace

int main() {
    std::printf("threads: %d\n", omp_get_max_threads());

    {
        kernels::BellmanData d;
        d.grid = {-20.0, 0.01, 4001};
        d.c = 0.05;
        std::vector<double> reward, controls, cost;
        for (std::size_t i = 0; i < d.grid.n; ++i) reward.push_back(0.5 * (1.0 + std::tanh(d.grid.node(i))));
        for (int j = -200; j <= 200; ++j) {
            const double a = d.c + j * 0.015;
            controls.push_back(a);
            cost.push_back(0.5 * a * a);
        }
        d.reward = reward;
        d.controls = controls;
        d.control_cost = cost;
        d.dt = 0.5 * 0.01 / 3.0;
        d.discount = std::exp(-0.79 * d.dt);
        d.weight = (1.0 - d.discount) / 0.79;
        std::vector<double> v(d.grid.n), a(d.grid.n), b(d.grid.n);
        for (std::size_t i = 0; i < d.grid.n; ++i) v[i] = d.reward[i] / 0.79;
        std::vector<std::size_t> pa(d.grid.n), pb(d.grid.n);
        const double ts = best_of(3, [&] { kernels::bellman_sweep(d, v, a, pa, Exec::Serial); });
        const double tp = best_of(3, [&] { kernels::bellman_sweep(d, v, b, pb, Exec::Parallel); });
        double diff = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
        report("bellman_sweep", ts, tp, diff);
    }

    {
        const auto f = cubic(0.3);
        const std::size_t n = 2'000'000;
        std::vector<double> base(n), m(n, 0.05);
        for (std::size_t i = 0; i < n; ++i) base[i] = static_cast<double>(i) / static_cast<double>(n);
        std::vector<double> a = base, b = base;
        const double ts = best_of(3, [&] {
            a = base;
            kernels::reaction_step(a, m, f.f, 1e-3, Exec::Serial);
        });
        const double tp = best_of(3, [&] {
            b = base;
            kernels::reaction_step(b, m, f.f, 1e-3, Exec::Parallel);
        });
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
        report("reaction_step", ts, tp, diff);
    }

    {
        const auto f = cubic(0.3);
        std::vector<double> cs;
        for (int i = 0; i < 24; ++i) cs.push_back(1e-3 * std::pow(20.0 / 1e-3, i / 23.0));
        const std::function<double(double)> g = [&f](double c) { return gamma0_extrema(f, c).gamma0_prime_max; };
        std::vector<double> a, b;
        const double ts = best_of(1, [&] { a = kernels::map_scan(g, cs, Exec::Serial); });
        const double tp = best_of(1, [&] { b = kernels::map_scan(g, cs, Exec::Parallel); });
        double diff = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
        report("map_scan (c)", ts, tp, diff);
    }
    return 0;
}
