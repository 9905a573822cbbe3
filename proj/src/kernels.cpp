#include "wavegame/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

namespace wavegame::kernels {

double interpolate(const UniformGrid& g, std::span<const double> v, double s) {
    const double x = (s - g.s_lo) / g.ds;
    if (x <= 0.0) return v.front();
    const double last = static_cast<double>(g.n - 1);
    if (x >= last) return v.back();
    const auto i = static_cast<std::size_t>(x);
    const double w = x - static_cast<double>(i);
    return (1.0 - w) * v[i] + w * v[i + 1];
}

namespace {

double bellman_node(const BellmanData& d, std::span<const double> v_old, std::size_t i, std::size_t& arg) {
    const double s = d.grid.node(i);
    double best = -INFINITY;
    for (std::size_t a = 0; a < d.controls.size(); ++a) {
        const double foot = s + d.dt * (d.controls[a] - d.c);
        const double val = d.weight * (d.reward[i] - d.control_cost[a]) + d.discount * interpolate(d.grid, v_old, foot);
        if (val > best) {
            best = val;
            arg = a;
        }
    }
    return best;
}

}  // namespace

double bellman_sweep(const BellmanData& d, std::span<const double> v_old, std::span<double> v_new,
                     std::span<std::size_t> policy, Exec exec) {
    const auto n = static_cast<long>(d.grid.n);
    double diff = 0.0;
    if (exec == Exec::Serial) {
        for (long i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            v_new[k] = bellman_node(d, v_old, k, policy[k]);
            diff = std::max(diff, std::abs(v_new[k] - v_old[k]));
        }
        return diff;
    }
#pragma omp parallel for schedule(static) reduction(max : diff)
    for (long i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        v_new[k] = bellman_node(d, v_old, k, policy[k]);
        diff = std::max(diff, std::abs(v_new[k] - v_old[k]));
    }
    return diff;
}

void reaction_step(std::span<double> theta, std::span<const double> m, const std::function<double(double)>& f,
                   double dt, Exec exec) {
    const auto n = static_cast<long>(theta.size());
    if (exec == Exec::Serial) {
        for (long i = 0; i < n; ++i) theta[i] += dt * (f(theta[i]) - m[i] * theta[i]);
        return;
    }
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) theta[i] += dt * (f(theta[i]) - m[i] * theta[i]);
}

std::vector<double> map_scan(const std::function<double(double)>& g, std::span<const double> xs, Exec exec) {
    std::vector<double> out(xs.size());
    const auto n = static_cast<long>(xs.size());
    if (exec == Exec::Serial) {
        for (long i = 0; i < n; ++i) out[i] = g(xs[i]);
        return out;
    }
    // Exceptions cannot cross the parallel region; rethrow the first one.
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        try {
            out[i] = g(xs[i]);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace wavegame::kernels
