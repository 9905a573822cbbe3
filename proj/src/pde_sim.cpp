#include "wavegame/pde_sim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include "wavegame/error.hpp"
#include "wavegame/numerics.hpp"

namespace wavegame {

Grid1D Grid1D::uniform(double x_lo, double x_hi, double dx, double dt, bool implicit) {
    if (!(x_hi > x_lo)) throw ConfigError("grid: x_hi must exceed x_lo");
    if (!(dx > 0.0) || !(dt > 0.0)) throw ConfigError("grid: dx and dt must be positive");
    Grid1D g;
    g.x_lo = x_lo;
    g.n = static_cast<std::size_t>(std::ceil((x_hi - x_lo) / dx - 1e-9)) + 1;
    g.dx = dx;
    g.x_hi = x_lo + dx * static_cast<double>(g.n - 1);
    g.dt = dt;
    g.implicit = implicit;
    if (g.n < 3) throw ConfigError("grid: need at least 3 nodes");
    return g;
}

double step(std::vector<double>& theta, std::span<const double> m, const BistableNonlinearity& f, const Grid1D& g,
            kernels::Exec exec) {
    const std::size_t n = theta.size();
    const double r = g.dt / (g.dx * g.dx);
    if (g.implicit) {
        kernels::reaction_step(theta, m, f.f, g.dt, exec);
        // (I - dt·D2) θ_new = θ*, ghost nodes mirror the neighbours.
        std::vector<double> sub(n, -r), diag(n, 1.0 + 2.0 * r), sup(n, -r);
        sup[0] = -2.0 * r;
        sub[n - 1] = -2.0 * r;
        numerics::solve_tridiagonal(sub, diag, sup, theta);
    } else {
        if (g.dt > 0.5 * g.dx * g.dx)
            throw WaveError(ErrorCode::CFLViolation, "dt = " + std::to_string(g.dt) + " > dx^2/2");
        std::vector<double> lap(n);
        lap[0] = 2.0 * (theta[1] - theta[0]);
        lap[n - 1] = 2.0 * (theta[n - 2] - theta[n - 1]);
        for (std::size_t i = 1; i + 1 < n; ++i) lap[i] = theta[i - 1] - 2.0 * theta[i] + theta[i + 1];
        kernels::reaction_step(theta, m, f.f, g.dt, exec);
        for (std::size_t i = 0; i < n; ++i) theta[i] += r * lap[i];
    }
    double clipped = 0.0;
    for (double& v : theta) {
        const double c = std::clamp(v, 0.0, 1.0);
        clipped += std::abs(v - c);
        v = c;
    }
    return clipped * g.dx;
}

namespace {

std::optional<double> leftmost_crossing(std::span<const double> theta, const Grid1D& g, double level) {
    for (std::size_t i = 0; i + 1 < theta.size(); ++i) {
        const double a = theta[i] - level;
        const double b = theta[i + 1] - level;
        if (a == 0.0) return g.x(i);
        if (a * b < 0.0) return g.x(i) + g.dx * a / (a - b);
    }
    return std::nullopt;
}

}  // namespace

std::pair<double, double> fit_line(std::span<const double> t, std::span<const double> x) {
    const auto n = static_cast<double>(t.size());
    if (t.size() < 2) return {0.0, 0.0};
    double mt = 0.0, mx = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        mt += t[i];
        mx += x[i];
    }
    mt /= n;
    mx /= n;
    double stt = 0.0, stx = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        stt += (t[i] - mt) * (t[i] - mt);
        stx += (t[i] - mt) * (x[i] - mx);
    }
    const double slope = stt > 0.0 ? stx / stt : 0.0;
    double ss = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double e = x[i] - (mx + slope * (t[i] - mt));
        ss += e * e;
    }
    return {slope, std::sqrt(ss / n)};
}

namespace {

void fit_trace(FrontTrace& tr, double fit_from) {
    std::vector<double> t, x;
    for (std::size_t i = 0; i < tr.times.size(); ++i)
        if (tr.times[i] >= fit_from) {
            t.push_back(tr.times[i]);
            x.push_back(tr.positions[i]);
        }
    const auto [slope, res] = fit_line(t, x);
    tr.fitted_speed = slope;
    tr.fit_residual = res;
}

}  // namespace

FrontTrace front_trace(const std::vector<std::vector<double>>& snapshots, const std::vector<double>& times,
                       const Grid1D& g, double level, double fit_from) {
    FrontTrace tr;
    for (std::size_t k = 0; k < snapshots.size(); ++k) {
        const auto x = leftmost_crossing(snapshots[k], g, level);
        if (!x) throw WaveError(ErrorCode::NoCrossing, "snapshot at t = " + std::to_string(times[k]) + " never reaches the level");
        tr.times.push_back(times[k]);
        tr.positions.push_back(*x);
    }
    fit_trace(tr, fit_from);
    return tr;
}

namespace {

using Field = std::function<double(double t, double x)>;

SimRun run(const BistableNonlinearity& f, const Grid1D& g, double T, const Field& init, const Field& density,
           const Field& exact, const SimOptions& opts) {
    if (!(T > 0.0)) throw ConfigError("simulation horizon must be positive");
    const auto steps = static_cast<std::size_t>(std::llround(T / g.dt));
    const std::size_t every = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(opts.record_every / g.dt)));
    std::vector<double> theta(g.n), m(g.n, 0.0);
    for (std::size_t i = 0; i < g.n; ++i) theta[i] = init(0.0, g.x(i));

    SimRun out;
    std::size_t records = 0;
    auto record = [&](double t) {
        const auto x = leftmost_crossing(theta, g, opts.level);
        if (!x || *x - g.x_lo < opts.boundary_margin || g.x_hi - *x < opts.boundary_margin)
            throw WaveError(ErrorCode::FrontLeftDomain,
                            "front " + (x ? "at x = " + std::to_string(*x) : std::string("lost")) + " at t = " + std::to_string(t));
        out.trace.times.push_back(t);
        out.trace.positions.push_back(*x);
        if (exact) {
            double err = 0.0;
            for (std::size_t i = 0; i < g.n; ++i) err = std::max(err, std::abs(theta[i] - exact(t, g.x(i))));
            out.shape_error = std::max(out.shape_error, err);
        }
        if (opts.snapshot_every > 0 && records % opts.snapshot_every == 0) {
            std::vector<double> mm(g.n, 0.0);
            if (density)
                for (std::size_t i = 0; i < g.n; ++i) mm[i] = density(t, g.x(i));
            out.snapshots.push_back({t, theta, std::move(mm)});
        }
        ++records;
    };

    record(0.0);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = g.dt * static_cast<double>(k);
        if (density)
            for (std::size_t i = 0; i < g.n; ++i) m[i] = density(t, g.x(i));
        out.clip_mass += step(theta, m, f, g, opts.exec);
        if ((k + 1) % every == 0 || k + 1 == steps) record(g.dt * static_cast<double>(k + 1));
    }
    fit_trace(out.trace, 0.5 * T);
    return out;
}

}  // namespace

SimRun simulate_baseline(const BistableNonlinearity& f, const Grid1D& g, double T, double x0, const SimOptions& opts) {
    const Field init = [x0](double, double x) { return 0.5 * (1.0 + std::tanh(x - x0)); };
    return run(f, g, T, init, nullptr, nullptr, opts);
}

SimRun simulate_reversed(const BistableNonlinearity& f, const WaveProfile& w, const FishermanDensity& d,
                         const Grid1D& g, double T, bool harvest, const SimOptions& opts) {
    const double c = w.c;
    const Field init = [&w](double, double x) { return w.theta(x); };
    const Field density = [&d, c](double t, double x) { return d(x - c * t); };
    const Field exact = [&w, c](double t, double x) { return w.theta(x - c * t); };
    return run(f, g, T, init, harvest ? density : Field{}, exact, opts);
}

double cubic_front_speed(double eta) { return std::sqrt(2.0) * (eta - 0.5); }

}  // namespace wavegame
