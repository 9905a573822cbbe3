#include "wavegame/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "wavegame/error.hpp"

namespace wavegame::numerics {

namespace {

State axpy(const State& y, double a, const State& k) { return {y[0] + a * k[0], y[1] + a * k[1]}; }

State hermite(const Sample& a, const Sample& b, double t) {
    const double h = b.t - a.t;
    const double x = (t - a.t) / h;
    const double x2 = x * x;
    const double x3 = x2 * x;
    const double h00 = 2 * x3 - 3 * x2 + 1;
    const double h10 = x3 - 2 * x2 + x;
    const double h01 = -2 * x3 + 3 * x2;
    const double h11 = x3 - x2;
    State out;
    for (int i = 0; i < 2; ++i)
        out[i] = h00 * a.y[i] + h10 * h * a.dy[i] + h01 * b.y[i] + h11 * h * b.dy[i];
    return out;
}

State hermite_slope(const Sample& a, const Sample& b, double t) {
    const double h = b.t - a.t;
    const double x = (t - a.t) / h;
    const double x2 = x * x;
    const double d00 = (6 * x2 - 6 * x) / h;
    const double d10 = 3 * x2 - 4 * x + 1;
    const double d01 = (-6 * x2 + 6 * x) / h;
    const double d11 = 3 * x2 - 2 * x;
    State out;
    for (int i = 0; i < 2; ++i) out[i] = d00 * a.y[i] + d10 * a.dy[i] + d01 * b.y[i] + d11 * b.dy[i];
    return out;
}

bool crossed(double g0, double g1, Direction dir) {
    const bool rising = g0 < 0.0 && g1 >= 0.0;
    const bool falling = g0 > 0.0 && g1 <= 0.0;
    switch (dir) {
        case Direction::Rising: return rising;
        case Direction::Falling: return falling;
        case Direction::Any: return rising || falling;
    }
    return false;
}

}  // namespace

void IntegratorOptions::validate() const {
    if (!(step > 0.0)) throw ConfigError("integrator step must be positive");
    if (!(tol > 0.0)) throw ConfigError("integrator tol must be positive");
    if (max_steps < 1) throw ConfigError("integrator max_steps must be >= 1");
}

DenseOutput::DenseOutput(std::vector<Sample> samples) : samples_(std::move(samples)) {}

std::size_t DenseOutput::segment(double t) const {
    auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                               [](double v, const Sample& s) { return v < s.t; });
    std::size_t i = static_cast<std::size_t>(std::distance(samples_.begin(), it));
    if (i == 0) return 0;
    if (i >= samples_.size()) return samples_.size() - 2;
    return i - 1;
}

State DenseOutput::operator()(double t) const {
    if (samples_.size() == 1) return samples_.front().y;
    const std::size_t i = segment(t);
    return hermite(samples_[i], samples_[i + 1], t);
}

State DenseOutput::derivative(double t) const {
    if (samples_.size() == 1) return samples_.front().dy;
    const std::size_t i = segment(t);
    return hermite_slope(samples_[i], samples_[i + 1], t);
}

void DenseOutput::truncate_after(double t_cut) {
    if (samples_.size() < 2 || t_cut >= samples_.back().t) return;
    const State y = (*this)(t_cut);
    const State dy = derivative(t_cut);
    while (!samples_.empty() && samples_.back().t >= t_cut) samples_.pop_back();
    samples_.push_back({t_cut, y, dy});
}

IntegrationResult integrate(const VectorField& rhs, const State& y0, double t0, double t1,
                            std::span<const Event> events, const IntegratorOptions& opts) {
    opts.validate();
    if (t0 == t1) throw ConfigError("integrate: degenerate span");

    const double sign = t1 > t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    const double needed = std::ceil(span / opts.step - 1e-9);
    const bool truncated_span = needed > static_cast<double>(opts.max_steps);

    std::vector<Sample> samples;
    samples.reserve(static_cast<std::size_t>(std::min(needed, static_cast<double>(opts.max_steps))) + 2);
    samples.push_back({t0, y0, rhs(t0, y0)});

    std::vector<double> guard_prev(events.size());
    std::vector<int> hit_count(events.size(), 0);
    for (std::size_t e = 0; e < events.size(); ++e) guard_prev[e] = events[e].guard(t0, y0);

    IntegrationResult result;
    bool any_terminal = false;
    for (const auto& ev : events) any_terminal |= ev.terminal_after > 0 && ev.required;

    std::size_t steps = 0;
    double t = t0;
    State y = y0;
    while (sign * (t1 - t) > 0.0) {
        if (steps >= opts.max_steps) break;
        const double h = sign * std::min(opts.step, std::abs(t1 - t));
        const State k1 = samples.back().dy;
        const State k2 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k1));
        const State k3 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k2));
        const State k4 = rhs(t + h, axpy(y, h, k3));
        State yn;
        for (int i = 0; i < 2; ++i) yn[i] = y[i] + h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        const double tn = (std::abs(t1 - (t + h)) < 1e-14 * std::max(1.0, std::abs(t1))) ? t1 : t + h;
        const Sample prev = samples.back();
        const Sample next{tn, yn, rhs(tn, yn)};
        ++steps;

        // Locate every guard crossing inside this step, earliest first.
        struct Pending { double t; std::size_t e; };
        std::vector<Pending> pending;
        const Sample& lo = sign > 0 ? prev : next;
        const Sample& hi = sign > 0 ? next : prev;
        for (std::size_t e = 0; e < events.size(); ++e) {
            const double g1 = events[e].guard(next.t, next.y);
            if (crossed(guard_prev[e], g1, events[e].direction)) {
                double a = prev.t, b = next.t;
                double ga = guard_prev[e];
                while (std::abs(b - a) > opts.tol) {
                    const double m = 0.5 * (a + b);
                    if (m == a || m == b) break;
                    const double gm = events[e].guard(m, hermite(lo, hi, m));
                    if (crossed(ga, gm, Direction::Any) || gm == 0.0) {
                        b = m;
                    } else {
                        a = m;
                        ga = gm;
                    }
                }
                pending.push_back({b, e});
            }
            guard_prev[e] = g1;
        }
        std::sort(pending.begin(), pending.end(),
                  [sign](const Pending& p, const Pending& q) { return sign * p.t < sign * q.t; });

        std::optional<Pending> stop;
        for (const auto& p : pending) {
            result.hits.push_back({p.e, p.t, hermite(lo, hi, p.t)});
            ++hit_count[p.e];
            if (events[p.e].terminal_after > 0 && hit_count[p.e] >= events[p.e].terminal_after) {
                stop = p;
                break;
            }
        }
        if (stop) {
            const State ys = hermite(lo, hi, stop->t);
            samples.push_back({stop->t, ys, rhs(stop->t, ys)});
            result.terminated_by = stop->e;
            break;
        }
        samples.push_back(next);
        t = tn;
        y = yn;
    }

    if (!result.terminated_by) {
        if (sign * (t1 - t) > 0.0 && truncated_span)
            throw WaveError(ErrorCode::MaxStepsExceeded,
                            "integration needs more than " + std::to_string(opts.max_steps) + " steps");
        if (any_terminal)
            throw WaveError(ErrorCode::EventNotBracketed, "no terminal event fired within the span");
    }

    if (sign < 0) std::reverse(samples.begin(), samples.end());
    result.path = DenseOutput(std::move(samples));
    return result;
}

double find_root(const std::function<double(double)>& g, double a, double b, double tol) {
    if (a > b) std::swap(a, b);
    const double ga = g(a);
    const double gb = g(b);
    if (ga * gb > 0.0)
        throw WaveError(ErrorCode::NoBracket, "g(a)=" + std::to_string(ga) + ", g(b)=" + std::to_string(gb));
    if (ga == 0.0) return a;
    if (gb == 0.0) return b;
    std::uintmax_t iters = 200;
    auto within_tol = [tol](double lo, double hi) { return std::abs(hi - lo) <= tol; };
    const auto [lo, hi] = boost::math::tools::toms748_solve(g, a, b, ga, gb, within_tol, iters);
    return 0.5 * (lo + hi);
}

void solve_tridiagonal(std::span<const double> sub, std::span<double> diag, std::span<const double> sup,
                       std::span<double> rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
}

double default_truncation(double lambda, double rel) {
    // e^{-λT}/λ = rel  =>  T = ln(1/(λ rel))/λ
    return std::max(1.0 / lambda, std::log(1.0 / (lambda * rel)) / lambda);
}

DiscountedValue discounted_integral(const std::function<double(double)>& g, double lambda,
                                    double t_trunc, double tol, std::optional<double> g_sup) {
    if (!(lambda > 0.0)) throw ConfigError("discounted_integral: lambda must be positive");
    if (!(t_trunc > 0.0)) throw ConfigError("discounted_integral: truncation must be positive");
    double seen = 0.0;
    auto integrand = [&](double t) {
        const double v = g(t);
        seen = std::max(seen, std::abs(v));
        return std::exp(-lambda * t) * v;
    };
    // Split at multiples of 1/λ so each panel sees O(1) decay.
    const auto panels = static_cast<int>(std::clamp(std::ceil(lambda * t_trunc - 1e-9), 1.0, 64.0));
    double value = 0.0;
    double err_total = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double a = t_trunc * k / panels;
        const double b = k + 1 == panels ? t_trunc : t_trunc * (k + 1) / panels;
        double err = 0.0;
        value += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, a, b, 20, tol, &err);
        err_total += err;
    }
    const double sup = g_sup.value_or(seen);
    return {value, sup * std::exp(-lambda * t_trunc) / lambda, err_total};
}

}  // namespace wavegame::numerics
