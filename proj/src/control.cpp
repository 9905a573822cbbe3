#include "wavegame/control.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "wavegame/error.hpp"
#include "wavegame/io.hpp"

namespace wavegame {

numerics::DiscountedValue payoff(const std::function<double(double)>& theta, const CostModel& cost, double s0,
                                 const Control& alpha, std::optional<double> t_trunc, std::vector<double> breakpoints) {
    const double lambda = cost.lambda;
    const double c = cost.c;
    const double T = t_trunc.value_or(numerics::default_truncation(lambda));
    std::sort(breakpoints.begin(), breakpoints.end());
    std::vector<double> cuts{0.0};
    for (double b : breakpoints)
        if (b > 0.0 && b < T) cuts.push_back(b);
    cuts.push_back(T);

    numerics::IntegratorOptions io;
    io.step = std::min(1e-2, T / 1e5);
    const numerics::VectorField rhs = [&alpha, c](double t, const numerics::State& y) -> numerics::State {
        return {alpha(t, y[0]) - c, 0.0};
    };

    numerics::DiscountedValue total{0.0, 0.0, 0.0};
    double s = s0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double ta = cuts[k];
        const double tb = cuts[k + 1];
        // Nudge the first stage off the left cut so α sees the new piece.
        const numerics::VectorField piece_rhs = [&rhs, ta, tb](double t, const numerics::State& y) {
            return rhs(std::clamp(t, ta + 1e-12 * (tb - ta), tb - 1e-12 * (tb - ta)), y);
        };
        const auto res = numerics::integrate(piece_rhs, {s, 0.0}, ta, tb, {}, io);
        const auto& path = res.path;
        auto g = [&](double tau) {
            const double t = std::clamp(ta + tau, ta + 1e-12 * (tb - ta), tb - 1e-12 * (tb - ta));
            const double st = path(t)[0];
            if (!std::isfinite(st)) throw WaveError(ErrorCode::BlowUp, "trajectory diverged at t = " + std::to_string(t));
            return theta(st) - cost.L(alpha(t, st));
        };
        const auto part = numerics::discounted_integral(g, lambda, tb - ta, 1e-11);
        const double w = std::exp(-lambda * ta);
        total.value += w * part.value;
        total.quadrature_error += w * part.quadrature_error;
        total.tail_bound = w * part.tail_bound;
        s = path.samples().back().y[0];
    }
    return total;
}

double ValueGrid::value(double s) const { return kernels::interpolate(grid, V, s); }

double ValueGrid::dV(std::size_t i) const {
    const std::size_t n = V.size();
    if (i == 0) return (V[1] - V[0]) / grid.ds;
    if (i == n - 1) return (V[n - 1] - V[n - 2]) / grid.ds;
    return (V[i + 1] - V[i - 1]) / (2.0 * grid.ds);
}

double ValueGrid::dV_at(double s) const {
    const double x = (s - grid.s_lo) / grid.ds;
    if (x <= 0.0) return dV(0);
    const double last = static_cast<double>(grid.n - 1);
    if (x >= last) return dV(grid.n - 1);
    const auto i = static_cast<std::size_t>(x);
    const double w = x - static_cast<double>(i);
    return (1.0 - w) * dV(i) + w * dV(i + 1);
}

double ValueGrid::control_step() const {
    return control_set.size() < 2 ? 0.0 : control_set[1] - control_set[0];
}

double ValueGrid::solver_tol(double lambda) const { return (grid.ds + dt) * theta_lipschitz / lambda; }

void ValueGrid::write_csv(std::ostream& os) const {
    io::CsvWriter csv(os, {"s", "V", "dV", "feedback"});
    for (std::size_t i = 0; i < V.size(); ++i) csv.row({grid.node(i), V[i], dV(i), feedback[i]});
}

namespace {

/// Exact value of a fixed policy: V_i - β·V(foot_i) = w·(Θ_i - L(a_i)).
void evaluate_policy(const kernels::BellmanData& d, std::span<const std::size_t> policy, std::span<double> V) {
    const std::size_t n = d.grid.n;
    std::vector<double> sub(n, 0.0), diag(n, 1.0), sup(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = policy[i];
        V[i] = d.weight * (d.reward[i] - d.control_cost[a]);
        const double foot = d.grid.node(i) + d.dt * (d.controls[a] - d.c);
        double x = std::clamp((foot - d.grid.s_lo) / d.grid.ds, 0.0, static_cast<double>(n - 1));
        auto j = static_cast<std::size_t>(x);
        if (j >= n - 1) j = n - 2;
        const double w = x - static_cast<double>(j);
        // Feet stay within half a cell, so j is i - 1 or i (or i + 1 at the right end clamp).
        auto add = [&](std::size_t col, double coef) {
            if (col + 1 == i) sub[i] -= coef;
            else if (col == i) diag[i] -= coef;
            else if (col == i + 1) sup[i] -= coef;
            else throw WaveError(ErrorCode::NoConvergence, "semi-Lagrangian foot outside the stencil");
        };
        add(j, d.discount * (1.0 - w));
        add(j + 1, d.discount * w);
    }
    numerics::solve_tridiagonal(sub, diag, sup, V);
}

}  // namespace

ValueGrid hjb_solve(const std::function<double(double)>& theta, const CostModel& cost, const HjbOptions& opts) {
    if (!(cost.lambda > 0.0)) throw ConfigError("hjb_solve: lambda must be positive");
    if (!(opts.ds > 0.0) || !(opts.s_hi - opts.s_lo > 4.0 * opts.ds)) throw ConfigError("hjb_solve: bad grid");
    if (opts.controls < 3) throw ConfigError("hjb_solve: need at least 3 controls");
    const double lambda = cost.lambda;
    const double c = cost.c;

    ValueGrid out;
    const auto n = static_cast<std::size_t>(std::floor((opts.s_hi - opts.s_lo) / opts.ds + 1e-9)) + 1;
    out.grid = {opts.s_lo, opts.ds, n};
    std::vector<double> reward(n);
    for (std::size_t i = 0; i < n; ++i) reward[i] = theta(out.grid.node(i));
    for (std::size_t i = 0; i + 1 < n; ++i)
        out.theta_lipschitz = std::max(out.theta_lipschitz, std::abs(reward[i + 1] - reward[i]) / opts.ds);

    // Optimal controls obey |a| <= H'(sup|V'|) <= H'(sup|Θ'|/λ).
    const Hamiltonian ham = legendre(cost.lagrangian);
    const double a_max = std::max(std::abs(c), 1.5 * ham.dH(out.theta_lipschitz / lambda));
    const double h = 2.0 * opts.control_halfwidth / static_cast<double>(opts.controls - 1);
    const long half = static_cast<long>(opts.controls - 1) / 2;
    for (long j = -half; j <= half; ++j) {
        const double a = c + h * static_cast<double>(j);
        if (std::abs(a) <= a_max + 1e-15) out.control_set.push_back(a);
    }
    std::vector<double> control_cost;
    double spread = 0.0;
    for (double a : out.control_set) {
        control_cost.push_back(cost.L(a));
        spread = std::max(spread, std::abs(a - c));
    }
    if (spread == 0.0) spread = h;
    out.dt = 0.5 * opts.ds / spread;

    const kernels::BellmanData data{out.grid, reward, out.control_set, control_cost, c, out.dt,
                                    -std::expm1(-lambda * out.dt) / lambda, std::exp(-lambda * out.dt)};

    std::vector<double> V(n), Vnew(n);
    std::vector<std::size_t> policy(n, 0);
    for (std::size_t i = 0; i < n; ++i) V[i] = reward[i] / lambda;
    bool converged = false;
    for (std::size_t it = 0; it < opts.max_iterations; ++it) {
        const double diff = kernels::bellman_sweep(data, V, Vnew, policy, opts.exec);
        out.update_history.push_back(diff);
        ++out.iterations;
        V.swap(Vnew);
        if (diff < opts.tol) {
            out.final_update = diff;
            converged = true;
            break;
        }
        if (opts.method == HjbMethod::PolicyIteration) evaluate_policy(data, policy, V);
    }
    if (!converged)
        throw WaveError(ErrorCode::NoConvergence, "sup-update still " + std::to_string(out.update_history.back()) +
                                                      " after " + std::to_string(out.iterations) + " sweeps");

    out.V = std::move(V);
    out.feedback.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.feedback[i] = out.control_set[policy[i]];
    for (std::size_t i = 0; i + 1 < n; ++i)
        out.lipschitz_est = std::max(out.lipschitz_est, std::abs(out.V[i + 1] - out.V[i]) / opts.ds);
    return out;
}

double curvature_bound(const BistableNonlinearity& f, const WaveProfile& w) {
    const double s_lo = w.left.s_front() - w.left_anchor;
    const double s_hi = w.mid.s1 + (w.right.s_back() - w.right_anchor);
    const std::size_t n = 20001;
    double sup = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = s_lo + (s_hi - s_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        sup = std::max(sup, std::abs(w.theta_second(f, s)));
    }
    // One-sided values at both junctions.
    sup = std::max({sup, std::abs(w.theta_second(f, 0.0)), std::abs(w.theta_second(f, w.mid.s1))});
    if (!std::isfinite(sup)) throw WaveError(ErrorCode::UnboundedCurvature, "sup |Theta''| is not finite");
    return sup;
}

double concavity_threshold(const BistableNonlinearity& f, const WaveProfile& w, double d_under) {
    if (!(d_under > 0.0)) return INFINITY;
    return 2.0 * std::sqrt(curvature_bound(f, w) / d_under);
}

double critical_point_check(const WaveProfile& w, const CostModel& cost, double s0) {
    return std::abs(w.theta_prime(s0) - cost.bridge_slope());
}

double s_minus(const WaveProfile& w) {
    const double theta0 = w.mid.theta0;
    const double slope = w.mid.slope;
    auto gap = [&](double s) { return theta0 + slope * s - w.theta(s); };
    const double floor = -theta0 / slope - 1.0;  // tangent is negative there while Θ > 0
    const double step = 1e-2;
    double right = -1e-3;
    if (gap(right) <= 0.0) return numerics::find_root(gap, right, -1e-12 * std::max(1.0, w.mid.s1), 1e-12);
    for (double s = right - step; s >= floor; s -= step) {
        if (gap(s) < 0.0) return numerics::find_root(gap, s, right, 1e-12);
        right = s;
    }
    throw WaveError(ErrorCode::NoCrossing, "tangent line stays above Theta down to s = " + std::to_string(floor));
}

double curvature_floor(const Lagrangian& L, double a_max) {
    if (L.power) {
        const double m = L.power->exponent;
        if (m == 2.0) return 2.0 * L.power->kappa;
        if (m > 2.0) return 0.0;
        return L.d2L(a_max);
    }
    double lo = INFINITY;
    for (int i = 0; i <= 200; ++i) lo = std::min(lo, L.d2L(-a_max + a_max * i / 100.0));
    return lo;
}

nlohmann::json EquilibriumReport::to_json() const {
    nlohmann::json probes_json = nlohmann::json::array();
    for (const auto& p : probes) probes_json.push_back({{"name", p.name}, {"gap", p.gap}});
    return {{"feedback_residual", feedback_residual},
            {"value_identity_residual", value_identity_residual},
            {"probes", probes_json},
            {"lambda0", io::finite_or_null(lambda0)},
            {"s_minus", s_minus},
            {"certified", certified}};
}

namespace {

std::string fmt_num(double v) {
    std::ostringstream os;
    os << std::setprecision(3) << v;
    return os.str();
}

struct Probe {
    std::string name;
    // Given the start point, return the control and its switching times.
    std::function<std::pair<Control, std::vector<double>>(double s0)> build;
};

}  // namespace

Verification verify_equilibrium(const BistableNonlinearity& f, const WaveProfile& w, const FishermanDensity& d,
                                const CostModel& cost, const VerifyOptions& opts) {
    const double lambda = cost.lambda;
    const double c = cost.c;
    Verification out;
    EquilibriumReport& rep = out.report;
    rep.s_minus = s_minus(w);

    HjbOptions ho;
    ho.s_lo = rep.s_minus - opts.margin;
    ho.s_hi = w.mid.s1 + opts.margin;
    ho.ds = opts.ds;
    ho.exec = opts.exec;
    const auto theta = [&w](double s) { return w.theta(s); };
    out.value = hjb_solve(theta, cost, ho);
    const ValueGrid& vg = out.value;

    for (std::size_t i = 0; i < vg.V.size(); ++i) {
        const double s = vg.grid.node(i);
        if (s < 0.0 || s > d.s1) continue;
        rep.feedback_residual = std::max(rep.feedback_residual, std::abs(vg.feedback[i] - c));
        rep.value_identity_residual =
            std::max(rep.value_identity_residual, std::abs(vg.V[i] - (w.theta(s) - cost.L(c)) / lambda));
    }
    rep.solver_tol = vg.solver_tol(lambda);
    rep.control_step = vg.control_step();
    rep.lipschitz_est = vg.lipschitz_est;
    rep.lipschitz_bound = vg.theta_lipschitz / lambda;

    const double a_lo = vg.control_set.front();
    const double a_hi = vg.control_set.back();
    std::vector<Probe> probes;
    for (double amp : opts.amplitudes) {
        const double delta = amp * c;
        for (double hor : opts.horizons) {
            const double Tp = hor / lambda;
            const std::string tag = " d=" + fmt_num(amp) + "c T=" + fmt_num(hor) + "/lambda";
            for (int sign : {+1, -1}) {
                probes.push_back({(sign > 0 ? "plus" : "minus") + tag, [=](double) {
                                      Control a = [=](double t, double) { return t < Tp ? c + sign * delta : c; };
                                      return std::make_pair(a, std::vector<double>{Tp});
                                  }});
            }
        }
        const double sm = rep.s_minus;
        probes.push_back({"bang-bang to s_minus d=" + fmt_num(amp) + "c", [=](double s0) {
                              const double t_hit = std::max(0.0, (s0 - sm) / delta);
                              Control a = [=](double t, double) { return t < t_hit ? c - delta : c; };
                              return std::make_pair(a, std::vector<double>{t_hit});
                          }});
    }
    probes.push_back({"greedy H'(V')", [&vg, &cost, a_lo, a_hi](double) {
                          const Hamiltonian ham = legendre(cost.lagrangian);
                          Control a = [&vg, ham, a_lo, a_hi](double, double s) {
                              return std::clamp(ham.dH(vg.dV_at(s)), a_lo, a_hi);
                          };
                          return std::make_pair(a, std::vector<double>{});
                      }});

    const std::size_t ns = std::max<std::size_t>(opts.start_points, 1);
    std::vector<double> starts;
    for (std::size_t j = 0; j < ns; ++j) starts.push_back(d.s1 * (static_cast<double>(j) + 0.5) / static_cast<double>(ns));

    std::vector<double> jobs(probes.size() * ns);
    for (std::size_t i = 0; i < jobs.size(); ++i) jobs[i] = static_cast<double>(i);
    const auto gaps = kernels::map_scan(
        [&](double idx) {
            const auto i = static_cast<std::size_t>(idx);
            const Probe& p = probes[i / ns];
            const double s0 = starts[i % ns];
            const auto [alpha, cuts] = p.build(s0);
            const double j_const = (w.theta(s0) - cost.L(c)) / lambda;
            return j_const - payoff(theta, cost, s0, alpha, std::nullopt, cuts).value;
        },
        jobs, opts.exec);

    rep.certified = true;
    for (std::size_t k = 0; k < probes.size(); ++k) {
        double g = INFINITY;
        for (std::size_t j = 0; j < ns; ++j) g = std::min(g, gaps[k * ns + j]);
        rep.probes.push_back({probes[k].name, g});
        if (g < -opts.gap_tol) rep.certified = false;
    }

    const double a_max = std::max(std::abs(a_lo), std::abs(a_hi));
    rep.lambda0 = concavity_threshold(f, w, curvature_floor(cost.lagrangian, a_max));
    return out;
}

}  // namespace wavegame
