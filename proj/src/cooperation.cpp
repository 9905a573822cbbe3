#include "wavegame/cooperation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wavegame/control.hpp"
#include "wavegame/error.hpp"
#include "wavegame/io.hpp"
#include "wavegame/numerics.hpp"
#include "wavegame/pde_sim.hpp"

namespace wavegame {

CoopConfig CoopConfig::make(double s1, double lambda0, double lambda, double eta_under) {
    if (!(s1 > 0.0)) throw ConfigError("cooperation: s1 must be positive");
    if (!(lambda > 0.0) || !(lambda <= lambda0)) throw ConfigError("cooperation: need 0 < lambda <= lambda0");
    return {s1, lambda0, lambda, lambda0 / lambda, eta_under};
}

double alpha_co(double t, double x, double s1) { return x / (2.0 * s1 + t); }

double co_trajectory(double t, double x0, double s1) { return x0 * (1.0 + t / (2.0 * s1)); }

double m_co(double t, double x, const FishermanDensity& d, double s1) {
    const double scale = 2.0 * s1 / (2.0 * s1 + t);
    return scale * d(scale * x);
}

double m_co_mass(double t, const FishermanDensity& d, double s1) {
    const double hi = d.s1 * (2.0 * s1 + t) / (2.0 * s1);
    const auto g = [&](double x) { return m_co(t, x, d, s1); };
    // Panels aligned with the interpolation nodes of M keep the integrand smooth.
    double total = 0.0;
    const double stretch = (2.0 * s1 + t) / (2.0 * s1);
    for (std::size_t i = 0; i + 1 < d.s.size(); ++i) {
        const double a = d.s[i] * stretch;
        const double b = std::min(d.s[i + 1] * stretch, hi);
        if (b > a) total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, a, b, 0, 1e-14);
    }
    return total;
}

CostModel lagrangian_family(double lambda, double lambda0, double eta_under, double c) {
    if (!(lambda > 0.0) || !(lambda <= lambda0)) throw ConfigError("lagrangian family: need 0 < lambda <= lambda0");
    return CostModel{harvest_power_family(eta_under, lambda0 / lambda), lambda, c};
}

double certified_lambda0(const BistableNonlinearity& f, double c, const std::vector<double>& candidates,
                         kernels::Exec exec) {
    const Lagrangian base = harvest_power_family(f.eta_under, 1.0);
    VerifyOptions vo;
    vo.exec = exec;
    for (double lam : candidates) {
        try {
            const BuiltWave bw = construct_wave(f, base, lam, c, 0);
            if (verify_equilibrium(f, bw.wave, bw.density, CostModel{base, lam, c}, vo).report.certified) return lam;
        } catch (const WaveError&) {
        }
    }
    throw WaveError(ErrorCode::NoConvergence, "no candidate discount gives a certified equilibrium");
}

namespace {

double interp_series(const std::vector<double>& v, double dt, double t) {
    const double pos = t / dt;
    if (pos <= 0.0) return v.front();
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= v.size()) return v.back();
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * v[i] + w * v[i + 1];
}

double interp_field(const std::vector<double>& theta, const Grid1D& g, double x) {
    if (x <= g.x_lo) return theta.front();
    if (x >= g.x_hi) return theta.back();
    const double pos = (x - g.x_lo) / g.dx;
    const auto i = std::min(static_cast<std::size_t>(pos), g.n - 2);
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * theta[i] + w * theta[i + 1];
}

}  // namespace

CoopReport compare_payoffs(const BistableNonlinearity& f, const BuiltWave& base, double lambda0, double lambda,
                           const CoopOptions& opts) {
    const double s1 = base.density.s1;
    const double c = base.wave.c;
    CoopReport rep;
    rep.config = CoopConfig::make(s1, lambda0, lambda, f.eta_under);
    if (opts.samples == 0) throw ConfigError("cooperation: need at least one sample");
    const CostModel cost = lagrangian_family(lambda, lambda0, f.eta_under, c);

    const double T = numerics::default_truncation(lambda, opts.horizon_rel);
    const double cap = std::min(opts.cap_factor / lambda, T);
    rep.horizon = T;
    rep.level = 1.0 - 2.0 * opts.delta;

    const double x_lo = -40.0 - 0.5 * T;
    const double x_hi = s1 + 0.5 * T + 40.0;
    const Grid1D g = Grid1D::uniform(x_lo, x_hi, opts.dx, opts.dt);
    const auto steps = static_cast<std::size_t>(std::ceil(T / g.dt));

    std::vector<double> x0s(opts.samples);
    for (std::size_t i = 0; i < opts.samples; ++i)
        x0s[i] = s1 * (static_cast<double>(i) + 0.5) / static_cast<double>(opts.samples);

    std::vector<double> theta(g.n), m(g.n, 0.0);
    for (std::size_t i = 0; i < g.n; ++i) theta[i] = base.wave.theta(g.x(i));
    std::vector<std::vector<double>> along(opts.samples, std::vector<double>(steps + 1));
    auto probe_agents = [&](std::size_t k, double t) {
        for (std::size_t j = 0; j < x0s.size(); ++j) along[j][k] = interp_field(theta, g, co_trajectory(t, x0s[j], s1));
    };

    const auto diag_every = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(opts.record_every / g.dt)));
    const auto csv_every =
        opts.csv_every > 0.0 ? std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(opts.csv_every / g.dt))) : 0;
    auto diagnose = [&](std::size_t k, double t) {
        if (csv_every && k % csv_every == 0)
            for (std::size_t i = 0; i < g.n; i += opts.csv_node_stride)
                rep.space_time.push_back({t, g.x(i), theta[i], m_co(t, g.x(i), base.density, s1)});
        if (rep.T_detect || k % diag_every != 0) return;
        const double hi = s1 + 0.5 * t;
        double inf = 1.0;
        for (std::size_t i = 0; i < g.n; ++i)
            if (g.x(i) >= 0.0 && g.x(i) <= hi) inf = std::min(inf, theta[i]);
        if (inf >= rep.level) rep.T_detect = t;
        else if (t >= cap)
            throw WaveError(ErrorCode::InvasionFailed, "inf of theta on supp m is " + std::to_string(inf) +
                                                           " at t = " + std::to_string(t));
    };

    probe_agents(0, 0.0);
    diagnose(0, 0.0);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = g.dt * static_cast<double>(k);
        for (std::size_t i = 0; i < g.n; ++i) m[i] = m_co(t, g.x(i), base.density, s1);
        step(theta, m, f, g, opts.exec);
        const double tn = g.dt * static_cast<double>(k + 1);
        probe_agents(k + 1, tn);
        diagnose(k + 1, tn);
    }
    if (!rep.T_detect)
        throw WaveError(ErrorCode::InvasionFailed, "recovery level not reached by t = " + std::to_string(T));

    const double run_end = g.dt * static_cast<double>(steps);
    const std::vector<double> J = kernels::map_scan(
        [&](double x0) {
            const auto j = static_cast<std::size_t>(std::find(x0s.begin(), x0s.end(), x0) - x0s.begin());
            const double effort = cost.L(alpha_co(0.0, x0, s1));
            const auto& series = along[j];
            const auto g_t = [&](double t) { return interp_series(series, g.dt, std::min(t, run_end)) - effort; };
            return numerics::discounted_integral(g_t, lambda, T, 1e-10, 1.0).value;
        },
        x0s, opts.exec);
    for (std::size_t j = 0; j < x0s.size(); ++j) {
        const double V = (base.wave.theta(x0s[j]) - cost.L(c)) / lambda;
        rep.samples.push_back({x0s[j], V, J[j], J[j] - V});
    }

    std::size_t positive = 0;
    for (const auto& s : rep.samples) positive += s.gap > 0.0 ? 1 : 0;
    rep.positive_fraction = static_cast<double>(positive) / static_cast<double>(rep.samples.size());
    rep.certified = positive == rep.samples.size();
    return rep;
}

nlohmann::json CoopReport::to_json() const {
    nlohmann::json j;
    j["lambda"] = config.lambda;
    j["lambda0"] = config.lambda0;
    j["q"] = config.q;
    j["samples"] = nlohmann::json::array();
    for (const auto& s : samples) j["samples"].push_back({{"x0", s.x0}, {"V", s.V}, {"J_co", s.J_co}, {"gap", s.gap}});
    j["invasion"] = {{"T_detect", T_detect ? nlohmann::json(*T_detect) : nlohmann::json(nullptr)}, {"level", level}};
    j["certified"] = certified;
    return j;
}

void CoopReport::write_space_time_csv(std::ostream& os) const {
    io::CsvWriter w(os, {"t", "x", "theta", "m"});
    for (const auto& r : space_time) w.row({r.t, r.x, r.theta, r.m});
}

}  // namespace wavegame
