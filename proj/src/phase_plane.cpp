#include "wavegame/phase_plane.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "wavegame/error.hpp"
#include "wavegame/io.hpp"

namespace wavegame {

using numerics::Direction;
using numerics::Event;
using numerics::State;

BistableNonlinearity cubic(double eta) {
    if (!(eta > 0.0 && eta < 1.0))
        throw WaveError(ErrorCode::InvalidEta, "eta must lie in (0, 1), got " + std::to_string(eta));
    BistableNonlinearity nl;
    nl.eta = eta;
    nl.f = [eta](double u) { return u * (u - eta) * (1.0 - u); };
    nl.df = [eta](double u) { return -3.0 * u * u + 2.0 * (1.0 + eta) * u - eta; };
    nl.F = [eta](double u) {
        const double u2 = u * u;
        return u2 * u * (1.0 + eta) / 3.0 - u2 * u2 / 4.0 - eta * u2 / 2.0;
    };
    // Critical points of f are the roots of -3u² + 2(1+η)u - η.
    const double disc = std::sqrt((1.0 + eta) * (1.0 + eta) - 3.0 * eta);
    nl.eta_under = ((1.0 + eta) - disc) / 3.0;
    const double upper = ((1.0 + eta) + disc) / 3.0;
    nl.sup_norm = std::max(std::abs(nl.f(nl.eta_under)), std::abs(nl.f(upper)));
    return nl;
}

double energy(const BistableNonlinearity& f, PhasePoint pt) { return 0.5 * pt.p * pt.p + f.F(pt.u); }

numerics::VectorField wave_field(const BistableNonlinearity& f, double c) {
    return [fn = f.f, c](double, const State& y) -> State { return {y[1], -fn(y[0]) - c * y[1]}; };
}

PhasePoint Trajectory::at(double s) const {
    auto eval_tail = [](const ExponentialTail& t, double s) {
        const double e = std::exp(t.rate * (s - t.s_anchor));
        return PhasePoint{t.base.u + t.offset.u * e, t.base.p + t.offset.p * e};
    };
    if (s < s_front()) {
        if (left_tail) return eval_tail(*left_tail, s);
        const auto& y = path.samples().front().y;
        return {y[0], y[1]};
    }
    if (s > s_back()) {
        if (right_tail) return eval_tail(*right_tail, s);
        const auto& y = path.samples().back().y;
        return {y[0], y[1]};
    }
    const State y = path(s);
    return {y[0], y[1]};
}

void Trajectory::write_csv(std::ostream& os) const {
    io::CsvWriter csv(os, {"s", "u", "p"});
    for (const auto& smp : path.samples()) csv.row({smp.t, smp.y[0], smp.y[1]});
}

EigenData linearize(const BistableNonlinearity& f, double u_star, double c) {
    const double slope = f.df(u_star);
    const double disc = c * c - 4.0 * slope;
    if (disc < 0.0)
        throw WaveError(ErrorCode::ComplexEigenvalues,
                        "c^2 - 4 f'(u*) = " + std::to_string(disc) + " at u* = " + std::to_string(u_star));
    const double root = std::sqrt(disc);
    EigenData e;
    e.lam_plus = 0.5 * (-c + root);
    e.lam_minus = 0.5 * (-c - root);
    e.v_plus = {1.0, e.lam_plus};
    e.v_minus = {1.0, e.lam_minus};
    return e;
}

double spiral_threshold(const BistableNonlinearity& f) { return 2.0 * std::sqrt(f.df(f.eta)); }

EtaClassification classify_eta(const BistableNonlinearity& f, double c) {
    const double th = spiral_threshold(f);
    if (c < th) return {EtaKind::SpiralSink, false};
    return {EtaKind::StableNode, c == th};
}

namespace {

constexpr double kDomainSlack = 1e-3;

struct StopSet {
    std::vector<Event> events;
    std::size_t domain_hi = 0;
    std::size_t domain_lo = 0;
};

StopSet common_stops(const ManifoldOptions& opts) {
    StopSet s;
    s.domain_hi = s.events.size();
    s.events.push_back({[](double, const State& y) { return y[0] - (1.0 + kDomainSlack); }, Direction::Rising, 1, false});
    s.domain_lo = s.events.size();
    s.events.push_back({[](double, const State& y) { return y[0] + kDomainSlack; }, Direction::Falling, 1, false});
    for (const auto& ev : opts.extra_stops) {
        Event copy = ev;
        copy.required = false;
        s.events.push_back(copy);
    }
    return s;
}

void check_domain(const StopSet& stops, const numerics::IntegrationResult& res) {
    if (!res.terminated_by) return;
    if (*res.terminated_by == stops.domain_hi || *res.terminated_by == stops.domain_lo)
        throw WaveError(ErrorCode::DomainExceeded, "trajectory left [0, 1] at s = " + std::to_string(res.hits.back().t));
}

std::vector<SlopeMaximum> slope_extrema(const BistableNonlinearity& f, const Trajectory& traj, double tol,
                                        bool maxima) {
    std::vector<SlopeMaximum> out;
    const auto smp = traj.path.samples();
    const double c = traj.c;
    auto accel = [&](double s) {
        const State y = traj.path(s);
        return -f.f(y[0]) - c * y[1];
    };
    for (std::size_t i = 0; i + 1 < smp.size(); ++i) {
        const double g0 = smp[i].dy[1];
        const double g1 = smp[i + 1].dy[1];
        const bool hit = maxima ? (g0 > 0.0 && g1 <= 0.0) : (g0 < 0.0 && g1 >= 0.0);
        if (!hit) continue;
        double a = smp[i].t, b = smp[i + 1].t;
        while (b - a > tol) {
            const double m = 0.5 * (a + b);
            if (m == a || m == b) break;
            const double gm = accel(m);
            if (maxima ? gm > 0.0 : gm < 0.0)
                a = m;
            else
                b = m;
        }
        const double s = 0.5 * (a + b);
        const double p = traj.path(s)[1];
        if (maxima && p <= 0.0) continue;
        out.push_back({s, p});
    }
    return out;
}

}  // namespace

Trajectory unstable_manifold(const BistableNonlinearity& f, double c, const ManifoldOptions& opts) {
    if (c < 0.0) throw ConfigError("unstable_manifold: c must be >= 0");
    const EigenData eig = linearize(f, 0.0, c);
    const double eps = opts.seed_eps;
    const PhasePoint seed{eps, eps * eig.lam_plus};
    const double e_seed = energy(f, seed);
    if (e_seed > 1e-12)
        throw WaveError(ErrorCode::SeedTooLarge, "seed energy " + std::to_string(e_seed) + " > 0");
    const double s0 = std::log(eps) / eig.lam_plus;

    StopSet stops = common_stops(opts);
    const double eta = f.eta;
    const double r2 = opts.r_stop * opts.r_stop;
    stops.events.push_back({[eta, r2](double, const State& y) {
                                const double du = y[0] - eta;
                                return du * du + y[1] * y[1] - r2;
                            },
                            Direction::Falling, 1, false});
    // Homoclinic return (c = 0): the orbit comes back to the origin.
    stops.events.push_back({[eps](double, const State& y) { return y[0] - 0.5 * eps; }, Direction::Falling, 1, false});
    // Without damping, round-off turns the homoclinic loop into a closed orbit;
    // stop at its leftmost point instead of circling forever.
    if (c == 0.0) stops.events.push_back({[](double, const State& y) { return y[1]; }, Direction::Rising, 1, false});
    auto fn = f.f;
    if (opts.max_slope_maxima > 0)
        stops.events.push_back({[fn, c](double, const State& y) { return -fn(y[0]) - c * y[1]; }, Direction::Falling,
                                opts.max_slope_maxima, false});
    if (opts.max_slope_minima > 0)
        stops.events.push_back({[fn, c](double, const State& y) { return -fn(y[0]) - c * y[1]; }, Direction::Rising,
                                opts.max_slope_minima, false});
    if (opts.stop_at_first_turn)
        stops.events.push_back({[](double, const State& y) { return y[1]; }, Direction::Falling, 1, false});

    auto res = numerics::integrate(wave_field(f, c), {seed.u, seed.p}, s0, s0 + opts.s_span, stops.events,
                                   opts.integrator);
    check_domain(stops, res);

    Trajectory traj;
    traj.c = c;
    traj.path = std::move(res.path);
    traj.left_tail = ExponentialTail{s0, {0.0, 0.0}, {eps, eps * eig.lam_plus}, eig.lam_plus};
    return traj;
}

Trajectory stable_manifold(const BistableNonlinearity& f, double c, double u_min, const ManifoldOptions& opts) {
    if (c < 0.0) throw ConfigError("stable_manifold: c must be >= 0");
    if (!(u_min > 0.0 && u_min < f.eta)) throw ConfigError("stable_manifold: u_min must lie in (0, eta)");
    const EigenData eig = linearize(f, 1.0, c);
    const double eps = opts.seed_eps;
    const PhasePoint seed{1.0 - eps, -eps * eig.lam_minus};
    if (!(seed.p > 0.0))
        throw WaveError(ErrorCode::SeedBranchWrong, "seed slope " + std::to_string(seed.p) + " is not positive");
    const double s_seed = std::log(eps) / eig.lam_minus;

    StopSet stops = common_stops(opts);
    const std::size_t floor_event = stops.events.size();
    stops.events.push_back({[u_min](double, const State& y) { return y[0] - u_min; }, Direction::Falling, 1, true});

    auto res = numerics::integrate(wave_field(f, c), {seed.u, seed.p}, s_seed, s_seed - opts.s_span, stops.events,
                                   opts.integrator);
    check_domain(stops, res);
    (void)floor_event;

    Trajectory traj;
    traj.c = c;
    traj.path = std::move(res.path);
    traj.right_tail = ExponentialTail{s_seed, {1.0, 0.0}, {-eps, -eps * eig.lam_minus}, eig.lam_minus};
    return traj;
}

std::vector<SlopeMaximum> slope_maxima(const BistableNonlinearity& f, const Trajectory& traj, double tol) {
    return slope_extrema(f, traj, tol, true);
}

std::vector<SlopeMaximum> slope_minima(const BistableNonlinearity& f, const Trajectory& traj, double tol) {
    return slope_extrema(f, traj, tol, false);
}

Gamma0Extrema gamma0_extrema(const BistableNonlinearity& f, const Trajectory& gamma0) {
    Gamma0Extrema out{};
    out.local_max_list = slope_maxima(f, gamma0);
    const auto smp = gamma0.path.samples();
    // Sup of u: sample maximum refined at the turning points p = 0.
    double umax = 0.0;
    for (const auto& s : smp) umax = std::max(umax, s.y[0]);
    for (std::size_t i = 0; i + 1 < smp.size(); ++i) {
        if (!(smp[i].y[1] > 0.0 && smp[i + 1].y[1] <= 0.0)) continue;
        double a = smp[i].t, b = smp[i + 1].t;
        while (b - a > 1e-12) {
            const double m = 0.5 * (a + b);
            if (m == a || m == b) break;
            if (gamma0.path(m)[1] > 0.0)
                a = m;
            else
                b = m;
        }
        umax = std::max(umax, gamma0.path(0.5 * (a + b))[0]);
    }
    out.gamma0_max = umax;
    if (out.local_max_list.empty()) {
        auto it = std::max_element(smp.begin(), smp.end(), [](const auto& a, const auto& b) { return a.y[1] < b.y[1]; });
        out.gamma0_prime_max = it->y[1];
        out.s_star = it->t;
    } else {
        auto it = std::max_element(out.local_max_list.begin(), out.local_max_list.end(),
                                   [](const auto& a, const auto& b) { return a.value < b.value; });
        out.gamma0_prime_max = it->value;
        out.s_star = it->s;
    }
    return out;
}

Gamma0Extrema gamma0_extrema(const BistableNonlinearity& f, double c, const ManifoldOptions& opts) {
    return gamma0_extrema(f, unstable_manifold(f, c, opts));
}

std::optional<double> gamma0_slope_peak(const BistableNonlinearity& f, double c, int k, const ManifoldOptions& opts) {
    ManifoldOptions o = opts;
    o.max_slope_maxima = k + 1;
    const Trajectory g = unstable_manifold(f, c, o);
    const auto maxima = slope_maxima(f, g);
    if (static_cast<int>(maxima.size()) <= k) return std::nullopt;
    return maxima[static_cast<std::size_t>(k)].value;
}

}  // namespace wavegame
