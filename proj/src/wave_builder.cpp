#include "wavegame/wave_builder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "wavegame/error.hpp"
#include "wavegame/io.hpp"

namespace wavegame {

using numerics::Direction;
using numerics::State;

double FishermanDensity::operator()(double x) const {
    if (x < 0.0 || x > s1 || m.empty()) return 0.0;
    const double h = s1 / static_cast<double>(m.size() - 1);
    const double pos = x / h;
    const auto i = std::min(static_cast<std::size_t>(pos), m.size() - 2);
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * m[i] + w * m[i + 1];
}

double FishermanDensity::sup() const { return m.empty() ? 0.0 : *std::max_element(m.begin(), m.end()); }

double WaveProfile::theta(double s) const {
    if (s < 0.0) return left.at(left_anchor + s).u;
    if (s <= mid.s1) return mid.theta0 + mid.slope * s;
    return right.at(right_anchor + (s - mid.s1)).u;
}

double WaveProfile::theta_prime(double s) const {
    if (s < 0.0) return left.at(left_anchor + s).p;
    if (s <= mid.s1) return mid.slope;
    return right.at(right_anchor + (s - mid.s1)).p;
}

double WaveProfile::theta_second(const BistableNonlinearity& f, double s) const {
    if (s > 0.0 && s < mid.s1) return 0.0;
    const PhasePoint pt = s <= 0.0 ? left.at(left_anchor + s) : right.at(right_anchor + (s - mid.s1));
    return -c * pt.p - f.f(pt.u);
}

namespace {

double wrap(double s, double period) {
    double r = std::fmod(s, period);
    if (r < 0.0) r += period;
    return r;
}

}  // namespace

double PeriodicWave::theta(double s) const {
    const double r = wrap(s, period);
    if (r < bridge.s1) return bridge.theta0 + bridge.slope * r;
    return arc.at(arc_start + (r - bridge.s1)).u;
}

double PeriodicWave::theta_prime(double s) const {
    const double r = wrap(s, period);
    if (r < bridge.s1) return bridge.slope;
    return arc.at(arc_start + (r - bridge.s1)).p;
}

double PeriodicWave::junction_jump() const {
    const PhasePoint top = arc.at(arc_start);
    const PhasePoint foot = arc.at(arc_end);
    return std::max({std::abs(top.u - (bridge.theta0 + bridge.slope * bridge.s1)), std::abs(top.p - bridge.slope),
                     std::abs(foot.u - bridge.theta0), std::abs(foot.p - bridge.slope)});
}

void SampledWave::write_csv(std::ostream& os) const {
    io::CsvWriter csv(os, {"s", "theta", "theta_prime", "m"});
    for (std::size_t i = 0; i < s.size(); ++i) csv.row({s[i], theta[i], theta_prime[i], m[i]});
}

namespace {

template <class Wave, class DensityAt>
SampledWave sample_impl(const Wave& w, DensityAt density_at, double s_lo, double s_hi, std::size_t n) {
    if (n < 2 || !(s_hi > s_lo)) throw ConfigError("sample: need n >= 2 and s_hi > s_lo");
    SampledWave out;
    out.c = w.c;
    out.lambda = w.lambda;
    const double h = (s_hi - s_lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = s_lo + h * static_cast<double>(i);
        out.s.push_back(s);
        out.theta.push_back(w.theta(s));
        out.theta_prime.push_back(w.theta_prime(s));
        out.m.push_back(density_at(s));
    }
    return out;
}

}  // namespace

SampledWave sample(const WaveProfile& w, const FishermanDensity& d, double s_lo, double s_hi, std::size_t n) {
    SampledWave out = sample_impl(w, [&d](double s) { return d(s); }, s_lo, s_hi, n);
    out.k = w.k;
    return out;
}

SampledWave sample(const PeriodicWave& w, const FishermanDensity& d, double s_lo, double s_hi, std::size_t n) {
    const double P = w.period;
    return sample_impl(w, [&d, P](double s) { return d(wrap(s, P)); }, s_lo, s_hi, n);
}

double departure_point(const BistableNonlinearity& f, const Trajectory& gamma0, double slope, int k) {
    const auto maxima = slope_maxima(f, gamma0);
    if (static_cast<int>(maxima.size()) <= k)
        throw WaveError(ErrorCode::SpeedTooLarge, "Gamma' has only " + std::to_string(maxima.size()) +
                                                      " local maxima, bump count " + std::to_string(k) + " requested");
    const SlopeMaximum top = maxima[static_cast<std::size_t>(k)];
    if (top.value < slope)
        throw WaveError(ErrorCode::SpeedTooLarge, "lambda L'(c) = " + std::to_string(slope) +
                                                      " exceeds the slope maximum " + std::to_string(top.value));
    if (top.value == slope) return top.s;

    auto excess = [&](double s) { return gamma0.path(s)[1] - slope; };
    double a = top.s;
    for (const auto& smp : gamma0.path.samples()) {
        if (smp.t <= top.s) continue;
        if (smp.y[1] - slope <= 0.0) return numerics::find_root(excess, a, smp.t, 1e-12);
        a = smp.t;
    }
    throw WaveError(ErrorCode::EventNotBracketed, "Gamma_0 ends before falling back to lambda L'(c)");
}

FishermanDensity linear_bridge(const BistableNonlinearity& f, double c, const LinearBridge& bridge,
                               std::size_t points, double tol) {
    if (!(bridge.slope > 0.0)) throw ConfigError("linear_bridge: slope must be positive");
    if (!(bridge.s1 > 0.0)) throw ConfigError("linear_bridge: s1 must be positive");
    if (points < 2) throw ConfigError("linear_bridge: need at least 2 points");
    FishermanDensity d;
    d.s1 = bridge.s1;
    const double h = bridge.s1 / static_cast<double>(points - 1);
    double lowest = INFINITY;
    for (std::size_t i = 0; i < points; ++i) {
        const double s = h * static_cast<double>(i);
        const double th = bridge.theta0 + bridge.slope * s;
        const double m = (f.f(th) + c * bridge.slope) / th;
        lowest = std::min(lowest, m);
        d.s.push_back(s);
        d.m.push_back(std::max(m, 0.0));
    }
    if (lowest < -tol) throw WaveError(ErrorCode::NegativeDensity, "min M = " + std::to_string(lowest));
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < points; ++i) mass += 0.5 * h * (d.m[i] + d.m[i + 1]);
    d.mass = mass;
    return d;
}

Landing landing_point(const Trajectory& gamma1, double slope) {
    const auto smp = gamma1.path.samples();
    if (smp.back().y[1] >= slope) {
        // Crossing lies in the exponential approach to (1, 0).
        if (!gamma1.right_tail) throw WaveError(ErrorCode::NoLanding, "slope below the end of Gamma_1");
        const ExponentialTail& t = *gamma1.right_tail;
        const double s = t.s_anchor + std::log(slope / t.offset.p) / t.rate;
        return {gamma1.at(s).u, s};
    }
    for (std::size_t i = smp.size() - 1; i > 0; --i) {
        if (smp[i - 1].y[1] >= slope) {
            const double r1 = numerics::find_root([&](double s) { return gamma1.path(s)[1] - slope; }, smp[i - 1].t,
                                                  smp[i].t, 1e-12);
            return {gamma1.path(r1)[0], r1};
        }
    }
    throw WaveError(ErrorCode::NoLanding, "lambda L'(c) = " + std::to_string(slope) + " exceeds sup Gamma_1'");
}

BuiltWave construct_wave(const BistableNonlinearity& f, const Lagrangian& L, double lambda, double c, int k,
                         const WaveOptions& opts) {
    if (!(lambda > 0.0)) throw ConfigError("construct_wave: lambda must be positive");
    if (!(c > 0.0)) throw ConfigError("construct_wave: c must be positive");
    if (k < 0) throw ConfigError("construct_wave: k must be >= 0");
    if (k >= 1 && classify_eta(f, c).kind != EtaKind::SpiralSink)
        throw WaveError(ErrorCode::SpeedTooLarge, "bumps need c below the spiral threshold " +
                                                      std::to_string(spiral_threshold(f)));
    const double slope = lambda * L.dL(c);

    ManifoldOptions mo = opts.manifold;
    mo.max_slope_maxima = k + 2;
    mo.extra_stops.push_back({[slope](double, const State& y) { return y[1] - slope; }, Direction::Falling, k + 1});
    Trajectory gamma0 = unstable_manifold(f, c, mo);
    const double s0 = departure_point(f, gamma0, slope, k);
    gamma0.path.truncate_after(s0);
    const double theta0 = gamma0.path(s0)[0];

    Trajectory gamma1 = stable_manifold(f, c, 0.5 * f.eta_under, opts.manifold);
    const Landing land = landing_point(gamma1, slope);
    if (!(land.gamma1 > theta0))
        throw WaveError(ErrorCode::NoLanding, "landing value " + std::to_string(land.gamma1) +
                                                  " does not exceed the departure value " + std::to_string(theta0));

    BuiltWave out;
    WaveProfile& w = out.wave;
    w.mid = {theta0, slope, (land.gamma1 - theta0) / slope};
    w.left = std::move(gamma0);
    w.left_anchor = s0;
    w.right = std::move(gamma1);
    w.right_anchor = land.r1;
    w.c = c;
    w.lambda = lambda;
    w.k = k;
    out.density = linear_bridge(f, c, w.mid, opts.density_points, opts.density_tol);
    return out;
}

BuiltPeriodic construct_periodic(const BistableNonlinearity& f, const Lagrangian& L, double lambda, double c,
                                 const WaveOptions& opts) {
    if (!(lambda > 0.0)) throw ConfigError("construct_periodic: lambda must be positive");
    if (!(c > 0.0)) throw ConfigError("construct_periodic: c must be positive");
    if (classify_eta(f, c).kind != EtaKind::SpiralSink)
        throw WaveError(ErrorCode::NoPeriodicOrbit, "(eta, 0) is not a spiral sink at this speed");
    const double slope = lambda * L.dL(c);
    const Trajectory gamma0 = unstable_manifold(f, c, opts.manifold);
    const auto maxima = slope_maxima(f, gamma0);

    struct Foot { double s; double u; };
    std::vector<Foot> feet;
    for (std::size_t j = 0; j < maxima.size() && maxima[j].value >= slope; ++j) {
        const double a = departure_point(f, gamma0, slope, static_cast<int>(j));
        feet.push_back({a, gamma0.path(a)[0]});
    }
    if (feet.size() < 2)
        throw WaveError(ErrorCode::NoPeriodicOrbit, "only " + std::to_string(feet.size()) +
                                                        " points where Gamma' falls through lambda L'(c)");

    std::size_t best = feet.size();
    double best_period = INFINITY;
    for (std::size_t j = 0; j + 1 < feet.size(); ++j) {
        const double rise = feet[j].u - feet[j + 1].u;
        if (!(rise > 0.0)) continue;
        const double P = (feet[j + 1].s - feet[j].s) + rise / slope;
        if (P < best_period) {
            best_period = P;
            best = j;
        }
    }
    if (best == feet.size()) throw WaveError(ErrorCode::NoPeriodicOrbit, "no arc returns below its start");

    BuiltPeriodic out;
    PeriodicWave& w = out.wave;
    w.bridge = {feet[best + 1].u, slope, (feet[best].u - feet[best + 1].u) / slope};
    w.arc_start = feet[best].s;
    w.arc_end = feet[best + 1].s;
    w.period = best_period;
    w.c = c;
    w.lambda = lambda;
    w.arc = gamma0;
    out.density = linear_bridge(f, c, w.bridge, opts.density_points, opts.density_tol);
    return out;
}

namespace {

std::vector<double> geometric_grid(double lo, double hi, std::size_t n) {
    std::vector<double> xs(n);
    const double r = std::log(hi / lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) xs[i] = lo * std::exp(r * static_cast<double>(i));
    xs.back() = hi;
    return xs;
}

/// Last index i with g[i] > 0 >= g[i+1], or npos.
std::size_t last_fall(const std::vector<double>& g) {
    std::size_t hit = g.size();
    for (std::size_t i = 0; i + 1 < g.size(); ++i)
        if (g[i] > 0.0 && g[i + 1] <= 0.0) hit = i;
    return hit;
}

}  // namespace

SpeedValue ck_of_lambda(const BistableNonlinearity& f, const Lagrangian& L, double lambda, int k,
                        const SpeedScan& scan) {
    if (!(lambda > 0.0)) throw ConfigError("ck_of_lambda: lambda must be positive");
    double hi = scan.c_hi;
    if (k >= 1) hi = std::min(hi, spiral_threshold(f) * (1.0 - 1e-9));
    if (!(hi > scan.c_lo)) return {0.0, false};

    auto g = [&f, &L, lambda, k](double c) {
        const auto peak = gamma0_slope_peak(f, c, k);
        if (!peak) return -1.0;
        return *peak - lambda * L.dL(c);
    };
    const auto cs = geometric_grid(scan.c_lo, hi, scan.points);
    const auto gs = kernels::map_scan(g, cs, scan.exec);
    if (gs.front() <= 0.0) return {0.0, false};
    const std::size_t i = last_fall(gs);
    if (i == gs.size()) return {INFINITY, true};
    return {numerics::find_root(g, cs[i], cs[i + 1], scan.tol), false};
}

double c_max_of_L(const BistableNonlinearity& f, const Lagrangian& L, const SpeedScan& scan) {
    auto h = [&f, &L](double c) {
        ManifoldOptions mo;
        mo.stop_at_first_turn = true;
        return gamma0_extrema(f, c, mo).gamma0_max - L.L(c);
    };
    const double lo = std::min(scan.c_lo, 1e-4);
    const auto cs = geometric_grid(lo, std::max(scan.c_hi, 10.0 * lo), 4 * scan.points);
    const auto hs = kernels::map_scan(h, cs, scan.exec);
    const std::size_t i = last_fall(hs);
    if (i == hs.size()) {
        if (hs.back() > 0.0) return INFINITY;
        throw WaveError(ErrorCode::NoExtinctionSpeed, "L(c) >= sup Gamma_{0,c} on the whole scan");
    }
    return numerics::find_root(h, cs[i], cs[i + 1], scan.tol);
}

void SpeedMaps::write_csv(std::ostream& os) const {
    std::vector<std::string> header{"lambda"};
    for (std::size_t k = 0; k < ck.size(); ++k) header.push_back("c" + std::to_string(k));
    io::CsvWriter csv(os, header);
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        std::vector<double> row{lambdas[i]};
        for (const auto& curve : ck) row.push_back(curve[i]);
        csv.row(row);
    }
}

SpeedMaps speed_maps(const BistableNonlinearity& f, const Lagrangian& L, const std::vector<double>& lambdas,
                     int k_max, const SpeedScan& scan) {
    if (lambdas.empty()) throw ConfigError("speed_maps: empty lambda grid");
    SpeedMaps maps;
    maps.lambdas = lambdas;
    for (int k = 0; k <= k_max; ++k) {
        std::vector<double> curve;
        for (double lam : lambdas) curve.push_back(ck_of_lambda(f, L, lam, k, scan).value);
        maps.ck.push_back(std::move(curve));
    }
    maps.c_max = c_max_of_L(f, L, scan);
    return maps;
}

bool ValidityReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const ValidityCheck& c) { return c.passed; });
}

const ValidityCheck& ValidityReport::at(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return c;
    throw std::out_of_range("no validity check named " + name);
}

int count_local_maxima(const std::vector<double>& theta_prime) {
    int n = 0;
    for (std::size_t i = 0; i + 1 < theta_prime.size(); ++i)
        if (theta_prime[i] > 0.0 && theta_prime[i + 1] <= 0.0) ++n;
    return n;
}

ValidityReport validity_report(const SampledWave& w, const FishermanDensity& d, const Lagrangian& L, double tol) {
    ValidityReport rep;
    const double slope = w.lambda * L.dL(w.c);
    const double s1 = d.s1;

    // Reference node on the support, used to read Θ(0) off the affine piece.
    std::size_t ref = w.s.size();
    for (std::size_t i = 0; i < w.s.size(); ++i)
        if (w.s[i] >= 0.0 && w.s[i] <= s1) {
            ref = i;
            break;
        }
    double theta0 = NAN;
    double affine_dev = 0.0;
    double slope_dev = 0.0;
    if (ref < w.s.size()) {
        theta0 = w.theta[ref] - slope * w.s[ref];
        for (std::size_t i = ref; i < w.s.size() && w.s[i] <= s1; ++i) {
            affine_dev = std::max(affine_dev, std::abs(w.theta[i] - (theta0 + slope * w.s[i])));
            slope_dev = std::max(slope_dev, std::abs(w.theta_prime[i] - slope));
        }
    } else {
        affine_dev = slope_dev = INFINITY;
    }
    const double margin = theta0 - L.L(w.c);
    rep.checks.push_back({"max_speed", margin >= 0.0, margin});
    rep.checks.push_back({"affine_on_support", affine_dev <= tol, affine_dev});
    rep.checks.push_back({"slope_on_support", slope_dev <= tol, slope_dev});

    const double m_min = d.m.empty() ? 0.0 : *std::min_element(d.m.begin(), d.m.end());
    rep.checks.push_back({"density_nonnegative", m_min >= 0.0, m_min});
    bool outside_zero = std::isfinite(s1) && s1 > 0.0;
    for (std::size_t i = 0; i < w.s.size(); ++i)
        if ((w.s[i] < 0.0 || w.s[i] > s1) && w.m[i] != 0.0) outside_zero = false;
    rep.checks.push_back({"compact_support", outside_zero, s1});

    if (w.k == 0) {
        const double lowest = *std::min_element(w.theta_prime.begin(), w.theta_prime.end());
        rep.checks.push_back({"monotone", lowest > 0.0, lowest});
    } else {
        const int bumps = count_local_maxima(w.theta_prime);
        rep.checks.push_back({"bump_count", bumps == w.k, static_cast<double>(bumps)});
    }
    return rep;
}

ValidityReport validity_report(const WaveProfile& w, const FishermanDensity& d, const Lagrangian& L, double tol) {
    // Window from the Γ_0 seed to the Γ_1 seed, where the tails are still resolved.
    const double s_lo = w.left.s_front() - w.left_anchor;
    const double s_hi = w.mid.s1 + (w.right.s_back() - w.right_anchor);
    const std::size_t n = 20001;
    return validity_report(sample(w, d, s_lo, s_hi, n), d, L, tol);
}

OdeResidual ode_residual(const BistableNonlinearity& f, const WaveProfile& w, const FishermanDensity& d, double s_lo,
                         double s_hi, double h) {
    OdeResidual out{0.0, 1.0};
    double sup_f = 0.0, sup_p = 0.0, sup_mt = 0.0;
    const double s1 = w.mid.s1;
    const auto piece = [s1](double s) { return s < 0.0 ? 0 : (s <= s1 ? 1 : 2); };
    const auto n = static_cast<std::size_t>(std::floor((s_hi - s_lo) / h));
    for (std::size_t i = 1; i < n; ++i) {
        const double s = s_lo + h * static_cast<double>(i);
        const int p = piece(s);
        if (piece(s - h) != p || piece(s + h) != p) continue;
        const double th = w.theta(s);
        const double thp = w.theta_prime(s);
        const double th2 = (w.theta(s + h) - 2.0 * th + w.theta(s - h)) / (h * h);
        const double mt = d(s) * th;
        const double r = std::abs(-th2 - w.c * thp - f.f(th) + mt);
        out.max_residual = std::max(out.max_residual, r);
        sup_f = std::max(sup_f, std::abs(f.f(th)));
        sup_p = std::max(sup_p, std::abs(thp));
        sup_mt = std::max(sup_mt, std::abs(mt));
    }
    out.scale = 1.0 + sup_f + w.c * sup_p + sup_mt;
    return out;
}

}  // namespace wavegame
