#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wavegame/error.hpp"
#include "wavegame/wave_builder.hpp"

using namespace wavegame;

namespace {

const BistableNonlinearity& F03() {
    static const auto f = cubic(0.3);
    return f;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const WaveError& e) {
        return e.code();
    }
    FAIL("expected a WaveError");
    return ErrorCode::NoConvergence;
}

}  // namespace

TEST_CASE("departure point at the exact maximum is the maximum") {
    const auto& f = F03();
    const auto g0 = unstable_manifold(f, 0.05);
    const auto ext = gamma0_extrema(f, g0);
    CHECK(departure_point(f, g0, ext.gamma0_prime_max, 0) == doctest::Approx(ext.s_star));
    CHECK(code_of([&] { departure_point(f, g0, 1.01 * ext.gamma0_prime_max, 0); }) == ErrorCode::SpeedTooLarge);
}

TEST_CASE("monotone wave at lambda = 0.79") {
    const auto& f = F03();
    const auto L = Lagrangian::quadratic();
    const auto bw = construct_wave(f, L, 0.79, 0.05);
    const auto& w = bw.wave;
    CHECK(w.theta(0.0) >= f.eta_under);
    const double slope = 0.79 * L.dL(0.05);
    for (double s : {0.0, w.s1()}) {
        CHECK(std::abs(w.theta(s - 1e-12) - w.theta(s + 1e-12)) < 1e-8);
        CHECK(std::abs(w.theta_prime(s - 1e-12) - slope) < 1e-8);
        CHECK(std::abs(w.theta_prime(s + 1e-12) - slope) < 1e-8);
    }
    CHECK(w.theta_second(f, -1e-9) < 0.0);
    const auto rep = validity_report(w, bw.density, L);
    CHECK(rep.all_passed());
    const double h = 1e-2;
    const auto res = ode_residual(f, w, bw.density, -30.0, w.s1() + 30.0, h);
    CHECK(res.max_residual <= 10.0 * h * h * res.scale);
    CHECK(w.theta(-60.0) < 1e-3);
    CHECK(w.theta(w.s1() + 60.0) > 1.0 - 1e-3);
}

TEST_CASE("density formula and mass") {
    const auto& f = F03();
    const LinearBridge b{0.35, 0.04, 15.0};
    const auto d = linear_bridge(f, 0.1, b);
    // Θ = 0.55 at s = 5: (f(0.55) + c·slope)/0.55.
    CHECK(d(5.0) == doctest::Approx((0.55 * 0.25 * 0.45 + 0.004) / 0.55).epsilon(1e-6));
    for (std::size_t i = 0; i < d.s.size(); ++i) {
        const double th = b.theta0 + b.slope * d.s[i];
        if (f.f(th) >= 0.0) CHECK(d.m[i] >= 0.1 * b.slope / th - 1e-14);
    }
    const auto integrand = [&](double s) {
        const double th = b.theta0 + b.slope * s;
        return (f.f(th) + 0.1 * b.slope) / th;
    };
    const double oracle = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, b.s1, 10, 1e-13);
    CHECK(d.mass == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(d(-0.1) == 0.0);
    CHECK(d(b.s1 + 0.1) == 0.0);
}

TEST_CASE("negative density is refused") {
    const auto& f = F03();
    // Θ well inside (0, η) with almost no drift: f(Θ) < 0 dominates.
    CHECK(code_of([&] { linear_bridge(f, 1e-4, LinearBridge{0.05, 1e-3, 10.0}); }) == ErrorCode::NegativeDensity);
}

TEST_CASE("landing point") {
    const auto& f = F03();
    const auto g1 = stable_manifold(f, 0.1, 0.5 * f.eta_under);
    const auto near_one = landing_point(g1, 1e-6);
    CHECK(near_one.gamma1 > 0.999);
    const auto l = landing_point(g1, 0.79 * 0.1);
    CHECK(l.gamma1 > 0.3);
    CHECK(l.gamma1 < 1.0);
    double sup_p = 0.0;
    for (const auto& s : g1.path.samples()) sup_p = std::max(sup_p, s.y[1]);
    CHECK(code_of([&] { landing_point(g1, 2.0 * sup_p); }) == ErrorCode::NoLanding);
}

TEST_CASE("speeds around c0") {
    const auto& f = F03();
    const auto L = Lagrangian::quadratic();
    for (double lam : {0.2, 0.79, 2.0}) {
        const double c0 = c0_of_lambda(f, L, lam).value;
        CHECK_NOTHROW(construct_wave(f, L, lam, 0.99 * c0));
        CHECK(code_of([&] { construct_wave(f, L, lam, 1.01 * c0); }) == ErrorCode::SpeedTooLarge);
        CHECK(std::abs(*gamma0_slope_peak(f, c0, 0) - lam * L.dL(c0)) < 1e-8);
    }
}

TEST_CASE("c0 decreases in lambda and vanishes for large lambda") {
    const auto& f = F03();
    const auto L = Lagrangian::quadratic();
    const double a = c0_of_lambda(f, L, 0.39).value;
    const double b = c0_of_lambda(f, L, 0.79).value;
    const double c10 = c0_of_lambda(f, L, 10.0).value;
    const double c100 = c0_of_lambda(f, L, 100.0).value;
    CHECK(a > b);
    CHECK(b > c10);
    CHECK(c10 < 0.01);
    CHECK(c100 <= c10);
    CHECK(c100 < 1e-3);
}

TEST_CASE("c0 agrees with a dense scan") {
    const auto& f = F03();
    const auto L = Lagrangian::quadratic();
    const double c0 = c0_of_lambda(f, L, 0.79).value;
    // Oracle: last grid point where the slope maximum still exceeds λL'(c).
    double last = 0.0;
    for (int i = 1; i <= 400; ++i) {
        const double c = 0.2 * i / 400.0;
        if (*gamma0_slope_peak(f, c, 0) >= 0.79 * c) last = c;
    }
    CHECK(std::abs(c0 - last) <= 0.2 / 400.0);
}

TEST_CASE("maximal speed c_max") {
    const auto& f = F03();
    const auto L2 = harvest_power_family(f.eta_under, 1.0);
    const double cm = c_max_of_L(f, L2);
    CHECK(cm > 1.0);
    CHECK(std::abs(L2.L(cm) - gamma0_extrema(f, cm, ManifoldOptions{.stop_at_first_turn = true}).gamma0_max) < 1e-8);
    CHECK(c_max_of_L(f, Lagrangian::power_law(1000.0, 2.0)) < 0.1);
}

TEST_CASE("k-bump waves at lambda = 0.39") {
    const auto& f = F03();
    const auto L = Lagrangian::quadratic();
    for (int k : {1, 2}) {
        const double ck = ck_of_lambda(f, L, 0.39, k).value;
        const auto bw = construct_wave(f, L, 0.39, 0.5 * ck, k);
        const auto rep = validity_report(bw.wave, bw.density, L);
        CHECK(rep.all_passed());
        CHECK(rep.at("bump_count").value == doctest::Approx(k));
        const auto sw = sample(bw.wave, bw.density, bw.wave.left.s_front() - bw.wave.left_anchor,
                               bw.wave.s1() + bw.wave.right.s_back() - bw.wave.right_anchor, 20001);
        int changes = 0;
        for (std::size_t i = 1; i < sw.theta_prime.size(); ++i)
            if ((sw.theta_prime[i - 1] > 0.0) != (sw.theta_prime[i] > 0.0)) ++changes;
        CHECK(changes == 2 * k);
    }
}

TEST_CASE("speed map columns are ordered") {
    const auto& f = F03();
    const auto maps = speed_maps(f, Lagrangian::quadratic(), {0.2, 0.39, 0.79}, 2);
    for (std::size_t i = 0; i < maps.lambdas.size(); ++i) {
        CHECK(maps.ck[0][i] >= maps.ck[1][i]);
        CHECK(maps.ck[1][i] >= maps.ck[2][i]);
        if (i > 0) CHECK(maps.ck[0][i] < maps.ck[0][i - 1]);
    }
    std::ostringstream os;
    maps.write_csv(os);
    CHECK(os.str().rfind("lambda,c0,c1,c2\n", 0) == 0);
    CHECK_THROWS_AS(speed_maps(f, Lagrangian::quadratic(), {}, 0), ConfigError);
}

TEST_CASE("periodic wave") {
    const auto& f = F03();
    const auto L = Lagrangian::quadratic();
    const auto bp = construct_periodic(f, L, 0.39, 0.05);
    const auto& w = bp.wave;
    const double P = w.period;
    double drift = 0.0;
    for (int i = 0; i <= 4000; ++i) {
        const double s = 2.0 * P * i / 4000.0;
        drift = std::max(drift, std::abs(w.theta(s + P) - w.theta(s)));
    }
    CHECK(drift <= 1e-6);
    CHECK(w.junction_jump() <= 1e-8);
    for (int i = 0; i <= 100; ++i) {
        const double s = w.bridge.s1 * i / 100.0 * 0.999;
        CHECK(std::abs(w.theta_prime(s) - 0.39 * 0.05) < 1e-8);
    }
    const auto sw = sample(w, bp.density, 0.0, P * (1.0 - 1e-9), 4001);
    CHECK(count_local_maxima(sw.theta_prime) == 1);
    std::vector<double> neg(sw.theta_prime.size());
    for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -sw.theta_prime[i];
    CHECK(count_local_maxima(neg) == 1);
}

TEST_CASE("validity report flags hand-built violations") {
    const auto L = Lagrangian::quadratic();
    FishermanDensity d;
    d.s1 = 10.0;
    for (int i = 0; i <= 100; ++i) {
        d.s.push_back(0.1 * i);
        d.m.push_back(0.1);
    }
    d.mass = 1.0;
    auto make = [&](double theta0, bool curved) {
        SampledWave w;
        w.c = 1.0;
        w.lambda = 0.05;
        const double slope = w.lambda * L.dL(w.c);
        for (int i = -200; i <= 300; ++i) {
            const double s = 0.05 * i;
            const double base = theta0 + slope * s + (curved && s >= 0 && s <= 10 ? 1e-3 * s * (10 - s) : 0.0);
            w.s.push_back(s);
            w.theta.push_back(base);
            w.theta_prime.push_back(slope + (curved && s >= 0 && s <= 10 ? 1e-3 * (10 - 2 * s) : 0.0));
            w.m.push_back(s >= 0 && s <= 10 ? 0.1 : 0.0);
        }
        return validity_report(w, d, L);
    };
    const auto ok = make(0.6, false);
    CHECK(ok.at("max_speed").passed);
    CHECK(ok.at("affine_on_support").passed);
    const auto too_fast = make(0.4, false);  // L(1) = 0.5 > Θ(0)
    CHECK_FALSE(too_fast.at("max_speed").passed);
    CHECK_FALSE(too_fast.all_passed());
    const auto curved = make(0.6, true);
    CHECK_FALSE(curved.at("affine_on_support").passed);
}

TEST_CASE("density mass is stable under refinement") {
    const auto& f = F03();
    const auto L = Lagrangian::quadratic();
    WaveOptions fine;
    fine.density_points = 4096;
    const double m1 = construct_wave(f, L, 0.79, 0.05).density.mass;
    const double m2 = construct_wave(f, L, 0.79, 0.05, 0, fine).density.mass;
    CHECK(std::abs(m1 - m2) / m2 < 1e-4);
}

TEST_CASE("property: random admissible speeds give valid monotone waves") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> lam(0.3, 3.0), frac(0.1, 0.95);
    const auto& f = F03();
    const auto L = Lagrangian::quadratic();
    for (int t = 0; t < 6; ++t) {
        const double l = lam(rng);
        const double c = frac(rng) * c0_of_lambda(f, L, l).value;
        const auto bw = construct_wave(f, L, l, c);
        CHECK(validity_report(bw.wave, bw.density, L).all_passed());
        CHECK(bw.wave.theta(0.0) >= L.L(c));
    }
}
