#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "wavegame/cooperation.hpp"
#include "wavegame/error.hpp"

using namespace wavegame;

namespace {

const BistableNonlinearity& F03() {
    static const auto f = cubic(0.3);
    return f;
}

constexpr double kLambda0 = 0.13;

// Wave at c = 1 under L_1 and discount λ0; every L_q at λ0/q shares it.
const BuiltWave& coop_wave() {
    static const BuiltWave bw =
        construct_wave(F03(), harvest_power_family(F03().eta_under, 1.0), kLambda0, 1.0);
    return bw;
}

}  // namespace

TEST_CASE("spreading control and trajectories") {
    const double s1 = 10.0;
    CHECK(alpha_co(0.0, 5.0, s1) == doctest::Approx(0.25));
    CHECK(alpha_co(20.0, 5.0, s1) == doctest::Approx(0.125));
    CHECK(co_trajectory(0.0, 3.0, s1) == 3.0);
    CHECK(co_trajectory(20.0, 3.0, s1) == doctest::Approx(6.0));
    // The trajectory solves x' = α(t, x).
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> x0d(0.0, s1), td(0.0, 100.0);
    for (int i = 0; i < 100; ++i) {
        const double x0 = x0d(rng), t = td(rng), h = 1e-5;
        const double v = (co_trajectory(t + h, x0, s1) - co_trajectory(t - h, x0, s1)) / (2.0 * h);
        CHECK(v == doctest::Approx(alpha_co(t, co_trajectory(t, x0, s1), s1)).epsilon(1e-8));
    }
}

TEST_CASE("transported density keeps its mass") {
    const auto& bw = coop_wave();
    const auto& d = bw.density;
    const double s1 = d.s1;
    CHECK(m_co(0.0, 0.3 * s1, d, s1) == doctest::Approx(d(0.3 * s1)));
    for (double t : {0.0, s1, 10.0 * s1}) CHECK(m_co_mass(t, d, s1) == doctest::Approx(d.mass).epsilon(1e-10));
    // Support stretches to s1(2s1 + t)/(2s1).
    CHECK(m_co(s1, 1.49 * s1, d, s1) > 0.0);
    CHECK(m_co(s1, 1.51 * s1, d, s1) == 0.0);
}

TEST_CASE("peak of the transported density decays like 1/(2s1 + t)") {
    const auto& d = coop_wave().density;
    const double s1 = d.s1;
    for (double t : {0.0, 0.5 * s1, 3.0 * s1, 20.0 * s1}) {
        double sup = 0.0;
        const double hi = s1 * (2.0 * s1 + t) / (2.0 * s1);
        for (int i = 0; i <= 20000; ++i) sup = std::max(sup, m_co(t, hi * i / 20000.0, d, s1));
        CHECK(sup * (2.0 * s1 + t) == doctest::Approx(2.0 * s1 * d.sup()).epsilon(1e-3));
    }
}

TEST_CASE("transported density solves the continuity equation") {
    const auto& d = coop_wave().density;
    const double s1 = d.s1;
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> td(1.0, 200.0), ud(0.05, 0.95);
    for (int i = 0; i < 200; ++i) {
        const double t = td(rng);
        const double x = ud(rng) * s1 * (2.0 * s1 + t) / (2.0 * s1);
        const double h = 1e-4;
        const double mt = (m_co(t + h, x, d, s1) - m_co(t - h, x, d, s1)) / (2.0 * h);
        auto flux = [&](double y) { return alpha_co(t, y, s1) * m_co(t, y, d, s1); };
        const double fx = (flux(x + h) - flux(x - h)) / (2.0 * h);
        // M is piecewise linear, so kinks cost a few digits; the residual is relative to |∂t m|.
        CHECK(std::abs(mt + fx) <= 1e-3 * (std::abs(mt) + std::abs(fx)) + 1e-9);
    }
}

TEST_CASE("cost family invariances") {
    const double eu = F03().eta_under;
    for (double q : {1.0, 2.0, 4.0, 8.0}) {
        const auto cm = lagrangian_family(kLambda0 / q, kLambda0, eu);
        CHECK(cm.L(1.0) == doctest::Approx(0.5 * eu));
        CHECK(cm.L(-1.0) == doctest::Approx(0.5 * eu));
        // λ L_q'(1) = λ0 η̲ for every q.
        CHECK(cm.bridge_slope() == doctest::Approx(kLambda0 * eu));
        CHECK(cm.L(0.5) <= 0.5 * eu * 0.25 + 1e-15);
        CHECK(cm.L(1.5) >= 0.5 * eu * 2.25 - 1e-15);
    }
    CHECK_THROWS_AS(lagrangian_family(0.2, kLambda0, eu), ConfigError);
    CHECK_THROWS_AS(CoopConfig::make(10.0, kLambda0, 0.2, eu), ConfigError);
    CHECK_THROWS_AS(CoopConfig::make(-1.0, kLambda0, 0.1, eu), ConfigError);
    CHECK(CoopConfig::make(10.0, kLambda0, kLambda0 / 4.0, eu).q == doctest::Approx(4.0));
}

TEST_CASE("the wave does not depend on q") {
    const auto& f = F03();
    const auto& ref = coop_wave();
    for (double q : {2.0, 4.0, 8.0}) {
        const auto cm = lagrangian_family(kLambda0 / q, kLambda0, f.eta_under);
        const auto bw = construct_wave(f, cm.lagrangian, cm.lambda, 1.0);
        CHECK(bw.density.s1 == doctest::Approx(ref.density.s1).epsilon(1e-9));
        for (double s = -30.0; s <= ref.density.s1 + 30.0; s += 0.5)
            CHECK(bw.wave.theta(s) == doctest::Approx(ref.wave.theta(s)).epsilon(1e-9));
    }
}

TEST_CASE("cooperative run on a coarse grid") {
    const auto& f = F03();
    CoopOptions o;
    o.dx = 0.25;
    o.dt = 0.125;
    o.samples = 8;
    o.csv_every = 100.0;
    o.csv_node_stride = 50;
    const auto rep = compare_payoffs(f, coop_wave(), kLambda0, kLambda0 / 8.0, o);
    REQUIRE(rep.T_detect);
    CHECK(*rep.T_detect > 0.0);
    CHECK(rep.level == doctest::Approx(0.9));
    CHECK(rep.samples.size() == 8);
    CHECK(rep.positive_fraction >= 0.0);
    CHECK(rep.positive_fraction <= 1.0);
    CHECK(rep.certified == (rep.positive_fraction == 1.0));
    for (const auto& s : rep.samples) {
        CHECK(s.gap == doctest::Approx(s.J_co - s.V));
        CHECK(s.x0 > 0.0);
        CHECK(s.x0 < rep.config.s1);
    }
    const auto j = rep.to_json();
    CHECK(j["q"].get<double>() == doctest::Approx(8.0));
    CHECK(j["invasion"]["T_detect"].is_number());
    std::ostringstream os;
    rep.write_space_time_csv(os);
    CHECK(os.str().rfind("t,x,theta,m", 0) == 0);
    CHECK(!rep.space_time.empty());
}

TEST_CASE("invasion failure is reported") {
    CoopOptions o;
    o.dx = 0.25;
    o.dt = 0.125;
    o.samples = 4;
    try {
        compare_payoffs(F03(), coop_wave(), kLambda0, kLambda0 / 2.0, o);
        FAIL("expected InvasionFailed");
    } catch (const WaveError& e) {
        CHECK(e.code() == ErrorCode::InvasionFailed);
    }
}
