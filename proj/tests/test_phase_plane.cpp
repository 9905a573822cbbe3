#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "wavegame/error.hpp"
#include "wavegame/phase_plane.hpp"

using namespace wavegame;

namespace {

// p on the first rising branch of a trajectory, as a function of u.
double p_at_u(const Trajectory& tr, double u) {
    const auto s = tr.path.samples();
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i].y[1] <= 0.0) break;
        if (s[i - 1].y[0] <= u && s[i].y[0] >= u) {
            const double w = (u - s[i - 1].y[0]) / (s[i].y[0] - s[i - 1].y[0]);
            return (1.0 - w) * s[i - 1].y[1] + w * s[i].y[1];
        }
    }
    return NAN;
}

int p_sign_changes(const Trajectory& tr) {
    int n = 0;
    const auto s = tr.path.samples();
    for (std::size_t i = 1; i < s.size(); ++i)
        if ((s[i - 1].y[1] > 0.0) != (s[i].y[1] > 0.0)) ++n;
    return n;
}

}  // namespace

TEST_CASE("cubic nonlinearity") {
    const auto f = cubic(0.3);
    CHECK(f.f(0.3) == 0.0);
    CHECK(f.f(1.0) == 0.0);
    CHECK(f.F(1.0) == doctest::Approx(1.0 / 12.0 - 0.3 / 6.0).epsilon(1e-14));
    CHECK(f.eta_under == doctest::Approx((2.6 - std::sqrt(2.6 * 2.6 - 3.6)) / 6.0).epsilon(1e-12));
    CHECK(std::abs(f.df(f.eta_under)) < 1e-12);
    CHECK(f.df(0.0) < 0.0);
    CHECK(f.df(1.0) < 0.0);
    CHECK(f.df(0.3) > 0.0);
    CHECK(f.is_invading());
    CHECK(std::abs(cubic(0.5).F(1.0)) < 1e-15);
    CHECK_FALSE(cubic(0.5).is_invading());
    CHECK_THROWS_AS(cubic(1.5), WaveError);
    CHECK_THROWS_AS(cubic(0.0), WaveError);
}

TEST_CASE("property: F is the antiderivative of f") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> eta(0.05, 0.95), u(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        const auto f = cubic(eta(rng));
        const double x = u(rng), h = 1e-5;
        CHECK((f.F(x + h) - f.F(x - h)) / (2 * h) == doctest::Approx(f.f(x)).epsilon(1e-7));
        CHECK((f.f(x + h) - f.f(x - h)) / (2 * h) == doctest::Approx(f.df(x)).epsilon(1e-6));
    }
}

TEST_CASE("energy values") {
    const auto f = cubic(0.3);
    CHECK(energy(f, {0.0, 0.0}) == 0.0);
    CHECK(energy(f, {1.0, 0.0}) == doctest::Approx(1.0 / 12.0 - 0.05));
    CHECK(energy(f, {0.0, 0.2}) == doctest::Approx(0.02));
}

TEST_CASE("linearization at the equilibria") {
    const auto f = cubic(0.3);
    const auto e0 = linearize(f, 0.0, 0.0);
    CHECK(e0.lam_plus == doctest::Approx(std::sqrt(0.3)));
    CHECK(e0.lam_minus == doctest::Approx(-std::sqrt(0.3)));
    const auto e3 = linearize(f, 0.0, 3.0);
    CHECK(e3.lam_plus == doctest::Approx((-3.0 + std::sqrt(9.0 + 1.2)) / 2.0));
    CHECK(e3.lam_minus == doctest::Approx((-3.0 - std::sqrt(9.0 + 1.2)) / 2.0));
    CHECK(e3.v_plus.u == 1.0);
    CHECK(e3.v_plus.p == doctest::Approx(e3.lam_plus));
    const auto e1 = linearize(f, 1.0, 0.5);
    CHECK(e1.lam_plus > 0.0);
    CHECK(e1.lam_minus < 0.0);
    try {
        linearize(f, 0.3, 0.0);
        FAIL("expected ComplexEigenvalues");
    } catch (const WaveError& e) {
        CHECK(e.code() == ErrorCode::ComplexEigenvalues);
    }
}

TEST_CASE("classification of the middle equilibrium") {
    const auto f = cubic(0.3);
    CHECK(spiral_threshold(f) == doctest::Approx(2.0 * std::sqrt(0.21)));
    CHECK(classify_eta(f, 0.01).kind == EtaKind::SpiralSink);
    CHECK(classify_eta(f, 10.0).kind == EtaKind::StableNode);
    const auto edge = classify_eta(f, spiral_threshold(f));
    CHECK(edge.kind == EtaKind::StableNode);
    CHECK(edge.degenerate);
}

TEST_CASE("unstable manifold: large speed envelope") {
    const auto f = cubic(0.3);
    CHECK(gamma0_extrema(f, 20.0).gamma0_prime_max <= f.sup_norm / 20.0);
}

TEST_CASE("unstable manifold: c = 0 conserves energy") {
    const auto f = cubic(0.3);
    const auto g = unstable_manifold(f, 0.0);
    for (const auto& s : g.path.samples()) CHECK(std::abs(energy(f, {s.y[0], s.y[1]})) < 1e-9);
}

TEST_CASE("unstable manifold: spiral at small speed") {
    const auto f = cubic(0.3);
    const auto g = unstable_manifold(f, 0.05);
    CHECK(p_sign_changes(g) >= 3);
    const auto end = g.at(g.s_back());
    CHECK(std::hypot(end.u - 0.3, end.p) < 1e-5);
    const auto ext = gamma0_extrema(f, g);
    REQUIRE(ext.local_max_list.size() >= 3);
    for (std::size_t i = 1; i < ext.local_max_list.size(); ++i)
        CHECK(ext.local_max_list[i].value < ext.local_max_list[i - 1].value);
    CHECK(ext.gamma0_prime_max == doctest::Approx(ext.local_max_list.front().value));
}

TEST_CASE("property: energy dissipates and stays in the invariant region") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> speed(0.02, 3.0);
    const auto f = cubic(0.3);
    for (int t = 0; t < 8; ++t) {
        const double c = speed(rng);
        const auto g = unstable_manifold(f, c);
        double prev = INFINITY;
        for (const auto& s : g.path.samples()) {
            const double e = energy(f, {s.y[0], s.y[1]});
            CHECK(e <= 1e-12);
            CHECK(e <= prev + 1e-12);
            CHECK(s.y[0] > 0.0);
            prev = e;
        }
        const auto g1 = stable_manifold(f, c, 0.5 * f.eta_under);
        for (const auto& s : g1.path.samples()) {
            CHECK(energy(f, {s.y[0], s.y[1]}) >= -1e-12);
            CHECK(s.y[1] > 0.0);
        }
    }
}

TEST_CASE("stable manifold") {
    const auto f = cubic(0.3);
    const auto g1 = stable_manifold(f, 0.1, 0.5 * f.eta_under);
    bool crosses_eta = false;
    const auto s = g1.path.samples();
    for (std::size_t i = 1; i < s.size(); ++i) {
        CHECK(s[i].y[1] > 0.0);
        if ((s[i - 1].y[0] - 0.3) * (s[i].y[0] - 0.3) <= 0.0) crosses_eta = true;
    }
    CHECK(crosses_eta);
    const auto g0 = stable_manifold(f, 0.0, 0.5 * f.eta_under);
    for (const auto& smp : g0.path.samples()) CHECK(energy(f, {smp.y[0], smp.y[1]}) == doctest::Approx(f.F(1.0)).epsilon(1e-8));
    CHECK_THROWS_AS(stable_manifold(f, 0.1, 0.5), ConfigError);
}

TEST_CASE("slope maximum decreases in c") {
    const auto f = cubic(0.3);
    CHECK(gamma0_extrema(f, 0.1).gamma0_prime_max > gamma0_extrema(f, 0.5).gamma0_prime_max);
    std::vector<double> peaks;
    for (int i = 1; i <= 20; ++i) peaks.push_back(*gamma0_slope_peak(f, 0.25 * i, 0));
    for (std::size_t i = 1; i < peaks.size(); ++i) CHECK(peaks[i] < peaks[i - 1]);
}

TEST_CASE("small-c limit approaches the conservative orbit") {
    const auto f = cubic(0.3);
    const double u_top = gamma0_extrema(f, 0.0).gamma0_max - 0.05;
    double prev = INFINITY;
    for (double c : {0.08, 0.04, 0.02, 0.01}) {
        const auto g = unstable_manifold(f, c);
        double sup = 0.0;
        for (int i = 1; i <= 50; ++i) {
            const double u = u_top * i / 50.0;
            // Closed-form zero-energy branch p = sqrt(-2F(u)).
            sup = std::max(sup, std::abs(p_at_u(g, u) - std::sqrt(-2.0 * f.F(u))));
        }
        CHECK(sup < prev);
        prev = sup;
    }
}

TEST_CASE("seed robustness") {
    const auto f = cubic(0.3);
    ManifoldOptions a, b;
    b.seed_eps = 0.5 * a.seed_eps;
    const double pa = *gamma0_slope_peak(f, 0.3, 0, a);
    const double pb = *gamma0_slope_peak(f, 0.3, 0, b);
    CHECK(std::abs(pa - pb) < 10.0 * a.seed_eps);
}

TEST_CASE("oversized seed is rejected") {
    const auto f = cubic(0.3);
    ManifoldOptions o;
    o.seed_eps = 0.1;
    try {
        unstable_manifold(f, 0.0, o);
        FAIL("expected SeedTooLarge");
    } catch (const WaveError& e) {
        CHECK(e.code() == ErrorCode::SeedTooLarge);
    }
}
