#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "wavegame/error.hpp"
#include "wavegame/pde_sim.hpp"

using namespace wavegame;

namespace {

const BistableNonlinearity& F03() {
    static const auto f = cubic(0.3);
    return f;
}

const BuiltWave& base_wave() {
    static const BuiltWave bw = construct_wave(F03(), Lagrangian::quadratic(), 0.79, 0.05);
    return bw;
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

// Largest eigenvalue of φ'' + cφ' + (f'(Θ) - M)φ on [a, b], Dirichlet ends.
// The substitution φ = e^{-cx/2}ψ makes the operator symmetric.
double principal_eigenvalue(const BistableNonlinearity& f, const BuiltWave& bw, double a, double b, double h) {
    const double c = bw.wave.c;
    const auto n = static_cast<Eigen::Index>(std::llround((b - a) / h)) - 1;
    Eigen::VectorXd diag(n), off(n - 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = a + h * static_cast<double>(i + 1);
        diag[i] = -2.0 / (h * h) + f.df(bw.wave.theta(x)) - bw.density(x) - 0.25 * c * c;
        if (i + 1 < n) off[i] = 1.0 / (h * h);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

}  // namespace

TEST_CASE("grid construction") {
    const auto g = Grid1D::uniform(-1.0, 1.0, 0.1, 0.01);
    CHECK(g.n == 21);
    CHECK(g.x(20) == doctest::Approx(1.0));
    CHECK_THROWS_AS(Grid1D::uniform(1.0, -1.0, 0.1, 0.01), ConfigError);
    CHECK_THROWS_AS(Grid1D::uniform(-1.0, 1.0, 0.0, 0.01), ConfigError);
}

TEST_CASE("constant states are fixed points without harvesting") {
    const auto& f = F03();
    for (bool implicit : {true, false}) {
        const auto g = Grid1D::uniform(0.0, 10.0, 0.1, 0.004, implicit);
        const std::vector<double> zero(g.n, 0.0);
        for (double level : {0.0, 0.3, 1.0}) {
            std::vector<double> th(g.n, level);
            for (int k = 0; k < 50; ++k) step(th, zero, f, g);
            for (double v : th) CHECK(v == doctest::Approx(level).epsilon(1e-13));
        }
    }
}

TEST_CASE("harvesting a saturated state") {
    const auto& f = F03();
    const auto g = Grid1D::uniform(0.0, 10.0, 0.1, 0.01);
    const double eps = 0.02;
    const std::vector<double> m(g.n, eps);
    std::vector<double> th(g.n, 1.0);
    step(th, m, f, g);
    // dθ/dt = f(1) - ε·1 = -ε
    for (double v : th) CHECK(v == doctest::Approx(1.0 - eps * g.dt).epsilon(1e-12));
}

TEST_CASE("explicit scheme enforces its stability limit") {
    const auto& f = F03();
    const auto g = Grid1D::uniform(0.0, 10.0, 0.1, 0.0051, false);
    std::vector<double> th(g.n, 0.5);
    const std::vector<double> m(g.n, 0.0);
    CHECK(code_of([&] { step(th, m, f, g); }) == ErrorCode::CFLViolation);
}

TEST_CASE("comparison principle") {
    const auto& f = F03();
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto g = Grid1D::uniform(-20.0, 20.0, 0.1, 0.025);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> lo(g.n), hi(g.n), m_hi(g.n), m_lo(g.n);
        for (std::size_t i = 0; i < g.n; ++i) {
            lo[i] = u(rng);
            hi[i] = std::min(1.0, lo[i] + 0.2 * u(rng));
            m_lo[i] = 0.1 * u(rng);
            m_hi[i] = m_lo[i] + 0.05 * u(rng);
        }
        // Less harvesting and more mass keep θ on top.
        for (int k = 0; k < 100; ++k) {
            step(lo, m_hi, f, g);
            step(hi, m_lo, f, g);
        }
        for (std::size_t i = 0; i < g.n; ++i) CHECK(lo[i] <= hi[i] + 1e-14);
    }
}

TEST_CASE("front trace on synthetic profiles") {
    const auto g = Grid1D::uniform(-30.0, 30.0, 0.05, 0.01);
    std::vector<std::vector<double>> snaps;
    std::vector<double> times;
    const double speed = 0.37;
    for (int k = 0; k <= 40; ++k) {
        const double t = 0.5 * k;
        std::vector<double> th(g.n);
        for (std::size_t i = 0; i < g.n; ++i) th[i] = 1.0 / (1.0 + std::exp(-(g.x(i) - 2.0 - speed * t)));
        snaps.push_back(th);
        times.push_back(t);
    }
    const auto tr = front_trace(snaps, times, g);
    CHECK(tr.fitted_speed == doctest::Approx(speed).epsilon(1e-3));
    CHECK(tr.positions.front() == doctest::Approx(2.0).epsilon(1e-3));

    // Stationary: zero speed.
    std::vector<std::vector<double>> still(snaps.size(), snaps.front());
    CHECK(std::abs(front_trace(still, times, g).fitted_speed) < 1e-12);

    // Noisy positions: least squares still recovers the slope.
    std::mt19937 rng(5);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::vector<double> t(200), x(200);
    for (int i = 0; i < 200; ++i) {
        t[i] = 0.25 * i;
        x[i] = -1.0 + 0.2 * t[i] + noise(rng);
    }
    const auto [slope, res] = fit_line(t, x);
    CHECK(slope == doctest::Approx(0.2).epsilon(1e-2));
    CHECK(res == doctest::Approx(0.05).epsilon(0.2));

    std::vector<std::vector<double>> flat{std::vector<double>(g.n, 0.1)};
    CHECK(code_of([&] { front_trace(flat, {0.0}, g); }) == ErrorCode::NoCrossing);
}

TEST_CASE("bistable front: direction and grid convergence") {
    const auto& f03 = F03();
    const double exact = cubic_front_speed(0.3);
    CHECK(exact < 0.0);
    double prev = INFINITY;
    for (double dx : {0.2, 0.1, 0.05}) {
        const auto g = Grid1D::uniform(-40.0, 40.0, dx, dx / 2.0);
        const auto run = simulate_baseline(f03, g, 40.0, 15.0);
        const double err = std::abs(run.trace.fitted_speed - exact);
        CHECK(err < prev);
        prev = err;
        CHECK(run.clip_mass <= 1e-8);
    }
    CHECK(prev / std::abs(exact) < 5e-3);

    const auto g = Grid1D::uniform(-40.0, 40.0, 0.1, 0.05);
    const auto up = simulate_baseline(cubic(0.7), g, 30.0, -10.0);
    CHECK(up.trace.fitted_speed > 0.0);
}

TEST_CASE("front leaving the window is reported") {
    const auto g = Grid1D::uniform(-10.0, 10.0, 0.1, 0.05);
    CHECK(code_of([&] { simulate_baseline(F03(), g, 60.0, 0.0); }) == ErrorCode::FrontLeftDomain);
}

TEST_CASE("reversed wave departs at the rate of the unstable mode") {
    const auto& f = F03();
    const auto& bw = base_wave();
    const double c = bw.wave.c;
    const double mu = principal_eigenvalue(f, bw, -40.0, 50.0, 0.1);
    CHECK(mu > 0.0);
    auto error_at = [&](double T) {
        const auto g = Grid1D::uniform(-60.0, 60.0 + c * T, 0.05, 0.025);
        return simulate_reversed(f, bw.wave, bw.density, g, T).shape_error;
    };
    const double e1 = error_at(50.0);
    const double e2 = error_at(70.0);
    const double rate = std::log(e2 / e1) / 20.0;
    CHECK(rate == doctest::Approx(mu).epsilon(0.05));
}

TEST_CASE("reversed wave with harvesting switched off recedes") {
    const auto& bw = base_wave();
    const double T = 40.0;
    const auto g = Grid1D::uniform(-60.0 - 0.3 * T, 60.0, 0.05, 0.025);
    const auto run = simulate_reversed(F03(), bw.wave, bw.density, g, T, false);
    CHECK(run.trace.fitted_speed == doctest::Approx(cubic_front_speed(0.3)).epsilon(0.02));
}
