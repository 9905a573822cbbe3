#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace wavegame::numerics {

/// Point of a planar autonomous or non-autonomous system.
using State = std::array<double, 2>;

/// Right-hand side y' = rhs(t, y).
using VectorField = std::function<State(double t, const State& y)>;

struct IntegratorOptions {
    double step = 1e-2;        ///< fixed RK4 step (absolute value; sign follows the span)
    double tol = 1e-10;        ///< event localization tolerance in the abscissa
    std::size_t max_steps = 4'000'000;

    void validate() const;
};

/// Sign-change direction of an event guard, measured along the order in
/// which the integrator visits the abscissa (so "rising" during a backward
/// integration means the guard increases as t decreases).
enum class Direction { Rising, Falling, Any };

struct Event {
    std::function<double(double t, const State& y)> guard;
    Direction direction = Direction::Any;
    /// 0: record hits only. n > 0: stop integration at the n-th hit.
    int terminal_after = 0;
    /// A terminal event that must fire before the end of the span.
    bool required = true;
};

struct Sample {
    double t;
    State y;
    State dy;
};

/// Piecewise cubic Hermite interpolant through RK4 nodes. Samples are kept
/// with strictly increasing t regardless of the integration direction.
class DenseOutput {
public:
    DenseOutput() = default;
    explicit DenseOutput(std::vector<Sample> samples);

    State operator()(double t) const;
    State derivative(double t) const;

    bool empty() const noexcept { return samples_.empty(); }
    std::size_t size() const noexcept { return samples_.size(); }
    double t_front() const { return samples_.front().t; }
    double t_back() const { return samples_.back().t; }
    std::span<const Sample> samples() const noexcept { return samples_; }

    /// Drops samples with t > t_cut and closes the interpolant with an exact
    /// node at t_cut (value and slope taken from the interpolant).
    void truncate_after(double t_cut);

private:
    std::size_t segment(double t) const;

    std::vector<Sample> samples_;
};

struct EventHit {
    std::size_t event;
    double t;
    State y;
};

struct IntegrationResult {
    DenseOutput path;
    std::vector<EventHit> hits;
    std::optional<std::size_t> terminated_by;
};

/// Classical fixed-step RK4 from t0 to t1 (t1 < t0 integrates backward),
/// with event detection by bisection on the Hermite dense output.
///
/// Throws MaxStepsExceeded when the span needs more than opts.max_steps
/// steps, and EventNotBracketed when terminal events were requested but none
/// fired before t1.
IntegrationResult integrate(const VectorField& rhs, const State& y0, double t0, double t1,
                            std::span<const Event> events, const IntegratorOptions& opts);

/// Bracketed root of a continuous scalar function; the returned point lies
/// within tol of a sign change of g. Throws NoBracket if g(a)·g(b) > 0.
double find_root(const std::function<double(double)>& g, double a, double b, double tol = 1e-10);

struct DiscountedValue {
    double value;
    double tail_bound;       ///< sup|g|·e^{-λT}/λ, bounds the neglected ∫_T^∞
    double quadrature_error; ///< estimate reported by the adaptive rule
};

/// Solves a tridiagonal system in place (Thomas algorithm): on return rhs holds
/// x with sub[i]·x[i-1] + diag[i]·x[i] + sup[i]·x[i+1] = rhs[i]. sub[0] and
/// sup[n-1] are ignored. Requires a diagonally dominant matrix; diag is
/// overwritten.
void solve_tridiagonal(std::span<const double> sub, std::span<double> diag, std::span<const double> sup,
                       std::span<double> rhs);

/// Smallest horizon T with e^{-λT}/λ <= rel.
double default_truncation(double lambda, double rel = 1e-8);

/// ∫_0^∞ e^{-λt} g(t) dt truncated at t_trunc by adaptive Gauss–Kronrod.
/// g_sup is an a priori bound on |g| over [t_trunc, ∞); when absent the
/// largest |g| seen by the quadrature is used.
DiscountedValue discounted_integral(const std::function<double(double)>& g, double lambda,
                                    double t_trunc, double tol = 1e-10,
                                    std::optional<double> g_sup = std::nullopt);

}  // namespace wavegame::numerics
