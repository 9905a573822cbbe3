#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "wavegame/numerics.hpp"

namespace wavegame {

/// Reaction term f with roots 0 < eta < 1, its derivative and antiderivative
/// F(x) = ∫_0^x f. eta_under is the unique critical point of f in (0, eta).
struct BistableNonlinearity {
    double eta = 0.0;
    double eta_under = 0.0;
    double sup_norm = 0.0;  ///< max_{[0,1]} |f|
    std::function<double(double)> f;
    std::function<double(double)> df;
    std::function<double(double)> F;

    /// ∫_0^1 f > 0, i.e. the state 1 invades 0 without harvesting.
    bool is_invading() const { return F(1.0) > 0.0; }
};

/// f(u) = u(u - eta)(1 - u). Throws InvalidEta outside (0, 1).
BistableNonlinearity cubic(double eta);

struct PhasePoint {
    double u;
    double p;
};

/// E(u, p) = p²/2 + F(u); non-increasing along the free flow when c >= 0.
double energy(const BistableNonlinearity& f, PhasePoint pt);

/// Free wave flow (u, p)' = (p, -f(u) - c p).
numerics::VectorField wave_field(const BistableNonlinearity& f, double c);

/// Closed-form continuation of a manifold beyond its seed:
/// (u, p)(s) = base + offset · e^{rate (s - s_anchor)}.
struct ExponentialTail {
    double s_anchor;
    PhasePoint base;
    PhasePoint offset;
    double rate;
};

/// Sampled phase-plane curve (s, u, p) with dense evaluation. Outside the
/// sampled range the optional exponential tails take over; without a tail
/// the nearest endpoint is held.
struct Trajectory {
    numerics::DenseOutput path;
    double c = 0.0;
    std::optional<ExponentialTail> left_tail;
    std::optional<ExponentialTail> right_tail;

    double s_front() const { return path.t_front(); }
    double s_back() const { return path.t_back(); }
    PhasePoint at(double s) const;

    /// Writes `s,u,p` rows at the stored nodes.
    void write_csv(std::ostream& os) const;
};

struct EigenData {
    double lam_plus;
    double lam_minus;
    PhasePoint v_plus;
    PhasePoint v_minus;
};

/// Eigen-decomposition of the linearized flow at (u_star, 0).
/// Throws ComplexEigenvalues when c² < 4 f'(u_star).
EigenData linearize(const BistableNonlinearity& f, double u_star, double c);

enum class EtaKind { SpiralSink, StableNode };

struct EtaClassification {
    EtaKind kind;
    bool degenerate;  ///< c == 2 sqrt(f'(eta)) exactly
};

EtaClassification classify_eta(const BistableNonlinearity& f, double c);

/// 2 sqrt(f'(eta)): speeds below it make (eta, 0) a spiral sink.
double spiral_threshold(const BistableNonlinearity& f);

struct ManifoldOptions {
    double seed_eps = 1e-7;
    double r_stop = 1e-6;        ///< stop ball radius around (eta, 0)
    double s_span = 1e4;         ///< maximal abscissa length integrated
    int max_slope_maxima = 0;    ///< stop after this many local maxima of p (0: off)
    int max_slope_minima = 0;    ///< stop after this many local minima of p (0: off)
    bool stop_at_first_turn = false;  ///< stop when p first returns to 0
    std::vector<numerics::Event> extra_stops;
    numerics::IntegratorOptions integrator{};
};

/// Γ_{0,c}: branch of the unstable manifold of (0, 0) with u > 0, seeded at
/// eps·v_+ and anchored so that u ≈ e^{λ_+ s} near the seed.
Trajectory unstable_manifold(const BistableNonlinearity& f, double c, const ManifoldOptions& opts = {});

/// Γ_{1,c}: branch of the stable manifold of (1, 0) with u < 1 and p > 0,
/// integrated backward until u <= u_min.
Trajectory stable_manifold(const BistableNonlinearity& f, double c, double u_min,
                           const ManifoldOptions& opts = {});

struct SlopeMaximum {
    double s;
    double value;  ///< Γ'(s) at the local maximum
};

struct Gamma0Extrema {
    double gamma0_max;        ///< sup of u along Γ_{0,c}
    double gamma0_prime_max;  ///< max of p along Γ_{0,c}
    double s_star;            ///< abscissa of gamma0_prime_max
    std::vector<SlopeMaximum> local_max_list;
};

/// Local maxima of p along a free trajectory, located where p' = -f(u) - c p
/// changes sign from + to -, refined by bisection on the dense output.
std::vector<SlopeMaximum> slope_maxima(const BistableNonlinearity& f, const Trajectory& traj,
                                       double tol = 1e-10);

/// Local minima of p (same construction with the opposite sign change).
std::vector<SlopeMaximum> slope_minima(const BistableNonlinearity& f, const Trajectory& traj,
                                       double tol = 1e-10);

Gamma0Extrema gamma0_extrema(const BistableNonlinearity& f, const Trajectory& gamma0);
Gamma0Extrema gamma0_extrema(const BistableNonlinearity& f, double c, const ManifoldOptions& opts = {});

/// Value of Γ'_{0,c} at its (k+1)-th local maximum (k = 0: the global one),
/// integrating only as far as needed. Empty when fewer maxima exist.
std::optional<double> gamma0_slope_peak(const BistableNonlinearity& f, double c, int k,
                                        const ManifoldOptions& opts = {});

}  // namespace wavegame
