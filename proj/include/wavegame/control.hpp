#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wavegame/cost.hpp"
#include "wavegame/kernels.hpp"
#include "wavegame/numerics.hpp"
#include "wavegame/wave_builder.hpp"

namespace wavegame {

/// Control as a function of elapsed time and position in the co-moving frame.
using Control = std::function<double(double t, double s)>;

/// Discounted payoff ∫ e^{-λt} (Θ(s(t)) - L(α)) dt along s' = α - c, s(0) = s0.
/// t_trunc defaults to the horizon where e^{-λT}/λ = 1e-8. Times where α jumps
/// go in breakpoints so that neither the path nor the quadrature straddles them.
numerics::DiscountedValue payoff(const std::function<double(double)>& theta, const CostModel& cost, double s0,
                                 const Control& alpha, std::optional<double> t_trunc = std::nullopt,
                                 std::vector<double> breakpoints = {});

enum class HjbMethod {
    PolicyIteration,  ///< Howard: exact policy evaluation (tridiagonal) + improvement sweeps
    ValueIteration,   ///< plain fixed-point sweeps
};

struct HjbOptions {
    double s_lo = -20.0;
    double s_hi = 20.0;
    double ds = 0.01;
    std::size_t controls = 401;
    double control_halfwidth = 3.0;
    double tol = 1e-10;  ///< stop when sup |V_new - V_old| < tol
    std::size_t max_iterations = 2'000'000;
    HjbMethod method = HjbMethod::PolicyIteration;
    kernels::Exec exec = kernels::Exec::Parallel;
};

struct ValueGrid {
    kernels::UniformGrid grid{};
    std::vector<double> V;
    std::vector<double> feedback;  ///< maximizing control of the discrete scheme at each node
    std::vector<double> control_set;
    double dt = 0.0;
    double lipschitz_est = 0.0;
    double theta_lipschitz = 0.0;  ///< sup |Θ'| estimated on the grid
    double final_update = 0.0;
    std::size_t iterations = 0;
    std::vector<double> update_history;  ///< sup-updates of the sweeps, in order

    double value(double s) const;
    /// Centred difference (one-sided at the ends).
    double dV(std::size_t i) const;
    double dV_at(double s) const;
    double control_step() const;
    /// (Δs + Δt)·sup|Θ'|/λ: discretization scale used for acceptance bounds.
    double solver_tol(double lambda) const;

    void write_csv(std::ostream& os) const;
};

/// Semi-Lagrangian solution of λV + cV' - H(V') = Θ on [s_lo, s_hi]:
///   V(s) = max_a { w(Θ(s) - L(a)) + e^{-λΔt} V(s + Δt(a - c)) },
/// w = (1 - e^{-λΔt})/λ, Δt = Δs/(2 max|a - c|), linear interpolation held
/// constant past the ends. Throws NoConvergence.
ValueGrid hjb_solve(const std::function<double(double)>& theta, const CostModel& cost, const HjbOptions& opts);

/// Sup of |Θ''| over the smooth pieces between the two manifold seeds, from
/// the wave equation. Throws UnboundedCurvature if not finite.
double curvature_bound(const BistableNonlinearity& f, const WaveProfile& w);

/// 2·sqrt(M_k / d_under); +inf when d_under <= 0.
double concavity_threshold(const BistableNonlinearity& f, const WaveProfile& w, double d_under);

/// |Θ'(s0) - λL'(c)|.
double critical_point_check(const WaveProfile& w, const CostModel& cost, double s0);

/// Last s <= 0 where the tangent line Θ(0) + λL'(c)s drops below Θ. Throws NoCrossing.
double s_minus(const WaveProfile& w);

struct ProbeResult {
    std::string name;
    double gap;  ///< min over starting points of J(c) - J(probe)
};

struct EquilibriumReport {
    double feedback_residual = 0.0;
    double value_identity_residual = 0.0;
    std::vector<ProbeResult> probes;
    double lambda0 = 0.0;  ///< +inf when L'' has no positive floor
    double s_minus = 0.0;
    bool certified = false;

    // Context for acceptance bounds; not part of the JSON document.
    double solver_tol = 0.0;
    double control_step = 0.0;
    double lipschitz_est = 0.0;
    double lipschitz_bound = 0.0;

    nlohmann::json to_json() const;
};

struct VerifyOptions {
    double ds = 0.01;
    double margin = 20.0;  ///< HJB window [s_minus - margin, s1 + margin]
    std::vector<double> amplitudes{0.1, 0.5, 1.0};  ///< δ as multiples of c
    std::vector<double> horizons{1.0, 5.0, 20.0};   ///< T_p as multiples of 1/λ
    std::size_t start_points = 5;
    double gap_tol = 1e-6;
    kernels::Exec exec = kernels::Exec::Parallel;
};

struct Verification {
    EquilibriumReport report;
    ValueGrid value;
};

/// Solves the HJB against the wave and probes the constant control α ≡ c.
Verification verify_equilibrium(const BistableNonlinearity& f, const WaveProfile& w, const FishermanDensity& d,
                                const CostModel& cost, const VerifyOptions& opts = {});

/// Infimum of L'' over [-a_max, a_max] (exact for the power family).
double curvature_floor(const Lagrangian& L, double a_max);

}  // namespace wavegame
