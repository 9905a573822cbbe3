#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include <json.hpp>

#include "wavegame/cost.hpp"
#include "wavegame/kernels.hpp"
#include "wavegame/phase_plane.hpp"
#include "wavegame/wave_builder.hpp"

namespace wavegame {

struct CoopConfig {
    double s1;
    double lambda0;
    double lambda;
    double q;  ///< lambda0 / lambda
    double eta_under;

    /// Throws ConfigError unless 0 < lambda <= lambda0 and s1 > 0.
    static CoopConfig make(double s1, double lambda0, double lambda, double eta_under);
};

/// Spreading control x/(2s1 + t).
double alpha_co(double t, double x, double s1);

/// Position at time t of the agent that starts at x0 under alpha_co.
double co_trajectory(double t, double x0, double s1);

/// Density transported by alpha_co from M:
/// (2s1/(2s1 + t))·M(2s1·x/(2s1 + t)).
double m_co(double t, double x, const FishermanDensity& d, double s1);

/// ∫ m_co(t, ·) by adaptive quadrature over its support [0, s1(2s1 + t)/(2s1)].
double m_co_mass(double t, const FishermanDensity& d, double s1);

/// Cost model (λ, c, L_q) with L_q(α) = (η̲/2)|α|^{2q}, q = λ0/λ.
CostModel lagrangian_family(double lambda, double lambda0, double eta_under, double c = 1.0);

/// First λ in `candidates` (tried in the given order) whose wave at speed c
/// under L_1 exists and is certified. Throws NoConvergence if none is.
double certified_lambda0(const BistableNonlinearity& f, double c, const std::vector<double>& candidates,
                         kernels::Exec exec = kernels::Exec::Parallel);

struct CoopOptions {
    double dx = 0.1;
    double dt = 0.05;
    double delta = 0.05;          ///< recovery margin: detect θ >= 1 - 2δ on supp m
    std::size_t samples = 20;     ///< x0 spread over the interior of [0, s1]
    double horizon_rel = 1e-6;    ///< payoff horizon T with e^{-λT}/λ = rel
    double cap_factor = 200.0;    ///< invasion cap = min(cap_factor/λ, T)
    double record_every = 1.0;    ///< spacing of the invasion diagnostic
    double csv_every = 0.0;       ///< space-time CSV stride in time (0: none)
    std::size_t csv_node_stride = 10;
    kernels::Exec exec = kernels::Exec::Parallel;
};

struct CoopSample {
    double x0;
    double V;
    double J_co;
    double gap;
};

struct SpaceTimeRow {
    double t;
    double x;
    double theta;
    double m;
};

struct CoopReport {
    CoopConfig config;
    std::vector<CoopSample> samples;
    std::optional<double> T_detect;
    double level = 0.0;           ///< 1 - 2δ
    double horizon = 0.0;
    double positive_fraction = 0.0;
    bool certified = false;       ///< every gap > 0 and the invasion was detected
    std::vector<SpaceTimeRow> space_time;

    nlohmann::json to_json() const;
    void write_space_time_csv(std::ostream& os) const;
};

/// Runs θ_co from θ(0) = Θ under m_co and compares the discounted payoff of
/// each sampled agent with the equilibrium value (Θ(x0) - L_q(c))/λ.
/// Throws InvasionFailed when θ_co never reaches 1 - 2δ on supp m_co before
/// the cap.
CoopReport compare_payoffs(const BistableNonlinearity& f, const BuiltWave& base, double lambda0, double lambda,
                           const CoopOptions& opts = {});

}  // namespace wavegame
