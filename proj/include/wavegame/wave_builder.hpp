#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wavegame/cost.hpp"
#include "wavegame/kernels.hpp"
#include "wavegame/phase_plane.hpp"

namespace wavegame {

/// Affine piece Θ(s) = theta0 + slope·s on [0, s1].
struct LinearBridge {
    double theta0;
    double slope;
    double s1;
};

/// Harvester density M on a uniform grid over [0, s1]; zero outside.
struct FishermanDensity {
    double s1 = 0.0;
    std::vector<double> s;
    std::vector<double> m;
    double mass = 0.0;

    /// Linear interpolation on [0, s1], 0 elsewhere.
    double operator()(double x) const;
    double sup() const;
};

/// Reversed travelling wave in the co-moving frame:
///   s < 0       Γ_{0,c} translated so the departure point sits at 0,
///   0 <= s <= s1 the affine bridge,
///   s > s1      Γ_{1,c} translated so the landing point sits at s1.
struct WaveProfile {
    Trajectory left;
    double left_anchor = 0.0;   ///< Γ_0 abscissa mapped to s = 0
    LinearBridge mid{};
    Trajectory right;
    double right_anchor = 0.0;  ///< Γ_1 abscissa mapped to s = s1
    double c = 0.0;
    double lambda = 0.0;
    int k = 0;

    double theta(double s) const;
    double theta_prime(double s) const;
    /// From the wave equation on each smooth piece: -cΘ' - f(Θ) outside the
    /// bridge, 0 on it. At s = 0 and s = s1 the outer one-sided value is used.
    double theta_second(const BistableNonlinearity& f, double s) const;
    double s1() const { return mid.s1; }
};

/// One period [0, P): bridge on [0, bridge_length), free arc afterwards.
struct PeriodicWave {
    Trajectory arc;
    double arc_start = 0.0;  ///< Γ_0 abscissa where the arc begins (top of the bridge)
    double arc_end = 0.0;    ///< Γ_0 abscissa where the arc returns to the bridge foot
    LinearBridge bridge{};
    double period = 0.0;
    double c = 0.0;
    double lambda = 0.0;

    double theta(double s) const;
    double theta_prime(double s) const;
    /// Largest jump of Θ or Θ' where the arc meets the bridge (both ends).
    /// theta() wraps, so this is the part of periodicity that can fail.
    double junction_jump() const;
};

/// Θ, Θ' and M tabulated on a grid; validity checks work on this form.
struct SampledWave {
    std::vector<double> s;
    std::vector<double> theta;
    std::vector<double> theta_prime;
    std::vector<double> m;
    double c = 0.0;
    double lambda = 0.0;
    int k = 0;

    void write_csv(std::ostream& os) const;
};

SampledWave sample(const WaveProfile& w, const FishermanDensity& d, double s_lo, double s_hi, std::size_t n);
SampledWave sample(const PeriodicWave& w, const FishermanDensity& d, double s_lo, double s_hi, std::size_t n);

struct WaveOptions {
    ManifoldOptions manifold{};
    std::size_t density_points = 2048;
    double density_tol = 1e-10;
};

/// First abscissa at or after the k-th local maximum of Γ'_{0,c} (k = 0: the
/// global one) where Γ' = λL'(c). Throws SpeedTooLarge when that maximum is
/// below λL'(c) or does not exist.
double departure_point(const BistableNonlinearity& f, const Trajectory& gamma0, double slope, int k);

/// M = (f(Θ) + c·slope)/Θ along the bridge. Throws NegativeDensity when
/// min M < -tol; smaller negative values are clamped to 0.
FishermanDensity linear_bridge(const BistableNonlinearity& f, double c, const LinearBridge& bridge,
                               std::size_t points = 2048, double tol = 1e-10);

struct Landing {
    double gamma1;  ///< u at the landing point
    double r1;      ///< Γ_1 abscissa of the landing point
};

/// First point on Γ_{1,c}, coming from (1, 0), where Γ' = slope.
/// Throws NoLanding when Γ' stays below slope.
Landing landing_point(const Trajectory& gamma1, double slope);

struct BuiltWave {
    WaveProfile wave;
    FishermanDensity density;
};

/// Throws SpeedTooLarge or NoLanding.
BuiltWave construct_wave(const BistableNonlinearity& f, const Lagrangian& L, double lambda, double c, int k = 0,
                         const WaveOptions& opts = {});

struct BuiltPeriodic {
    PeriodicWave wave;
    FishermanDensity density;
};

/// Throws NoPeriodicOrbit when fewer than two departure points exist.
BuiltPeriodic construct_periodic(const BistableNonlinearity& f, const Lagrangian& L, double lambda, double c,
                                 const WaveOptions& opts = {});

struct SpeedValue {
    double value;
    bool unbounded = false;  ///< g > 0 on the whole scan box; value is +inf
};

struct SpeedScan {
    double c_lo = 1e-3;
    double c_hi = 20.0;
    std::size_t points = 48;
    double tol = 1e-10;
    kernels::Exec exec = kernels::Exec::Parallel;
};

/// Largest c with Γ'_{0,c}(s_k) >= λL'(c). For k >= 1 only speeds below the
/// spiral threshold are scanned.
SpeedValue ck_of_lambda(const BistableNonlinearity& f, const Lagrangian& L, double lambda, int k,
                        const SpeedScan& scan = {});
inline SpeedValue c0_of_lambda(const BistableNonlinearity& f, const Lagrangian& L, double lambda,
                               const SpeedScan& scan = {}) {
    return ck_of_lambda(f, L, lambda, 0, scan);
}

/// Last sign change of c ↦ sup Γ_{0,c} - L(c). Throws NoExtinctionSpeed.
double c_max_of_L(const BistableNonlinearity& f, const Lagrangian& L, const SpeedScan& scan = {});

struct SpeedMaps {
    std::vector<double> lambdas;
    std::vector<std::vector<double>> ck;  ///< ck[k][i] = c_k(lambdas[i])
    double c_max;

    void write_csv(std::ostream& os) const;
};

SpeedMaps speed_maps(const BistableNonlinearity& f, const Lagrangian& L, const std::vector<double>& lambdas,
                     int k_max, const SpeedScan& scan = {});

struct ValidityCheck {
    std::string name;
    bool passed;
    double value;  ///< the measured quantity behind the verdict
};

struct ValidityReport {
    std::vector<ValidityCheck> checks;
    bool all_passed() const;
    const ValidityCheck& at(const std::string& name) const;
};

/// Max-speed condition L(c) <= Θ(0), affine bridge with slope λL'(c),
/// compact nonnegative M, and monotonicity (k = 0) or exactly k maxima.
ValidityReport validity_report(const SampledWave& w, const FishermanDensity& d, const Lagrangian& L,
                               double tol = 1e-8);
ValidityReport validity_report(const WaveProfile& w, const FishermanDensity& d, const Lagrangian& L,
                               double tol = 1e-8);

struct OdeResidual {
    double max_residual;
    double scale;  ///< 1 + sup|f(Θ)| + c sup|Θ'| + sup|MΘ| over the window
};

/// |-Θ'' - cΘ' - f(Θ) + MΘ| with centred second differences of step h, on
/// nodes whose stencil stays inside one smooth piece.
OdeResidual ode_residual(const BistableNonlinearity& f, const WaveProfile& w, const FishermanDensity& d, double s_lo,
                         double s_hi, double h);

/// Number of strict local maxima of a sampled profile.
int count_local_maxima(const std::vector<double>& theta_prime);

}  // namespace wavegame
