#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wavegame/kernels.hpp"
#include "wavegame/phase_plane.hpp"
#include "wavegame/wave_builder.hpp"

namespace wavegame {

struct Grid1D {
    double x_lo = 0.0;
    double x_hi = 1.0;
    std::size_t n = 2;
    double dx = 1.0;
    double dt = 1.0;
    bool implicit = true;  ///< IMEX (implicit diffusion) or fully explicit Euler

    /// Nodes x_lo, x_lo + dx, ... covering [x_lo, x_hi].
    static Grid1D uniform(double x_lo, double x_hi, double dx, double dt, bool implicit = true);
    double x(std::size_t i) const { return x_lo + dx * static_cast<double>(i); }
};

/// One step of θ_t = θ_xx + f(θ) - mθ with zero-flux ends. Explicit mode
/// throws CFLViolation when dt > dx²/2. The result is clipped to [0, 1];
/// returns the clipped amount Σ|clip|·dx.
double step(std::vector<double>& theta, std::span<const double> m, const BistableNonlinearity& f, const Grid1D& g,
            kernels::Exec exec = kernels::Exec::Serial);

struct FrontTrace {
    std::vector<double> times;
    std::vector<double> positions;
    double fitted_speed = 0.0;
    double fit_residual = 0.0;  ///< RMS distance of the fitted positions
};

/// Leftmost crossing of `level` in each snapshot (linear interpolation) and a
/// least-squares line through the positions with t >= fit_from.
/// Throws NoCrossing when a snapshot never crosses the level.
FrontTrace front_trace(const std::vector<std::vector<double>>& snapshots, const std::vector<double>& times,
                       const Grid1D& g, double level = 0.5, double fit_from = 0.0);

/// Slope and RMS residual of the least-squares line through (t, x).
std::pair<double, double> fit_line(std::span<const double> t, std::span<const double> x);

struct Snapshot {
    double t;
    std::vector<double> theta;
    std::vector<double> m;
};

struct SimOptions {
    double level = 0.5;
    double record_every = 0.5;   ///< time between front measurements
    std::size_t snapshot_every = 0;  ///< keep every n-th record as a snapshot (0: none)
    double boundary_margin = 5.0;
    kernels::Exec exec = kernels::Exec::Serial;
};

struct SimRun {
    FrontTrace trace;
    double shape_error = 0.0;  ///< reversed runs only
    double clip_mass = 0.0;
    std::vector<Snapshot> snapshots;
};

/// Baseline m ≡ 0 from the smoothed step (1 + tanh(x - x0))/2.
/// Throws FrontLeftDomain when the front gets within the margin of an end.
SimRun simulate_baseline(const BistableNonlinearity& f, const Grid1D& g, double T, double x0,
                         const SimOptions& opts = {});

/// θ(0, x) = Θ(x) with m(t, x) = M(x - ct); shape_error compares against
/// Θ(x - ct). With harvest = false the density is switched off (contrast run).
SimRun simulate_reversed(const BistableNonlinearity& f, const WaveProfile& w, const FishermanDensity& d,
                         const Grid1D& g, double T, bool harvest = true, const SimOptions& opts = {});

/// Closed-form speed of the cubic bistable front, √2(η - 1/2).
double cubic_front_speed(double eta);

}  // namespace wavegame
