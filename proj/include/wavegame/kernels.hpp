#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace wavegame::kernels {

/// Serial kernels are the reference; Parallel runs the same arithmetic under
/// OpenMP and must agree bit for bit.
enum class Exec { Serial, Parallel };

/// Uniform nodes s_i = s_lo + i·ds, i < n.
struct UniformGrid {
    double s_lo;
    double ds;
    std::size_t n;

    double node(std::size_t i) const { return s_lo + ds * static_cast<double>(i); }
    double s_hi() const { return node(n - 1); }
};

/// Linear interpolation of nodal values, held constant beyond both ends.
double interpolate(const UniformGrid& g, std::span<const double> v, double s);

/// One semi-Lagrangian dynamic-programming update
///   V_new(s_i) = max_a { weight·(reward_i - cost_a) + discount·V_old(s_i + dt·(a - c)) }.
struct BellmanData {
    UniformGrid grid;
    std::span<const double> reward;
    std::span<const double> controls;
    std::span<const double> control_cost;
    double c;
    double dt;
    double weight;
    double discount;
};

/// Writes V_new and the index of the maximizing control (first one on ties);
/// returns sup_i |V_new - V_old|.
double bellman_sweep(const BellmanData& d, std::span<const double> v_old, std::span<double> v_new,
                     std::span<std::size_t> policy, Exec exec);

/// Explicit reaction/harvest update θ_i += dt·(f(θ_i) - m_i θ_i).
void reaction_step(std::span<double> theta, std::span<const double> m, const std::function<double(double)>& f,
                   double dt, Exec exec);

/// g evaluated at every abscissa (independent evaluations).
std::vector<double> map_scan(const std::function<double(double)>& g, std::span<const double> xs, Exec exec);

}  // namespace wavegame::kernels
