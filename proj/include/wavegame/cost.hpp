#pragma once

#include <functional>
#include <optional>

namespace wavegame {

/// L(α) = kappa·|α|^exponent with exponent > 1.
struct PowerLaw {
    double kappa;
    double exponent;
};

/// Convex movement cost with L(0) = 0, minimized at 0.
struct Lagrangian {
    std::function<double(double)> L;
    std::function<double(double)> dL;
    std::function<double(double)> d2L;
    std::optional<PowerLaw> power;

    static Lagrangian power_law(double kappa, double exponent);
    /// α²/2
    static Lagrangian quadratic() { return power_law(0.5, 2.0); }
};

/// Lagrangian together with the discount λ and the candidate speed c.
struct CostModel {
    Lagrangian lagrangian;
    double lambda = 1.0;
    double c = 0.0;

    double L(double a) const { return lagrangian.L(a); }
    double dL(double a) const { return lagrangian.dL(a); }
    /// λ·L'(c), the slope Θ' must take on the harvesting zone.
    double bridge_slope() const { return lambda * lagrangian.dL(c); }
};

/// Legendre transform H(p) = sup_α (pα - L(α)) and its derivative, the
/// maximizer α = H'(p).
struct Hamiltonian {
    std::function<double(double)> H;
    std::function<double(double)> dH;
};

/// Closed form for the power family, bracketed root of L'(α) = p otherwise.
/// Throws NonConvexLagrangian when L' is not increasing on a test grid.
Hamiltonian legendre(const Lagrangian& lag);

/// Cost family α ↦ (eta_under/2)|α|^{2q}.
Lagrangian harvest_power_family(double eta_under, double q);

}  // namespace wavegame
