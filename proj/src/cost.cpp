#include "wavegame/cost.hpp"

#include <cmath>
#include <string>

#include "wavegame/error.hpp"
#include "wavegame/numerics.hpp"

namespace wavegame {

Lagrangian Lagrangian::power_law(double kappa, double m) {
    if (!(kappa > 0.0)) throw ConfigError("power Lagrangian: kappa must be positive");
    if (!(m > 1.0)) throw ConfigError("power Lagrangian: exponent must exceed 1");
    Lagrangian lag;
    lag.power = PowerLaw{kappa, m};
    lag.L = [kappa, m](double a) { return kappa * std::pow(std::abs(a), m); };
    lag.dL = [kappa, m](double a) {
        const double s = a < 0.0 ? -1.0 : 1.0;
        return s * kappa * m * std::pow(std::abs(a), m - 1.0);
    };
    lag.d2L = [kappa, m](double a) { return kappa * m * (m - 1.0) * std::pow(std::abs(a), m - 2.0); };
    return lag;
}

Lagrangian harvest_power_family(double eta_under, double q) {
    if (!(q >= 1.0)) throw ConfigError("cost family exponent q must be >= 1");
    return Lagrangian::power_law(0.5 * eta_under, 2.0 * q);
}

Hamiltonian legendre(const Lagrangian& lag) {
    if (lag.power) {
        const double k = lag.power->kappa;
        const double m = lag.power->exponent;
        const double r = m / (m - 1.0);
        Hamiltonian h;
        h.H = [k, m, r](double p) { return (m - 1.0) * std::pow(k, -1.0 / (m - 1.0)) * std::pow(std::abs(p) / m, r); };
        h.dH = [k, m](double p) {
            const double s = p < 0.0 ? -1.0 : 1.0;
            return s * std::pow(std::abs(p) / (k * m), 1.0 / (m - 1.0));
        };
        return h;
    }

    double prev = lag.dL(-10.0);
    for (int i = 1; i <= 200; ++i) {
        const double a = -10.0 + 0.1 * i;
        const double d = lag.dL(a);
        if (!(d > prev))
            throw WaveError(ErrorCode::NonConvexLagrangian, "L' not increasing near " + std::to_string(a));
        prev = d;
    }
    auto dL = lag.dL;
    auto argmax = [dL](double p) {
        double lo = -1.0, hi = 1.0;
        while (dL(lo) > p) lo *= 2.0;
        while (dL(hi) < p) hi *= 2.0;
        return numerics::find_root([&](double a) { return dL(a) - p; }, lo, hi, 1e-13);
    };
    auto L = lag.L;
    Hamiltonian h;
    h.dH = argmax;
    h.H = [argmax, L](double p) {
        const double a = argmax(p);
        return p * a - L(a);
    };
    return h;
}

}  // namespace wavegame
