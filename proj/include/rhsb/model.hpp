#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string_view>

#include "rhsb/errors.hpp"

namespace rhsb {

using cplx = std::complex<double>;

/// Rectangular barrier V(x) = V0 on [a, b], zero elsewhere, with the
/// physical constants that enter the kinetic term. Defaults are the unit
/// system hbar = 1, m = 1/2, in which k = sqrt(E).
struct BarrierModel {
    double a = 0.0;
    double b = 1.0;
    double v0 = 2.0;
    double hbar = 1.0;
    double mass = 0.5;

    void validate() const {
        if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
            throw DomainError("barrier edges must satisfy a < b");
        if (!std::isfinite(v0) || v0 < 0.0)
            throw DomainError("barrier height must be non-negative (wells carry bound states)");
        if (!(hbar > 0.0) || !std::isfinite(hbar))
            throw DomainError("hbar must be positive");
        if (!(mass > 0.0) || !std::isfinite(mass))
            throw DomainError("mass must be positive");
    }

    static BarrierModel make(double a, double b, double v0, double hbar = 1.0, double mass = 0.5) {
        BarrierModel m{a, b, v0, hbar, mass};
        m.validate();
        return m;
    }

    double width() const noexcept { return b - a; }

    /// 2m/hbar^2, the factor converting energies to squared wave numbers.
    double energy_to_k2() const noexcept { return 2.0 * mass / (hbar * hbar); }

    double energy_from_k(double k) const noexcept { return k * k / energy_to_k2(); }
    double k_from_energy(double e) const noexcept { return std::sqrt(energy_to_k2() * e); }

    /// dE/dk at wave number k.
    double energy_jacobian(double k) const noexcept { return hbar * hbar * k / mass; }

    bool operator==(const BarrierModel&) const = default;
};

struct WaveNumbers {
    cplx k;
    cplx kappa;
};

enum class Observable { Q, P, H };

inline std::string_view to_string(Observable o) {
    switch (o) {
        case Observable::Q: return "Q";
        case Observable::P: return "P";
        case Observable::H: return "H";
    }
    return "?";
}

/// Outside wave number k and interior wave number kappa at energy E > 0.
/// kappa takes the principal branch, so it is i|kappa| below the barrier top.
inline WaveNumbers wave_numbers(const BarrierModel& model, double energy) {
    model.validate();
    if (!(energy > 0.0) || !std::isfinite(energy))
        throw DomainError("energy must lie in the open continuous spectrum");
    const double s = model.energy_to_k2();
    const double k = std::sqrt(s * energy);
    const cplx kappa = std::sqrt(cplx(s * (energy - model.v0), 0.0));
    return {cplx(k, 0.0), kappa};
}

/// V(x). The edges x = a and x = b belong to the barrier.
inline double potential_at(const BarrierModel& model, double x) noexcept {
    return (x < model.a || x > model.b) ? 0.0 : model.v0;
}

}  // namespace rhsb
