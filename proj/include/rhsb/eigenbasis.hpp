#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "rhsb/model.hpp"
#include "rhsb/scattering.hpp"

namespace rhsb {

/// Continuum normalization (m / (2 pi k hbar^2))^{1/2} of the energy eigenfunctions.
inline double eigen_prefactor(const BarrierModel& model, double k) {
    return std::sqrt(model.mass / (2.0 * std::numbers::pi * k * model.hbar * model.hbar));
}

/// Values of the two plus-solutions at one point, without the prefactor.
struct ChannelPair {
    cplx left;
    cplx right;

    cplx operator[](Channel c) const { return c == Channel::left ? left : right; }
};

/// Bracketed (unnormalized) plus eigenfunctions at x for both incidences.
/// Inside the barrier the solution is propagated from x = a with the real
/// fundamental pair, which avoids overflow of e^{|kappa| x} and needs no
/// special case at the barrier top.
inline ChannelPair reduced_plus_eigenfunctions(const BarrierModel& model, const ScatteringSolution& sol,
                                               double x) {
    const double k = sol.wave.k.real();
    if (x < model.a) {
        const cplx e = std::polar(1.0, k * x);
        const cplx inv = std::conj(e);
        return {e + sol.R_l * inv, sol.T_right * inv};
    }
    if (x > model.b) {
        const cplx e = std::polar(1.0, k * x);
        return {sol.T * e, sol.R_r * e + std::conj(e)};
    }
    const auto f = fundamental_solutions(sol.kappa2, x - model.a);
    return {f.c * sol.left_state_at_a[0] + f.s * sol.left_state_at_a[1],
            f.c * sol.right_state_at_a[0] + f.s * sol.right_state_at_a[1]};
}

/// Bracketed eigenfunctions for either sign; the minus family is the
/// pointwise complex conjugate of the plus family.
inline ChannelPair reduced_eigenfunctions(const BarrierModel& model, const ScatteringSolution& sol, double x,
                                          SignLabel sign) {
    auto p = reduced_plus_eigenfunctions(model, sol, x);
    if (sign == SignLabel::minus) p = {std::conj(p.left), std::conj(p.right)};
    return p;
}

/// A generalized energy eigenfunction <x|E(sign)>_channel with its
/// scattering solution cached.
class EigenfunctionHandle {
public:
    static EigenfunctionHandle make(const BarrierModel& model, double energy, Channel channel, SignLabel sign) {
        return EigenfunctionHandle(model, solve_matching(model, energy), channel, sign);
    }

    EigenfunctionHandle(const BarrierModel& model, ScatteringSolution sol, Channel channel, SignLabel sign)
        : model_(model), sol_(std::move(sol)), channel_(channel), sign_(sign),
          prefactor_(eigen_prefactor(model, sol_.wave.k.real())) {}

    const BarrierModel& model() const noexcept { return model_; }
    const ScatteringSolution& solution() const noexcept { return sol_; }
    double energy() const noexcept { return sol_.energy; }
    double k() const noexcept { return sol_.wave.k.real(); }
    Channel channel() const noexcept { return channel_; }
    SignLabel sign() const noexcept { return sign_; }
    double prefactor() const noexcept { return prefactor_; }

    cplx operator()(double x) const {
        return prefactor_ * reduced_eigenfunctions(model_, sol_, x, sign_)[channel_];
    }

private:
    BarrierModel model_;
    ScatteringSolution sol_;
    Channel channel_;
    SignLabel sign_;
    double prefactor_;
};

inline cplx eval_energy_eigenfunction(const EigenfunctionHandle& h, double x) { return h(x); }

/// Momentum eigenfunction <x|p> = e^{ipx/hbar} / sqrt(2 pi hbar).
inline cplx eval_plane_wave(const BarrierModel& model, double p, double x) {
    return std::polar(1.0 / std::sqrt(2.0 * std::numbers::pi * model.hbar), p * x / model.hbar);
}

}  // namespace rhsb
