#pragma once

// Reference scattering data from direct RK4 integration of
// -hbar^2/(2m) psi'' + V psi = E psi across the barrier, decomposed into
// plane waves outside. Shares no code with the transfer-matrix solver.

#include <array>
#include <complex>

#include "rhsb/model.hpp"

namespace oracle {

using cplx = std::complex<double>;

struct Coefficients {
    cplx T_l, T_r, R_l, R_r, A_l, B_l, A_r, B_r;
};

struct State {
    cplx psi, dpsi;
};

/// Integrates from x0 to x1 (either direction) with constant potential v0 in between.
/// `probe` receives the state when the integration passes x_mid.
inline State rk4(const rhsb::BarrierModel& m, double energy, State s, double x0, double x1, int steps,
                 double x_mid, State* probe) {
    const double q = m.energy_to_k2() * (m.v0 - energy);  // psi'' = q psi
    const double h = (x1 - x0) / steps;
    const int mid_step = static_cast<int>((x_mid - x0) / h + 0.5);
    auto f = [q](const State& y) { return State{y.dpsi, q * y.psi}; };
    for (int n = 0; n < steps; ++n) {
        if (probe && n == mid_step) *probe = s;
        const State k1 = f(s);
        const State k2 = f({s.psi + 0.5 * h * k1.psi, s.dpsi + 0.5 * h * k1.dpsi});
        const State k3 = f({s.psi + 0.5 * h * k2.psi, s.dpsi + 0.5 * h * k2.dpsi});
        const State k4 = f({s.psi + h * k3.psi, s.dpsi + h * k3.dpsi});
        s.psi += h / 6.0 * (k1.psi + 2.0 * k2.psi + 2.0 * k3.psi + k4.psi);
        s.dpsi += h / 6.0 * (k1.dpsi + 2.0 * k2.dpsi + 2.0 * k3.dpsi + k4.dpsi);
    }
    return s;
}

/// Amplitudes (alpha, beta) of alpha e^{ikx} + beta e^{-ikx} matching the state at x.
inline std::array<cplx, 2> plane_waves(const State& s, double k, double x) {
    const cplx i(0.0, 1.0);
    const cplx d = s.dpsi / (i * k);
    return {0.5 * (s.psi + d) * std::exp(-i * k * x), 0.5 * (s.psi - d) * std::exp(i * k * x)};
}

/// Interior amplitudes (A, B) of A e^{i kappa x} + B e^{-i kappa x}, kappa on the principal branch.
inline std::array<cplx, 2> interior_waves(const State& s, cplx kappa, double x) {
    const cplx i(0.0, 1.0);
    const cplx d = s.dpsi / (i * kappa);
    return {0.5 * (s.psi + d) * std::exp(-i * kappa * x), 0.5 * (s.psi - d) * std::exp(i * kappa * x)};
}

inline Coefficients solve(const rhsb::BarrierModel& m, double energy, int steps = 40000) {
    const cplx i(0.0, 1.0);
    const double k = std::sqrt(m.energy_to_k2() * energy);
    const cplx kappa = std::sqrt(cplx(m.energy_to_k2() * (energy - m.v0), 0.0));
    const double mid = 0.5 * (m.a + m.b);
    Coefficients c;

    // Left incidence: pure e^{ikx} beyond b, integrated back to a and rescaled.
    {
        State probe{};
        const State at_b{std::exp(i * k * m.b), i * k * std::exp(i * k * m.b)};
        const State at_a = rk4(m, energy, at_b, m.b, m.a, steps, mid, &probe);
        const auto w = plane_waves(at_a, k, m.a);
        c.T_l = 1.0 / w[0];
        c.R_l = w[1] / w[0];
        const auto in = interior_waves({probe.psi / w[0], probe.dpsi / w[0]}, kappa, mid);
        c.A_l = in[0];
        c.B_l = in[1];
    }
    // Right incidence: pure e^{-ikx} before a, integrated forward to b.
    {
        State probe{};
        const State at_a{std::exp(-i * k * m.a), -i * k * std::exp(-i * k * m.a)};
        const State at_b = rk4(m, energy, at_a, m.a, m.b, steps, mid, &probe);
        const auto w = plane_waves(at_b, k, m.b);
        c.T_r = 1.0 / w[1];
        c.R_r = w[0] / w[1];
        const auto in = interior_waves({probe.psi / w[1], probe.dpsi / w[1]}, kappa, mid);
        c.A_r = in[0];
        c.B_r = in[1];
    }
    return c;
}

}  // namespace oracle
