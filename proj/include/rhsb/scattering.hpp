#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <string_view>
#include <tuple>
#include <vector>

#include "rhsb/errors.hpp"
#include "rhsb/model.hpp"

namespace rhsb {

enum class Channel { left, right };    ///< incidence from the left / from the right
enum class SignLabel { plus, minus };  ///< incoming (+) or outgoing (-) boundary condition

inline constexpr std::array<Channel, 2> kChannels = {Channel::left, Channel::right};

inline std::string_view to_string(Channel c) { return c == Channel::left ? "l" : "r"; }
inline std::string_view to_string(SignLabel s) { return s == SignLabel::plus ? "+" : "-"; }

/// Interior basis in which A and B are expressed: A e^{i kappa x} + B e^{-i kappa x},
/// or A + B x exactly at the barrier top where kappa = 0.
enum class InteriorBasis { exponential, linear };

/// |E - V0| at or below this (times max(1, V0)) is treated as the barrier top.
inline constexpr double kDegenerateEnergyThreshold = 1e-12;
inline constexpr double kMaxCondition = 1e12;

struct Mat2 {
    cplx m11, m12, m21, m22;

    friend Mat2 operator*(const Mat2& x, const Mat2& y) {
        return {x.m11 * y.m11 + x.m12 * y.m21, x.m11 * y.m12 + x.m12 * y.m22,
                x.m21 * y.m11 + x.m22 * y.m21, x.m21 * y.m12 + x.m22 * y.m22};
    }
    std::array<cplx, 2> apply(cplx u, cplx v) const { return {m11 * u + m12 * v, m21 * u + m22 * v}; }
    cplx det() const { return m11 * m22 - m12 * m21; }
};

/// Fundamental solutions of psi'' = -q psi with psi(0)=1, psi'(0)=0 (c) and
/// psi(0)=0, psi'(0)=1 (s). Both are real for real q and entire in q, so the
/// three regimes q > 0, q < 0, q = 0 join continuously.
struct Fundamental {
    double c;
    double s;
    double dc;  ///< c'(t) = -q s(t)
};

inline Fundamental fundamental_solutions(double q, double t) {
    const double z = q * t * t;
    if (q == 0.0) return {1.0, t, 0.0};
    if (std::abs(z) < 1e-4) {
        // Taylor series; exact to double precision in this range.
        const double c = 1.0 - z / 2.0 + z * z / 24.0 - z * z * z / 720.0;
        const double s = t * (1.0 - z / 6.0 + z * z / 120.0 - z * z * z / 5040.0);
        return {c, s, -q * s};
    }
    if (q > 0.0) {
        const double w = std::sqrt(q);
        const double sn = std::sin(w * t), cs = std::cos(w * t);
        return {cs, sn / w, -w * sn};
    }
    const double g = std::sqrt(-q);
    const double sn = std::sinh(g * t), cs = std::cosh(g * t);
    return {cs, sn / g, g * sn};
}

/// A constant-potential slab [start, end] with potential `v`.
struct Segment {
    double start;
    double end;
    double v;
};

/// Transfer matrix carrying (psi, psi') from the left edge of the chain to
/// its right edge at energy E. Each slab contributes [[c, s], [-q s, c]],
/// which has unit determinant, so the Wronskian (and hence the flux) is
/// conserved by construction.
inline Mat2 chain_transfer(std::span<const Segment> chain, const BarrierModel& model, double energy) {
    Mat2 m{1.0, 0.0, 0.0, 1.0};
    for (const auto& seg : chain) {
        double q = model.energy_to_k2() * (energy - seg.v);
        if (std::abs(energy - seg.v) <= kDegenerateEnergyThreshold * std::max(1.0, std::abs(seg.v))) q = 0.0;
        const auto f = fundamental_solutions(q, seg.end - seg.start);
        m = Mat2{f.c, f.s, f.dc, f.c} * m;
    }
    return m;
}

/// Scattering data of the barrier at one energy, in the phase convention
/// where each incident plane wave has unit amplitude and all plane waves are
/// referred to x = 0:
///
///   left incidence:  e^{ikx} + R_l e^{-ikx} | A_l, B_l interior | T e^{ikx}
///   right incidence: T e^{-ikx}             | A_r, B_r interior | R_r e^{ikx} + e^{-ikx}
struct ScatteringSolution {
    double energy = 0.0;
    WaveNumbers wave{};
    cplx T, R_l, R_r, A_l, B_l, A_r, B_r;
    InteriorBasis interior = InteriorBasis::exponential;

    double kappa2 = 0.0;  ///< kappa^2 as used by the interior propagator (0 on the degenerate branch)
    cplx T_right;         ///< transmission computed from the right-incidence system
    std::array<cplx, 2> left_state_at_a;   ///< (psi, psi') at x = a, left incidence
    std::array<cplx, 2> right_state_at_a;  ///< (psi, psi') at x = a, right incidence
    double condition = 1.0;

    /// Coefficients of the minus solutions: entrywise complex conjugates.
    ScatteringSolution conjugated() const {
        ScatteringSolution s = *this;
        for (cplx* z : {&s.T, &s.R_l, &s.R_r, &s.A_l, &s.B_l, &s.A_r, &s.B_r, &s.T_right}) *z = std::conj(*z);
        for (auto* st : {&s.left_state_at_a, &s.right_state_at_a})
            for (auto& z : *st) z = std::conj(z);
        return s;
    }
};

namespace detail {

inline double equilibrated_condition(std::array<std::array<cplx, 2>, 2> a) {
    for (auto& row : a) {
        const double r = std::max(std::abs(row[0]), std::abs(row[1]));
        if (r > 0.0) row[0] /= r, row[1] /= r;
    }
    for (int j = 0; j < 2; ++j) {
        const double c = std::max(std::abs(a[0][j]), std::abs(a[1][j]));
        if (c > 0.0) a[0][j] /= c, a[1][j] /= c;
    }
    const double fro2 = std::norm(a[0][0]) + std::norm(a[0][1]) + std::norm(a[1][0]) + std::norm(a[1][1]);
    const double det = std::abs(a[0][0] * a[1][1] - a[0][1] * a[1][0]);
    if (det == 0.0) return std::numeric_limits<double>::infinity();
    // sigma_max^2 + sigma_min^2 = fro2, sigma_max * sigma_min = det.
    const double disc = std::sqrt(std::max(0.0, fro2 * fro2 - 4.0 * det * det));
    const double smax2 = 0.5 * (fro2 + disc);
    return smax2 / det;
}

/// Interior coefficients from (psi, psi') at x = a.
inline std::pair<cplx, cplx> interior_coefficients(const std::array<cplx, 2>& state, double a, cplx kappa,
                                                   InteriorBasis basis) {
    if (basis == InteriorBasis::linear) return {state[0] - a * state[1], state[1]};
    const cplx i(0.0, 1.0);
    const cplx d = state[1] / (i * kappa);
    return {0.5 * (state[0] + d) * std::exp(-i * kappa * a), 0.5 * (state[0] - d) * std::exp(i * kappa * a)};
}

inline ScatteringSolution solve_at(const BarrierModel& model, double energy, double k) {
    const cplx i(0.0, 1.0);
    ScatteringSolution sol;
    sol.energy = energy;
    sol.wave = {cplx(k, 0.0), std::sqrt(cplx(model.energy_to_k2() * (energy - model.v0), 0.0))};
    const bool degenerate =
        std::abs(energy - model.v0) <= kDegenerateEnergyThreshold * std::max(1.0, model.v0);
    sol.interior = degenerate ? InteriorBasis::linear : InteriorBasis::exponential;
    sol.kappa2 = degenerate ? 0.0 : model.energy_to_k2() * (energy - model.v0);
    if (degenerate) sol.wave.kappa = 0.0;

    const Segment slab{model.a, model.b, model.v0};
    const Mat2 m = chain_transfer(std::span(&slab, 1), model, energy);

    const cplx ea = std::exp(i * k * model.a), eb = std::exp(i * k * model.b);
    // Plane-wave states (psi, psi') at the interfaces.
    const std::array<cplx, 2> in_at_a{ea, i * k * ea};              // e^{ikx} at a
    const std::array<cplx, 2> back_at_a{1.0 / ea, -i * k / ea};     // e^{-ikx} at a
    const std::array<cplx, 2> out_at_b{eb, i * k * eb};             // e^{ikx} at b
    const std::array<cplx, 2> back_at_b{1.0 / eb, -i * k / eb};     // e^{-ikx} at b

    // Both incidences share the system [M e^{-ikx}|_a , -e^{ikx}|_b].
    const auto mv = m.apply(back_at_a[0], back_at_a[1]);
    const std::array<std::array<cplx, 2>, 2> sys{{{mv[0], -out_at_b[0]}, {mv[1], -out_at_b[1]}}};
    sol.condition = equilibrated_condition(sys);
    if (!(sol.condition <= kMaxCondition))
        throw ConditioningError("matching system is numerically singular", sol.condition);

    const cplx det = sys[0][0] * sys[1][1] - sys[0][1] * sys[1][0];
    auto solve = [&](cplx r0, cplx r1) -> std::array<cplx, 2> {
        return {(r0 * sys[1][1] - sys[0][1] * r1) / det, (sys[0][0] * r1 - r0 * sys[1][0]) / det};
    };

    // Left incidence: R_l M e^{-ikx} - T e^{ikx} = -M e^{ikx}.
    const auto mu = m.apply(in_at_a[0], in_at_a[1]);
    const auto left = solve(-mu[0], -mu[1]);
    sol.R_l = left[0];
    sol.T = left[1];
    sol.left_state_at_a = {in_at_a[0] + sol.R_l * back_at_a[0], in_at_a[1] + sol.R_l * back_at_a[1]};

    // Right incidence: T_r M e^{-ikx} - R_r e^{ikx} = e^{-ikx} at b.
    const auto right = solve(back_at_b[0], back_at_b[1]);
    sol.T_right = right[0];
    sol.R_r = right[1];
    sol.right_state_at_a = {sol.T_right * back_at_a[0], sol.T_right * back_at_a[1]};

    std::tie(sol.A_l, sol.B_l) = interior_coefficients(sol.left_state_at_a, model.a, sol.wave.kappa, sol.interior);
    std::tie(sol.A_r, sol.B_r) = interior_coefficients(sol.right_state_at_a, model.a, sol.wave.kappa, sol.interior);
    return sol;
}

}  // namespace detail

/// Solves the continuity conditions for psi and psi' at x = a and x = b for
/// both incidence directions.
inline ScatteringSolution solve_matching(const BarrierModel& model, double energy) {
    const auto w = wave_numbers(model, energy);
    return detail::solve_at(model, energy, w.k.real());
}

/// Same as solve_matching, parameterized by the outside wave number k > 0.
inline ScatteringSolution solve_matching_at_k(const BarrierModel& model, double k) {
    model.validate();
    if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("energy must lie in the open continuous spectrum");
    return detail::solve_at(model, model.energy_from_k(k), k);
}

/// S = [[T, R_r], [R_l, T]].
inline Mat2 s_matrix(const ScatteringSolution& sol) { return {sol.T, sol.R_r, sol.R_l, sol.T}; }
inline Mat2 s_matrix(const BarrierModel& model, double energy) { return s_matrix(solve_matching(model, energy)); }

/// max_ij |(S^dagger S - I)_ij|.
inline double unitarity_defect(const Mat2& s) {
    const cplx d11 = std::norm(s.m11) + std::norm(s.m21) - 1.0;
    const cplx d22 = std::norm(s.m12) + std::norm(s.m22) - 1.0;
    const cplx d12 = std::conj(s.m11) * s.m12 + std::conj(s.m21) * s.m22;
    return std::max({std::abs(d11), std::abs(d22), std::abs(d12)});
}

/// Largest relative jump in psi or psi' across x = a or x = b, assembling the
/// piecewise solutions from the reported (printed-form) coefficients.
inline double matching_defect(const BarrierModel& model, const ScatteringSolution& sol) {
    const cplx i(0.0, 1.0);
    const cplx k = sol.wave.k, kap = sol.wave.kappa;
    auto plane = [&](cplx fwd, cplx bwd, double x) -> std::array<cplx, 2> {
        const cplx e = std::exp(i * k * x);
        return {fwd * e + bwd / e, i * k * (fwd * e - bwd / e)};
    };
    auto inner = [&](cplx A, cplx B, double x) -> std::array<cplx, 2> {
        if (sol.interior == InteriorBasis::linear) return {A + B * x, B};
        const cplx e = std::exp(i * kap * x);
        return {A * e + B / e, i * kap * (A * e - B / e)};
    };
    auto jump = [&](const std::array<cplx, 2>& u, const std::array<cplx, 2>& v) {
        const double sv = std::max({1.0, std::abs(u[0]), std::abs(v[0])});
        const double sd = std::max({1.0, std::abs(k), std::abs(u[1]), std::abs(v[1])});
        return std::max(std::abs(u[0] - v[0]) / sv, std::abs(u[1] - v[1]) / sd);
    };
    const double a = model.a, b = model.b;
    return std::max({jump(plane(1.0, sol.R_l, a), inner(sol.A_l, sol.B_l, a)),
                     jump(inner(sol.A_l, sol.B_l, b), plane(sol.T, 0.0, b)),
                     jump(plane(0.0, sol.T, a), inner(sol.A_r, sol.B_r, a)),
                     jump(inner(sol.A_r, sol.B_r, b), plane(sol.R_r, 1.0, b))});
}

}  // namespace rhsb
