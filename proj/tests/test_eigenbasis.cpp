#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rhsb/eigenbasis.hpp"

using namespace rhsb;

namespace {

const double kPi = std::numbers::pi;

// -(hbar^2/2m) psi'' + V psi - E psi with a fourth-order central difference.
cplx schrodinger_residual(const EigenfunctionHandle& h, double x, double step) {
    const auto& m = h.model();
    const cplx d2 = (-h(x + 2 * step) + 16.0 * h(x + step) - 30.0 * h(x) + 16.0 * h(x - step) - h(x - 2 * step)) /
                    (12.0 * step * step);
    return -m.hbar * m.hbar / (2.0 * m.mass) * d2 + (potential_at(m, x) - h.energy()) * h(x);
}

}  // namespace

TEST(EnergyEigenfunction, FreePlaneWave) {
    const auto m = BarrierModel::make(0.0, 1.0, 0.0);
    const auto h = EigenfunctionHandle::make(m, 4.0, Channel::left, SignLabel::plus);
    const double pre = std::sqrt(m.mass / (2.0 * kPi * 2.0 * m.hbar * m.hbar));
    for (double x : {-7.0, 0.0, 0.3, 1.0, 12.5}) EXPECT_LT(std::abs(h(x) - pre * std::polar(1.0, 2.0 * x)), 1e-14);
}

TEST(EnergyEigenfunction, TransmittedRegionForm) {
    const BarrierModel m;
    const auto h = EigenfunctionHandle::make(m, 1.0, Channel::left, SignLabel::plus);
    const auto s = solve_matching(m, 1.0);
    const cplx want = eigen_prefactor(m, 1.0) * s.T * std::polar(1.0, 2.0);
    EXPECT_LT(std::abs(h(2.0) - want), 1e-15);
    EXPECT_EQ(eval_energy_eigenfunction(h, 2.0), h(2.0));
}

TEST(EnergyEigenfunction, PrintedFormsInEveryRegion) {
    const BarrierModel m;
    const cplx i(0.0, 1.0);
    for (double e : {0.7, 3.5, 30.0}) {
        const auto s = solve_matching(m, e);
        const double k = s.wave.k.real();
        const cplx kap = s.wave.kappa;
        const double pre = eigen_prefactor(m, k);
        const auto hl = EigenfunctionHandle::make(m, e, Channel::left, SignLabel::plus);
        const auto hr = EigenfunctionHandle::make(m, e, Channel::right, SignLabel::plus);
        for (double x : {-3.0, -0.2, 0.25, 0.5, 0.9, 1.4, 6.0}) {
            cplx wl, wr;
            if (x < m.a) {
                wl = std::exp(i * k * x) + s.R_l * std::exp(-i * k * x);
                wr = s.T * std::exp(-i * k * x);
            } else if (x > m.b) {
                wl = s.T * std::exp(i * k * x);
                wr = s.R_r * std::exp(i * k * x) + std::exp(-i * k * x);
            } else {
                wl = s.A_l * std::exp(i * kap * x) + s.B_l * std::exp(-i * kap * x);
                wr = s.A_r * std::exp(i * kap * x) + s.B_r * std::exp(-i * kap * x);
            }
            EXPECT_LT(std::abs(hl(x) - pre * wl), 1e-12 * std::max(1.0, std::abs(pre * wl))) << e << " " << x;
            EXPECT_LT(std::abs(hr(x) - pre * wr), 1e-12 * std::max(1.0, std::abs(pre * wr))) << e << " " << x;
        }
    }
}

TEST(EnergyEigenfunction, ContinuousAcrossInterfaces) {
    const BarrierModel m;
    for (double e : {0.2, 1.0, 2.0, 5.0})
        for (auto c : kChannels)
            for (auto s : {SignLabel::plus, SignLabel::minus}) {
                const auto h = EigenfunctionHandle::make(m, e, c, s);
                for (double edge : {m.a, m.b}) {
                    const cplx lo = h(edge - 1e-8), hi = h(edge + 1e-8);
                    EXPECT_LT(std::abs(lo - hi), 1e-7 * std::max(std::abs(lo), std::abs(hi)));
                    EXPECT_TRUE(std::isfinite(std::abs(h(edge))));
                }
            }
}

TEST(EnergyEigenfunction, OneSidedLimitsAgreeAtHighEnergy) {
    const BarrierModel m;
    const double d = 1e-6;
    for (double e : {20.0, 80.0, 500.0})
        for (auto c : kChannels) {
            const auto h = EigenfunctionHandle::make(m, e, c, SignLabel::plus);
            for (double edge : {m.a, m.b}) {
                const cplx left = 2.0 * h(edge - d) - h(edge - 2 * d);
                const cplx right = 2.0 * h(edge + d) - h(edge + 2 * d);
                EXPECT_LT(std::abs(left - right), 1e-7 * std::abs(h(edge))) << e;
            }
        }
}

TEST(EnergyEigenfunction, SchrodingerResidual) {
    const auto m = BarrierModel::make(-0.5, 1.5, 3.0, 1.0, 0.5);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(-4.0, 5.0);
    for (double e : {0.3, 1.0, 3.0, 7.0, 40.0})
        for (auto c : kChannels)
            for (auto s : {SignLabel::plus, SignLabel::minus}) {
                const auto h = EigenfunctionHandle::make(m, e, c, s);
                for (int n = 0; n < 20; ++n) {
                    const double x = ux(rng);
                    const double step = 2e-3;
                    if (std::abs(x - m.a) < 2.5 * step || std::abs(x - m.b) < 2.5 * step) continue;
                    EXPECT_LT(std::abs(schrodinger_residual(h, x, step)), 1e-6 * (1.0 + e) * h.prefactor())
                        << "E=" << e << " x=" << x;
                }
            }
}

TEST(EnergyEigenfunction, MinusIsPointwiseConjugate) {
    const BarrierModel m;
    for (double e : {0.5, 2.0, 9.0})
        for (auto c : kChannels) {
            const auto hp = EigenfunctionHandle::make(m, e, c, SignLabel::plus);
            const auto hm = EigenfunctionHandle::make(m, e, c, SignLabel::minus);
            for (double x : {-2.0, 0.1, 0.6, 3.0}) EXPECT_EQ(hm(x), std::conj(hp(x)));
        }
}

TEST(EnergyEigenfunction, MinusOutsideUsesConjugatedCoefficients) {
    const BarrierModel m;
    const auto s = solve_matching(m, 1.7);
    const auto c = s.conjugated();
    const double k = s.wave.k.real();
    const cplx i(0.0, 1.0);
    const auto h = EigenfunctionHandle::make(m, 1.7, Channel::left, SignLabel::minus);
    // Left incidence, minus: e^{-ikx} + R_l* e^{ikx} to the left, T* e^{-ikx} to the right.
    EXPECT_LT(std::abs(h(-2.0) - h.prefactor() * (std::exp(-i * k * -2.0) + c.R_l * std::exp(i * k * -2.0))), 1e-14);
    EXPECT_LT(std::abs(h(3.0) - h.prefactor() * c.T * std::exp(-i * k * 3.0)), 1e-14);
}

TEST(EnergyEigenfunction, HandleCachesSolution) {
    const BarrierModel m;
    const auto h = EigenfunctionHandle::make(m, 1.25, Channel::right, SignLabel::plus);
    const auto s = solve_matching(m, 1.25);
    EXPECT_EQ(h.solution().T, s.T);
    EXPECT_EQ(h.solution().R_r, s.R_r);
    EXPECT_THROW(EigenfunctionHandle::make(m, 0.0, Channel::left, SignLabel::plus), DomainError);
}

TEST(PlaneWave, Examples) {
    const BarrierModel m;
    const double inv = 1.0 / std::sqrt(2.0 * kPi);
    EXPECT_LT(std::abs(eval_plane_wave(m, 0.0, 3.3) - inv), 1e-16);
    EXPECT_LT(std::abs(eval_plane_wave(m, kPi, 1.0) + inv), 1e-15);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int n = 0; n < 50; ++n) EXPECT_NEAR(std::abs(eval_plane_wave(m, u(rng), u(rng))), inv, 1e-15);
    const auto m2 = BarrierModel::make(0.0, 1.0, 2.0, 0.25, 1.0);
    EXPECT_NEAR(std::abs(eval_plane_wave(m2, 1.0, 1.0)), 1.0 / std::sqrt(2.0 * kPi * 0.25), 1e-15);
}
