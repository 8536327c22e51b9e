#include <gtest/gtest.h>

#include <cmath>

#include "rhsb/io.hpp"
#include "rhsb/model.hpp"

using namespace rhsb;

TEST(BarrierModel, RejectsInvalidParameters) {
    EXPECT_THROW(BarrierModel::make(1.0, 0.0, 2.0), DomainError);
    EXPECT_THROW(BarrierModel::make(0.0, 0.0, 2.0), DomainError);
    EXPECT_THROW(BarrierModel::make(0.0, 1.0, -0.5), DomainError);
    EXPECT_THROW(BarrierModel::make(0.0, 1.0, 2.0, 0.0), DomainError);
    EXPECT_THROW(BarrierModel::make(0.0, 1.0, 2.0, 1.0, -1.0), DomainError);
    EXPECT_NO_THROW(BarrierModel::make(0.0, 1.0, 0.0));
}

TEST(WaveNumbers, ExamplesOnBothSidesOfTheBarrierTop) {
    const BarrierModel m;
    auto w = wave_numbers(m, 4.0);
    EXPECT_DOUBLE_EQ(w.k.real(), 2.0);
    EXPECT_NEAR(std::abs(w.kappa - std::sqrt(2.0)), 0.0, 1e-15);

    w = wave_numbers(m, 2.0);
    EXPECT_EQ(w.kappa, cplx(0.0, 0.0));

    w = wave_numbers(m, 1.0);
    EXPECT_DOUBLE_EQ(w.k.real(), 1.0);
    EXPECT_NEAR(std::abs(w.kappa - cplx(0.0, 1.0)), 0.0, 1e-15);
}

TEST(WaveNumbers, NonPositiveEnergyIsOutsideTheSpectrum) {
    const BarrierModel m;
    for (double e : {0.0, -1.0, std::nan("")}) {
        try {
            wave_numbers(m, e);
            FAIL() << "no exception for E=" << e;
        } catch (const DomainError& err) {
            EXPECT_STREQ(err.what(), "energy must lie in the open continuous spectrum");
        }
    }
}

TEST(WaveNumbers, InvariantsOnAGrid) {
    const auto m = BarrierModel::make(-0.3, 1.7, 3.5, 1.3, 0.8);
    double prev = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double e = 1e-3 * std::pow(1e7, i / 199.0);
        const auto w = wave_numbers(m, e);
        EXPECT_GT(w.k.real(), prev);
        prev = w.k.real();
        EXPECT_EQ(w.k.imag(), 0.0);
        EXPECT_GE(w.kappa.imag(), 0.0);
        const double want = m.energy_to_k2() * (e - m.v0);
        EXPECT_LE(std::abs(w.kappa * w.kappa - want), 1e-14 * std::abs(want) + 1e-300);
        EXPECT_NEAR(w.k.real(), std::sqrt(2.0 * m.mass * e) / m.hbar, 1e-14 * w.k.real());
    }
}

TEST(WaveNumbers, FreeCaseKappaEqualsK) {
    const auto m = BarrierModel::make(0.0, 1.0, 0.0);
    for (double e : {1e-3, 0.5, 2.0, 17.0, 1e4}) {
        const auto w = wave_numbers(m, e);
        EXPECT_LT(std::abs(w.kappa - w.k), 1e-14 * std::max(1.0, w.k.real()));
    }
}

TEST(Potential, ClosedBarrierConvention) {
    const BarrierModel m;
    EXPECT_EQ(potential_at(m, -5.0), 0.0);
    EXPECT_EQ(potential_at(m, 0.5), 2.0);
    EXPECT_EQ(potential_at(m, 0.0), 2.0);
    EXPECT_EQ(potential_at(m, 1.0), 2.0);
    EXPECT_EQ(potential_at(m, 1.0 + 1e-15), 0.0);
}

TEST(Json, ModelRoundTripAndUnknownKeys) {
    const auto m = BarrierModel::make(-1.0, 2.5, 4.0, 0.7, 1.1);
    const json j = m;
    EXPECT_EQ(j.at("v0").get<double>(), 4.0);
    EXPECT_EQ(j.get<BarrierModel>(), m);
    EXPECT_THROW((json{{"a", 0.0}, {"V0", 1.0}}.get<BarrierModel>()), ConfigError);
}

TEST(Json, QuadratureSpecRoundTrip) {
    QuadratureSpec q;
    q.abs_tol = 1e-9;
    q.k_max = 25.0;
    q.max_subdivisions = 123;
    const json j = q;
    const auto back = j.get<QuadratureSpec>();
    EXPECT_EQ(back.abs_tol, 1e-9);
    EXPECT_EQ(back.k_max, 25.0);
    EXPECT_EQ(back.max_subdivisions, 123);
    EXPECT_THROW((json{{"tolerance", 1.0}}.get<QuadratureSpec>()), ConfigError);
}

TEST(Json, PacketDescriptor) {
    const PacketDescriptor p{-10.0, 1.5, 2.0, 3};
    const json j = p;
    EXPECT_EQ(j.at("kind"), "gaussian_packet");
    EXPECT_EQ(j.get<PacketDescriptor>(), p);
    EXPECT_THROW((json{{"kind", "lorentzian"}}.get<PacketDescriptor>()), ConfigError);
}

TEST(Csv, SeventeenDigitsAndHeader) {
    CsvWriter w({"x", "channel", "y"});
    w.row(0.1, std::string("l"), 1.0 / 3.0);
    EXPECT_EQ(w.str(), "x,channel,y\n0.10000000000000001,l,0.33333333333333331\n");
}
