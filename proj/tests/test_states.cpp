#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lattice_entropy/states.hpp"

using namespace lattice_entropy;

namespace {

const LatticeModel& model16() {
    static const LatticeModel m = [] {
        LatticeParams p;
        p.L = 16;
        p.num_particles = 2;
        return solve_lattice(p);
    }();
    return m;
}

Spectrum two_level() {
    Eigen::Matrix2d H;
    H << 0, -1.9, -1.9, 0;
    return diagonalize(H);
}

}  // namespace

TEST(NormalStream, MomentsAndDeterminism) {
    NormalStream a(42), b(42);
    double sum = 0, sq = 0;
    constexpr int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = a.normal();
        EXPECT_EQ(x, b.normal());
        sum += x;
        sq += x * x;
    }
    EXPECT_NEAR(sum / n, 0.0, 0.01);
    EXPECT_NEAR(sq / n, 1.0, 0.01);
}

TEST(Rpts, NormalizedAndDeterministic) {
    const auto& spec = model16().spectrum;
    for (auto kind : {StateKind::real, StateKind::complex}) {
        const StateVector s = sample_rpts(spec, 0.01, kind, 7);
        EXPECT_NEAR(s.amps.norm(), 1.0, 1e-12);
        const StateVector again = sample_rpts(spec, 0.01, kind, 7);
        EXPECT_EQ(s.amps, again.amps);
        if (kind == StateKind::real) {
            EXPECT_EQ(s.amps.imag().cwiseAbs().maxCoeff(), 0.0);
        }
    }
    EXPECT_NE(sample_rpts(spec, 0.01, StateKind::complex, 1).amps, sample_rpts(spec, 0.01, StateKind::complex, 2).amps);
    EXPECT_THROW((void)sample_rpts(spec, -1.0, StateKind::complex, 1), ParameterError);
    EXPECT_THROW((void)sample_rpts(spec, 0.1, StateKind::other, 1), ParameterError);
}

TEST(Rpts, ParticipationRatioAtInfiniteTemperature) {
    // For complex Gaussian coefficients E|c|^4 = 2, so 1 / sum |a|^4 ~ dim / 2.
    const auto& spec = model16().spectrum;
    double mean = 0.0;
    constexpr int seeds = 200;
    for (int seed = 1; seed <= seeds; ++seed) {
        const StateVector s = sample_rpts(spec, 0.0, StateKind::complex, static_cast<std::uint64_t>(seed));
        mean += 1.0 / s.amps.cwiseAbs2().array().square().sum();
    }
    mean /= seeds;
    EXPECT_NEAR(mean, 60.0, 6.0);
}

TEST(Rpts, LowTemperatureConcentratesOnGroundState) {
    const StateVector s = sample_rpts(model16().spectrum, 200.0, StateKind::complex, 3);
    EXPECT_NEAR(std::norm(s.amps[0]), 1.0, 1e-9);
}

TEST(Evolve, IdentityGroupLawAndPhaseFlip) {
    const auto& spec = model16().spectrum;
    const StateVector s = sample_rpts(spec, 0.01, StateKind::complex, 5);
    EXPECT_EQ(evolve(s, spec, 0.0).amps, s.amps);
    const auto a = evolve(evolve(s, spec, 1.3), spec, 2.9).amps;
    const auto b = evolve(s, spec, 4.2).amps;
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(evolve(s, spec, 123.4).amps.norm(), 1.0, 1e-12);
    EXPECT_LE((evolve(s, spec, 77.0).amps.cwiseAbs() - s.amps.cwiseAbs()).cwiseAbs().maxCoeff(), 1e-14);

    const Spectrum two = two_level();
    StateVector plus{Eigen::VectorXcd::Constant(2, std::sqrt(0.5)), 0.0, StateKind::other, 0};
    const auto flipped = evolve(plus, two, std::numbers::pi / 3.8).amps;
    const Complex relative = flipped[1] / flipped[0];
    EXPECT_NEAR(relative.real(), -1.0, 1e-12);
    EXPECT_NEAR(relative.imag(), 0.0, 1e-12);
}

TEST(Phases, GaugeWrapAndTimeEquivalence) {
    const auto& spec = model16().spectrum;
    const StateVector s = sample_rpts(spec, 0.01, StateKind::complex, 9);
    EXPECT_EQ(apply_phases(s, PhaseVector(s.dim())).amps, s.amps);

    const double t = 17.25;
    const PhaseVector phi = phases_for_time(spec, t);
    EXPECT_EQ(phi[0], 0.0);
    for (Eigen::Index k = 0; k < phi.size(); ++k) {
        EXPECT_GE(phi[k], 0.0);
        EXPECT_LT(phi[k], 2 * std::numbers::pi);
    }
    // Equal up to the global phase e^{-i E_0 t}.
    const Eigen::VectorXcd a = apply_phases(s, phi).amps * std::polar(1.0, -spec.energies[0] * t);
    const Eigen::VectorXcd b = evolve(s, spec, t).amps;
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-10);

    const Eigen::VectorXd free = Eigen::VectorXd::LinSpaced(s.dim() - 1, -7.0, 19.0);
    const PhaseVector p = PhaseVector::from_free(free);
    EXPECT_EQ(p[0], 0.0);
    EXPECT_NEAR(p[1], PhaseVector::wrap(-7.0), 0.0);
    EXPECT_THROW((void)apply_phases(s, PhaseVector(3)), DimensionError);
}

TEST(Phases, DensityAndEnergyInvariant) {
    const LatticeModel& m = model16();
    const StateVector s = sample_rpts(m.spectrum, 0.3, StateKind::complex, 11);
    NormalStream rng(3);
    Eigen::VectorXd raw(s.dim());
    for (auto& x : raw) x = 10 * rng.normal();
    const StateVector r = apply_phases(s, PhaseVector::gauge_fixed(raw));
    EXPECT_NEAR(r.amps.norm(), 1.0, 1e-12);
    EXPECT_NEAR(energy_expectation(r, m.spectrum), energy_expectation(s, m.spectrum), 1e-10);
    const auto d = particle_density(to_fock_basis(r, m.spectrum), m.basis);
    double total = 0.0;
    for (double x : d) {
        EXPECT_GE(x, -1e-15);
        EXPECT_LE(x, 1.0 + 1e-12);
        total += x;
    }
    EXPECT_NEAR(total, 2.0, 1e-9);
}

TEST(BasisChange, EigenstateAndRoundTrip) {
    const auto& spec = model16().spectrum;
    Eigen::VectorXcd e3 = Eigen::VectorXcd::Zero(spec.dim());
    e3[3] = 1.0;
    EXPECT_LE((to_fock_basis(e3, spec).real() - spec.eigenvectors.col(3)).cwiseAbs().maxCoeff(), 1e-15);
    const StateVector s = sample_rpts(spec, 0.01, StateKind::complex, 4);
    const auto fock = to_fock_basis(s, spec);
    EXPECT_NEAR(fock.norm(), 1.0, 1e-10);
    EXPECT_LE((to_energy_basis(fock, spec) - s.amps).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(BasisChange, LongTimeDensityIsNearUniform) {
    const LatticeModel& m = model16();
    const StateVector s = sample_rpts(m.spectrum, 0.01, StateKind::complex, 1);
    std::vector<double> mean(16, 0.0);
    constexpr int samples = 2000;
    for (int i = 0; i < samples; ++i) {
        const auto d = particle_density(to_fock_basis(evolve(s, m.spectrum, 3.7 * i), m.spectrum), m.basis);
        for (int k = 0; k < 16; ++k) mean[static_cast<std::size_t>(k)] += d[static_cast<std::size_t>(k)] / samples;
    }
    for (double x : mean) EXPECT_NEAR(x, 2.0 / 16.0, 0.1 * 2.0 / 16.0);
}

TEST(Serialization, StateRoundTrip) {
    const StateVector s = sample_rpts(model16().spectrum, 0.5, StateKind::real, 21);
    const nlohmann::json j = s;
    EXPECT_EQ(j.at("rng").get<std::string>(), std::string(kRngAlgorithm));
    const StateVector back = j.get<StateVector>();
    EXPECT_EQ(back.amps, s.amps);
    EXPECT_EQ(back.beta, s.beta);
    EXPECT_EQ(back.kind, s.kind);
    EXPECT_EQ(back.seed, s.seed);
}
