#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lattice_entropy/extremize.hpp"

using namespace lattice_entropy;

namespace {

LatticeModel solve(int L, int np) {
    LatticeParams p;
    p.L = L;
    p.num_particles = np;
    return solve_lattice(p);
}

ExtremizeOptions quick(int restarts = 2, std::int64_t evals = 20000) {
    ExtremizeOptions o;
    o.optimizer.restarts = restarts;
    o.optimizer.max_evals = evals;
    o.scan_t_max = 500;
    return o;
}

}  // namespace

TEST(NelderMead, ConvexBowl) {
    const Objective f = [](const Eigen::VectorXd& x) { return (x.array() - 1.0).square().sum(); };
    NelderMeadConfig cfg;
    cfg.restarts = 1;
    cfg.tol_f = 1e-14;
    cfg.tol_x = 1e-8;
    const SimplexResult r = nelder_mead(f, 4, cfg, {Eigen::VectorXd::Zero(4)});
    EXPECT_LT(r.value, 1e-10);
    EXPECT_LE((r.x.array() - 1.0).abs().maxCoeff(), 1e-4);
}

TEST(NelderMead, ConstantConvergesImmediately) {
    const Objective f = [](const Eigen::VectorXd&) { return 3.25; };
    NelderMeadConfig cfg;
    cfg.restarts = 1;
    const SimplexResult r = nelder_mead(f, 5, cfg);
    EXPECT_EQ(r.value, 3.25);
    EXPECT_TRUE(r.converged);
    EXPECT_LT(r.evaluations, 100);
}

TEST(NelderMead, Rosenbrock) {
    const Objective f = [](const Eigen::VectorXd& x) {
        return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
    };
    NelderMeadConfig cfg;
    cfg.restarts = 4;
    cfg.max_evals = 10000;
    cfg.tol_f = 1e-12;
    cfg.tol_x = 1e-10;
    const SimplexResult r = nelder_mead(f, 2, cfg, {Eigen::Vector2d(-1.2, 1.0)});
    EXPECT_LT(r.value, 1e-4);
}

TEST(NelderMead, DeterministicGivenSeed) {
    const Objective f = [](const Eigen::VectorXd& x) { return std::sin(3 * x[0]) * std::cos(2 * x[1]) + 0.1 * x.squaredNorm(); };
    NelderMeadConfig cfg;
    cfg.restarts = 3;
    cfg.max_evals = 2000;
    const auto a = nelder_mead(f, 2, cfg);
    const auto b = nelder_mead(f, 2, cfg);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.x, b.x);
}

TEST(Extremize, ResultIsAttainableAndBeatsScan) {
    const LatticeModel m = solve(8, 2);
    const StateVector s = sample_rpts(m.spectrum, 0.01, StateKind::complex, 1);
    for (auto kind : {EntropyKind::entanglement, EntropyKind::observational})
        for (auto dir : {Direction::minimize, Direction::maximize}) {
            const EntropyFunctional f(m, kind, 4);
            const auto r = extremize_entropy(s, m.spectrum, f, dir, quick());
            EXPECT_NEAR(f(apply_phases(s, r.phi_star).amps), r.value, 1e-9);
            if (dir == Direction::minimize) EXPECT_LE(r.value, r.scan_value + 1e-12);
            else EXPECT_GE(r.value, r.scan_value - 1e-12);
            EXPECT_EQ(r.phi_star[0], 0.0);
            // populations are untouched
            const StateVector best = apply_phases(s, r.phi_star);
            EXPECT_LE((best.amps.cwiseAbs() - s.amps.cwiseAbs()).cwiseAbs().maxCoeff(), 1e-12);
            EXPECT_NEAR(energy_expectation(best, m.spectrum), energy_expectation(s, m.spectrum), 1e-9);
        }
}

TEST(Extremize, MaxEntanglementRespectsBound) {
    const LatticeModel m = solve(8, 2);
    const StateVector s = sample_rpts(m.spectrum, 0.01, StateKind::complex, 2);
    const auto r = extremize_entropy(s, m, EntropyKind::entanglement, Direction::maximize, 4, quick());
    EXPECT_LE(r.value, max_entanglement_bound(8, 4, 2) + 1e-9);
    EXPECT_GT(r.value, 1.5);
}

TEST(Extremize, StagedPathForLargeDimensions) {
    const LatticeModel m = solve(10, 2);
    const StateVector s = sample_rpts(m.spectrum, 0.01, StateKind::complex, 3);
    ExtremizeOptions o = quick(1, 3000);
    o.staged_threshold = 20;
    o.staged_size = 10;
    const EntropyFunctional f(m, EntropyKind::entanglement, 3);
    const auto r = extremize_entropy(s, m.spectrum, f, Direction::minimize, o);
    EXPECT_LE(r.value, r.scan_value + 1e-12);
    EXPECT_NEAR(f(apply_phases(s, r.phi_star).amps), r.value, 1e-9);
}

TEST(Extremize, StartTimesAreUsed) {
    const LatticeModel m = solve(8, 2);
    const StateVector s = sample_rpts(m.spectrum, 0.01, StateKind::complex, 4);
    const EntropyFunctional f(m, EntropyKind::entanglement, 4);
    ExtremizeOptions o = quick(2, 10);
    o.scan_t_max = 0.0;
    o.start_times = {1234.5};
    const auto r = extremize_entropy(s, m.spectrum, f, Direction::minimize, o);
    EXPECT_LE(r.value, f(evolve(s, m.spectrum, 1234.5).amps) + 1e-12);
}

TEST(Extremize, ResultJson) {
    ExtremizationResult r;
    r.value = 1.5;
    r.phi_star = PhaseVector(3);
    r.wall_seconds = 2.0;
    const nlohmann::json j = r;
    EXPECT_EQ(j.at("phi_star").size(), 3u);
    EXPECT_EQ(j.at("wall_seconds").get<double>(), 2.0);
}

TEST(Localization, WindowDimensions) {
    const FockBasis b10(10, 3);
    const auto p = localization_projector(b10, centred_window_start(10, 5), 5);
    EXPECT_EQ(p.window.subspace_dim, 10u);
    EXPECT_EQ(p.window.full_dim, 120u);
    EXPECT_NEAR(p.window.dilution_ratio(), 1.2, 1e-12);
    EXPECT_FALSE(p.window.dilute());

    const FockBasis b30(30, 3);
    const auto q = localization_projector(b30, centred_window_start(30, 5), 5);
    EXPECT_EQ(q.window.subspace_dim, 10u);
    EXPECT_EQ(q.window.full_dim, 4060u);
    EXPECT_NEAR(q.window.dilution_ratio(), 40.6, 1e-12);
    EXPECT_TRUE(q.window.dilute());

    for (auto k : p.members) EXPECT_EQ(b10.config(static_cast<std::size_t>(k)) & ~site_mask(2, 5), 0u);
    EXPECT_THROW((void)localization_projector(b10, 0, 2), EmptySubspaceError);
}

TEST(Localization, StateInsideWindowHasUnitProbability) {
    const LatticeModel m = solve(8, 2);
    const auto proj = localization_projector(m.basis, 0, 4);
    Eigen::VectorXcd fock = Eigen::VectorXcd::Zero(m.spectrum.dim());
    fock[proj.members[0]] = std::sqrt(0.5);
    fock[proj.members[3]] = Complex(0, std::sqrt(0.5));
    StateVector s{to_energy_basis(fock, m.spectrum), 0.0, StateKind::other, 0};
    const auto r = maximize_localization(s, m.spectrum, proj);
    EXPECT_NEAR(r.value, 1.0, 1e-9);
}

TEST(Localization, AscentIsMonotoneAndResultAttainable) {
    const LatticeModel m = solve(12, 3);
    const auto proj = localization_projector(m.basis, centred_window_start(12, 5), 5);
    const StateVector s = sample_rpts(m.spectrum, 0.01, StateKind::complex, 6);
    const LocalizationProbability prob(m.spectrum, proj);
    Eigen::VectorXcd v = s.amps;
    Eigen::VectorXcd projected = prob.rows().cast<Complex>() * v;
    double p = projected.squaredNorm();
    for (int sweep = 0; sweep < 50; ++sweep) {
        const double next = phase_alignment_sweep(prob.rows(), v, projected);
        EXPECT_GE(next, p - 1e-12);
        EXPECT_NEAR(next, prob(v), 1e-10);
        p = next;
    }
    EXPECT_LE((v.cwiseAbs() - s.amps.cwiseAbs()).cwiseAbs().maxCoeff(), 1e-12);

    LocalizationOptions o;
    o.ascent_restarts = 2;
    o.polish.max_evals = 2000;
    const auto r = maximize_localization(s, m.spectrum, proj, o);
    EXPECT_NEAR(prob(apply_phases(s, r.phi_star).amps), r.value, 1e-9);
    EXPECT_GE(r.value, prob(s.amps));
    EXPECT_LE(r.value, 1.0);
}

TEST(Localization, SmallSystemBeatsDiluteLimit) {
    // L=10, N_p=3, window 5: N/M^2 = 1.2, far from dilute, so localization is easier
    PmaxSweepConfig cfg;
    cfg.sizes = {10};
    cfg.betas = {0.01};
    cfg.seeds = {1, 2, 3};
    cfg.kinds = {StateKind::real, StateKind::complex};
    const auto rows = pmax_beta_sweep(cfg);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_GT(rows[0].mean, 0.5 + 0.1);
    EXPECT_GT(rows[1].mean, std::numbers::pi * std::numbers::pi / 16 + 0.1);
}

TEST(Stats, MeanAndSampleStddev) {
    const auto [m, s] = mean_and_stddev({1.0, 2.0, 3.0, 4.0});
    EXPECT_DOUBLE_EQ(m, 2.5);
    EXPECT_NEAR(s, std::sqrt(5.0 / 3.0), 1e-15);
}
