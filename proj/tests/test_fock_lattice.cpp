#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "lattice_entropy/fock_lattice.hpp"
#include "lattice_entropy/spectral.hpp"

using namespace lattice_entropy;

namespace {

LatticeParams params(int L, int np) {
    LatticeParams p;
    p.L = L;
    p.num_particles = np;
    return p;
}

// Bit pattern from a string like "1001 0000", leftmost character = site 0.
Config bits(std::string_view s) {
    Config c = 0;
    int site = 0;
    for (char ch : s) {
        if (ch == ' ') continue;
        if (ch == '1') c |= Config{1} << site;
        ++site;
    }
    return c;
}

// Sign of f_to^dag f_from |c> computed by moving operators through the
// creator string one by one (canonical order f_0^dag f_1^dag ... |0>).
int brute_force_hop_sign(Config c, int from, int to) {
    int sign = 1;
    // annihilate at `from`: pass all creators left of it
    for (int i = 0; i < from; ++i)
        if (occupied(c, i)) sign = -sign;
    c &= ~(Config{1} << from);
    for (int i = 0; i < to; ++i)
        if (occupied(c, i)) sign = -sign;
    return sign;
}

}  // namespace

TEST(Enumeration, DimensionsMatchBinomials) {
    EXPECT_EQ(enumerate_basis(params(4, 2)).dim(), 6u);
    EXPECT_EQ(enumerate_basis(params(16, 2)).dim(), 120u);
    EXPECT_EQ(enumerate_basis(params(20, 3)).dim(), 1140u);
    EXPECT_EQ(enumerate_basis(params(30, 3)).dim(), 4060u);
}

TEST(Enumeration, AscendingAndIndexMapIsBijection) {
    for (auto [L, np] : {std::pair{6, 3}, {10, 2}, {12, 5}, {32, 1}}) {
        const FockBasis basis = enumerate_basis(params(L, np));
        ASSERT_EQ(basis.dim(), binomial(L, np));
        for (std::size_t k = 0; k < basis.dim(); ++k) {
            EXPECT_EQ(popcount(basis.config(k)), np);
            if (k > 0) {
                EXPECT_LT(basis.config(k - 1), basis.config(k));
            }
            EXPECT_EQ(basis.index_of(basis.config(k)), k);
        }
    }
}

TEST(Enumeration, IndexOfRejectsForeignConfigs) {
    const FockBasis basis = enumerate_basis(params(6, 2));
    EXPECT_EQ(basis.index_of(bits("111000")), FockBasis::npos);
    EXPECT_EQ(basis.index_of(Config{1} << 7 | 1u), FockBasis::npos);
}

TEST(Enumeration, RejectsOutOfRangeParameters) {
    EXPECT_THROW((void)enumerate_basis(params(4, 5)), ParameterError);
    EXPECT_THROW((void)enumerate_basis(params(33, 2)), ParameterError);
    EXPECT_THROW((void)enumerate_basis(params(4, 0)), ParameterError);
}

TEST(Hamiltonian, SingleHop) {
    auto p = params(2, 1);
    const Eigen::MatrixXd H = build_hamiltonian(p, enumerate_basis(p));
    Eigen::Matrix2d expected;
    expected << 0, -1.9, -1.9, 0;
    EXPECT_TRUE(H.isApprox(expected, 0.0));
    const Spectrum s = diagonalize(H);
    EXPECT_NEAR(s.energies[0], -1.9, 1e-12);
    EXPECT_NEAR(s.energies[1], 1.9, 1e-12);
}

TEST(Hamiltonian, FullLatticeIsInteractionOnly) {
    auto p = params(2, 2);
    const Eigen::MatrixXd H = build_hamiltonian(p, enumerate_basis(p));
    ASSERT_EQ(H.rows(), 1);
    EXPECT_DOUBLE_EQ(H(0, 0), 0.5);
}

TEST(Hamiltonian, ThreeSiteCompleteGraph) {
    // With t = t' every pair of the three sites is connected: -1.9 times the
    // adjacency of the triangle, whose spectrum is {2, -1, -1}.
    auto p = params(3, 1);
    const Eigen::MatrixXd H = build_hamiltonian(p, enumerate_basis(p));
    Eigen::Matrix3d adjacency;
    adjacency << 0, 1, 1, 1, 0, 1, 1, 1, 0;
    EXPECT_TRUE(H.isApprox(-1.9 * adjacency, 0.0));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> oracle(-1.9 * adjacency);
    const Spectrum s = diagonalize(H);
    EXPECT_NEAR(s.energies[0], -3.8, 1e-12);
    EXPECT_NEAR(s.energies[1], 1.9, 1e-12);
    EXPECT_NEAR(s.energies[2], 1.9, 1e-12);
    EXPECT_TRUE(s.energies.isApprox(oracle.eigenvalues(), 1e-12));
}

TEST(Hamiltonian, DiagonalIsInteractionEnergy) {
    auto p = params(6, 3);
    const FockBasis basis = enumerate_basis(p);
    const Eigen::MatrixXd H = build_hamiltonian(p, basis);
    for (std::size_t k = 0; k < basis.dim(); ++k) {
        const Config c = basis.config(k);
        double e = 0.0;
        for (int i = 0; i < 6; ++i)
            for (int j = i + 1; j < 6; ++j)
                if (occupied(c, i) && occupied(c, j)) e += (j - i == 1) ? 0.5 : (j - i == 2 ? 0.5 : 0.0);
        EXPECT_DOUBLE_EQ(H(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)), e);
    }
}

TEST(Hamiltonian, SymmetricLocalAndSigned) {
    LatticeParams p = params(8, 3);
    p.t = 1.3;
    p.t_prime = 0.7;
    const FockBasis basis = enumerate_basis(p);
    const Eigen::MatrixXd H = build_hamiltonian(p, basis);
    EXPECT_EQ((H - H.transpose()).cwiseAbs().maxCoeff(), 0.0);
    for (Eigen::Index a = 0; a < H.rows(); ++a)
        for (Eigen::Index b = 0; b < H.cols(); ++b) {
            if (a == b || H(a, b) == 0.0) continue;
            const Config ca = basis.config(static_cast<std::size_t>(a));
            const Config cb = basis.config(static_cast<std::size_t>(b));
            const Config diff = ca ^ cb;
            ASSERT_EQ(std::popcount(diff), 2);
            const int lo = std::countr_zero(diff);
            const int hi = 31 - std::countl_zero(diff);
            ASSERT_TRUE(hi - lo == 1 || hi - lo == 2);
            const int from = occupied(cb, lo) ? lo : hi;
            const int to = occupied(cb, lo) ? hi : lo;
            const double amp = hi - lo == 1 ? p.t : p.t_prime;
            EXPECT_DOUBLE_EQ(H(a, b), -amp * brute_force_hop_sign(cb, from, to));
        }
}

TEST(Hamiltonian, HopSignMatchesOperatorAlgebra) {
    for (Config c = 0; c < (1u << 8); ++c)
        for (int from = 0; from < 8; ++from)
            for (int to = 0; to < 8; ++to) {
                if (from == to || !occupied(c, from) || occupied(c, to)) continue;
                EXPECT_EQ(hop_sign(c, from, to), brute_force_hop_sign(c, from, to));
            }
}

TEST(Hamiltonian, CutHoppingRemovesCrossingTerms) {
    LatticeParams p = params(8, 2);
    p.cut_hopping = true;
    p.cut_position = 4;
    const FockBasis basis = enumerate_basis(p);
    const Eigen::MatrixXd H = build_hamiltonian(p, basis);
    const Config left = site_mask(0, 4);
    for (Eigen::Index a = 0; a < H.rows(); ++a)
        for (Eigen::Index b = 0; b < H.cols(); ++b)
            if (a != b && H(a, b) != 0.0) {
                EXPECT_EQ(popcount(basis.config(static_cast<std::size_t>(a)) & left),
                          popcount(basis.config(static_cast<std::size_t>(b)) & left));
            }
}

TEST(Density, BasisStateAndSuperposition) {
    const FockBasis basis(4, 2);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(6);
    psi[static_cast<Eigen::Index>(basis.index_of(bits("1100")))] = 1.0;
    const auto d = particle_density(psi, basis);
    EXPECT_EQ(d, (std::vector<double>{1, 1, 0, 0}));

    const FockBasis two(2, 1);
    Eigen::VectorXcd bell(2);
    bell << std::sqrt(0.5), std::complex<double>(0, std::sqrt(0.5));
    const auto db = particle_density(bell, two);
    EXPECT_NEAR(db[0], 0.5, 1e-15);
    EXPECT_NEAR(db[1], 0.5, 1e-15);
}

TEST(Density, RejectsUnnormalized) {
    const FockBasis basis(4, 2);
    EXPECT_THROW((void)particle_density(Eigen::VectorXcd::Ones(6), basis), NormalizationError);
}

TEST(Regions, LabelsOfExampleConfigs) {
    const auto part = make_uniform_partition(8, 4);
    EXPECT_EQ(occupation_label(bits("1001 0000"), part), (OccupationLabel{2, 0}));
    EXPECT_EQ(occupation_label(bits("1000 0001"), part), (OccupationLabel{1, 1}));
    EXPECT_EQ(label_to_string({2, 0}), "(2,0)");
}

TEST(Regions, LabelCountsMatchVolumes) {
    const FockBasis basis(8, 2);
    const auto part = make_uniform_partition(8, 4);
    std::map<OccupationLabel, std::uint64_t> counts;
    for (const auto& l : region_occupations(basis, part)) {
        EXPECT_EQ(std::accumulate(l.begin(), l.end(), 0), 2);
        ++counts[l];
    }
    EXPECT_EQ(counts[(OccupationLabel{2, 0})], 6u);
    for (const auto& [label, n] : counts) EXPECT_EQ(macrostate_volume(basis, part, label), n);
}

TEST(Regions, VolumeExamplesAndCompleteness) {
    const FockBasis basis(16, 2);
    const auto part = make_uniform_partition(16, 4);
    EXPECT_EQ(macrostate_volume(basis, part, {2, 0, 0, 0}), 6u);
    EXPECT_EQ(macrostate_volume(basis, part, {1, 1, 0, 0}), 16u);
    std::set<OccupationLabel> labels;
    for (const auto& l : region_occupations(basis, part)) labels.insert(l);
    std::uint64_t total = 0;
    for (const auto& l : labels) total += macrostate_volume(basis, part, l);
    EXPECT_EQ(total, 120u);
    EXPECT_THROW((void)macrostate_volume(basis, part, {1, 0, 0, 0}), ParameterError);
    EXPECT_THROW((void)make_uniform_partition(10, 4), ParameterError);
}
