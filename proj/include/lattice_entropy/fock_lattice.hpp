#pragma once

// Fixed-particle-number Fock basis for spinless fermions on an open chain,
// the extended Hubbard-type Hamiltonian with NN/NNN hopping and interaction,
// and the occupation-based observables built on top of the basis.
//
// Site i (0-based) is bit i of a configuration word. Basis states are
// f_0^{n_0} ... f_{L-1}^{n_{L-1}} |0> (creators applied right to left), so a
// hop between sites i < j picks up (-1)^{#occupied sites strictly between}.

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lattice_entropy/error.hpp"

namespace lattice_entropy {

using Config = std::uint32_t;
using OccupationLabel = std::vector<int>;

inline constexpr int kMaxSites = 32;

struct LatticeParams {
    int L = 16;
    int num_particles = 2;
    double t = 1.9;
    double t_prime = 1.9;
    double V = 0.5;
    double V_prime = 0.5;
    // Drops every hopping term that connects [0, cut_position) with
    // [cut_position, L). Interactions are kept.
    bool cut_hopping = false;
    int cut_position = 4;

    void validate() const {
        if (L < 1 || L > kMaxSites)
            throw ParameterError("L=" + std::to_string(L) + " outside [1, 32]");
        if (num_particles < 0 || num_particles > L)
            throw ParameterError("N_p=" + std::to_string(num_particles) + " outside [0, L=" +
                                 std::to_string(L) + "]");
        for (double c : {t, t_prime, V, V_prime})
            if (!std::isfinite(c)) throw ParameterError("non-finite coupling constant");
        if (cut_hopping && (cut_position <= 0 || cut_position >= L))
            throw ParameterError("cut_position must lie strictly inside the lattice");
    }

    friend bool operator==(const LatticeParams&, const LatticeParams&) = default;
};

// Exact binomial coefficient for the small arguments used here (n <= 64).
[[nodiscard]] constexpr std::uint64_t binomial(int n, int k) noexcept {
    if (k < 0 || n < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
}

[[nodiscard]] constexpr int popcount(Config c) noexcept { return std::popcount(c); }

[[nodiscard]] constexpr bool occupied(Config c, int site) noexcept { return (c >> site) & 1u; }

// Mask of bits [first, first + width).
[[nodiscard]] constexpr Config site_mask(int first, int width) noexcept {
    if (width <= 0) return 0;
    const std::uint64_t ones = (width >= 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
    return static_cast<Config>(ones << first);
}

// Gathers the bits of c selected by mask into the low bits, preserving order.
[[nodiscard]] constexpr Config extract_bits(Config c, Config mask) noexcept {
    Config out = 0;
    int k = 0;
    while (mask) {
        const int pos = std::countr_zero(mask);
        out |= static_cast<Config>((c >> pos) & 1u) << k;
        ++k;
        mask &= mask - 1;
    }
    return out;
}

// Rank of c among all words with the same popcount, in ascending numeric
// order (combinadic / colexicographic rank).
[[nodiscard]] constexpr std::uint64_t combinadic_rank(Config c) noexcept {
    std::uint64_t rank = 0;
    int j = 1;
    while (c) {
        rank += binomial(std::countr_zero(c), j);
        ++j;
        c &= c - 1;
    }
    return rank;
}

// Sign of f_to^dagger f_from acting on c (from occupied, to empty).
[[nodiscard]] constexpr int hop_sign(Config c, int from, int to) noexcept {
    const int lo = std::min(from, to);
    const int hi = std::max(from, to);
    const Config between = site_mask(lo + 1, hi - lo - 1);
    return (std::popcount(c & between) & 1) ? -1 : 1;
}

class FockBasis {
public:
    FockBasis() = default;

    FockBasis(int L, int num_particles) : L_(L), num_particles_(num_particles) {
        if (L < 1 || L > kMaxSites) throw ParameterError("L outside [1, 32]");
        if (num_particles < 0 || num_particles > L) throw ParameterError("N_p outside [0, L]");
        const auto dim = binomial(L, num_particles);
        configs_.reserve(dim);
        if (num_particles == 0) {
            configs_.push_back(0);
            return;
        }
        // Gosper's hack walks fixed-popcount words in ascending order.
        std::uint64_t c = (std::uint64_t{1} << num_particles) - 1;
        const std::uint64_t limit = std::uint64_t{1} << L;
        while (c < limit) {
            configs_.push_back(static_cast<Config>(c));
            const std::uint64_t lowest = c & (~c + 1);
            const std::uint64_t ripple = c + lowest;
            c = (((ripple ^ c) >> 2) / lowest) | ripple;
        }
    }

    [[nodiscard]] int sites() const noexcept { return L_; }
    [[nodiscard]] int particles() const noexcept { return num_particles_; }
    [[nodiscard]] std::size_t dim() const noexcept { return configs_.size(); }
    [[nodiscard]] Config config(std::size_t index) const { return configs_.at(index); }
    [[nodiscard]] std::span<const Config> configs() const noexcept { return configs_; }

    // Inverse of config(); configs outside the basis yield npos.
    [[nodiscard]] std::size_t index_of(Config c) const noexcept {
        if (L_ < kMaxSites && (c >> L_) != 0) return npos;
        if (popcount(c) != num_particles_) return npos;
        return static_cast<std::size_t>(combinadic_rank(c));
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    int L_ = 0;
    int num_particles_ = 0;
    std::vector<Config> configs_;
};

[[nodiscard]] inline FockBasis enumerate_basis(const LatticeParams& params) {
    params.validate();
    if (params.num_particles < 1) throw ParameterError("N_p must be at least 1");
    return FockBasis(params.L, params.num_particles);
}

// Diagonal (interaction) energy of a single configuration.
[[nodiscard]] inline double interaction_energy(const LatticeParams& p, Config c) {
    double e = 0.0;
    for (int i = 0; i + 1 < p.L; ++i)
        if (occupied(c, i) && occupied(c, i + 1)) e += p.V;
    for (int i = 0; i + 2 < p.L; ++i)
        if (occupied(c, i) && occupied(c, i + 2)) e += p.V_prime;
    return e;
}

[[nodiscard]] inline Eigen::MatrixXd build_hamiltonian(const LatticeParams& params, const FockBasis& basis) {
    params.validate();
    if (basis.sites() != params.L || basis.particles() != params.num_particles)
        throw DimensionError("basis does not match lattice parameters");

    const auto dim = static_cast<Eigen::Index>(basis.dim());
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
    const auto crosses_cut = [&](int a, int b) {
        return params.cut_hopping && ((a < params.cut_position) != (b < params.cut_position));
    };

    for (Eigen::Index col = 0; col < dim; ++col) {
        const Config c = basis.config(static_cast<std::size_t>(col));
        H(col, col) = interaction_energy(params, c);
        for (int range = 1; range <= 2; ++range) {
            const double amplitude = (range == 1) ? params.t : params.t_prime;
            for (int i = 0; i + range < params.L; ++i) {
                const int j = i + range;
                if (occupied(c, i) == occupied(c, j) || crosses_cut(i, j)) continue;
                const int from = occupied(c, i) ? i : j;
                const int to = occupied(c, i) ? j : i;
                const Config target = c ^ (Config{1} << i) ^ (Config{1} << j);
                const auto row = static_cast<Eigen::Index>(basis.index_of(target));
                H(row, col) = -amplitude * hop_sign(c, from, to);
            }
        }
    }
    return H;
}

// <n_i> for a state given by its amplitudes in the Fock basis.
[[nodiscard]] inline std::vector<double> particle_density(const Eigen::VectorXcd& amps, const FockBasis& basis,
                                                          double norm_tolerance = 1e-10) {
    if (static_cast<std::size_t>(amps.size()) != basis.dim())
        throw DimensionError("amplitude vector length differs from basis dimension");
    if (std::abs(amps.squaredNorm() - 1.0) > norm_tolerance)
        throw NormalizationError("state is not normalized (|psi|^2 = " + std::to_string(amps.squaredNorm()) + ")");
    std::vector<double> density(static_cast<std::size_t>(basis.sites()), 0.0);
    for (std::size_t k = 0; k < basis.dim(); ++k) {
        const double w = std::norm(amps[static_cast<Eigen::Index>(k)]);
        Config c = basis.config(k);
        while (c) {
            density[static_cast<std::size_t>(std::countr_zero(c))] += w;
            c &= c - 1;
        }
    }
    return density;
}

// Contiguous, non-overlapping regions covering the chain.
struct RegionPartition {
    std::vector<int> region_of_site;
    std::vector<int> region_sizes;

    [[nodiscard]] int num_regions() const noexcept { return static_cast<int>(region_sizes.size()); }
    [[nodiscard]] int sites() const noexcept { return static_cast<int>(region_of_site.size()); }
};

// m = L / width equal regions of `width` sites.
[[nodiscard]] inline RegionPartition make_uniform_partition(int L, int width) {
    if (width < 1 || L < 1 || L % width != 0)
        throw ParameterError("region width " + std::to_string(width) + " does not divide L=" + std::to_string(L));
    RegionPartition p;
    p.region_of_site.resize(static_cast<std::size_t>(L));
    for (int i = 0; i < L; ++i) p.region_of_site[static_cast<std::size_t>(i)] = i / width;
    p.region_sizes.assign(static_cast<std::size_t>(L / width), width);
    return p;
}

[[nodiscard]] inline OccupationLabel occupation_label(Config c, const RegionPartition& partition) {
    OccupationLabel label(static_cast<std::size_t>(partition.num_regions()), 0);
    while (c) {
        const int site = std::countr_zero(c);
        ++label[static_cast<std::size_t>(partition.region_of_site[static_cast<std::size_t>(site)])];
        c &= c - 1;
    }
    return label;
}

[[nodiscard]] inline std::vector<OccupationLabel> region_occupations(const FockBasis& basis,
                                                                     const RegionPartition& partition) {
    if (partition.sites() != basis.sites()) throw DimensionError("partition does not cover the lattice");
    std::vector<OccupationLabel> labels;
    labels.reserve(basis.dim());
    for (Config c : basis.configs()) labels.push_back(occupation_label(c, partition));
    return labels;
}

// Number of Fock configurations carrying `label`: prod_j C(size_j, n_j).
[[nodiscard]] inline std::uint64_t macrostate_volume(const FockBasis& basis, const RegionPartition& partition,
                                                     const OccupationLabel& label) {
    if (partition.sites() != basis.sites()) throw DimensionError("partition does not cover the lattice");
    if (static_cast<int>(label.size()) != partition.num_regions())
        throw ParameterError("label length differs from region count");
    int total = 0;
    std::uint64_t omega = 1;
    for (std::size_t j = 0; j < label.size(); ++j) {
        if (label[j] < 0 || label[j] > partition.region_sizes[j]) throw ParameterError("invalid occupation label");
        total += label[j];
        omega *= binomial(partition.region_sizes[j], label[j]);
    }
    if (total != basis.particles()) throw ParameterError("label does not sum to N_p");
    return omega;
}

[[nodiscard]] inline std::string label_to_string(const OccupationLabel& label) {
    std::string s = "(";
    for (std::size_t j = 0; j < label.size(); ++j) {
        if (j) s += ',';
        s += std::to_string(label[j]);
    }
    return s + ")";
}

}  // namespace lattice_entropy
