#pragma once

// Entanglement entropy of a contiguous block, the observational-entropy
// engine over ordered coarse-grainings, its position-then-energy
// specialization, and closed-form bounds/predictions.

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lattice_entropy/error.hpp"
#include "lattice_entropy/fock_lattice.hpp"
#include "lattice_entropy/spectral.hpp"
#include "lattice_entropy/states.hpp"

namespace lattice_entropy {

inline constexpr double kProbabilityFloor = 1e-14;

// ===========================================================================
// Bipartite entanglement
// ===========================================================================

/// Index bookkeeping for splitting every configuration into a block
/// [offset, offset + width) and its complement. Sector n holds the
/// configurations with n particles in the block; within a sector block states
/// and complement states are ranked in ascending bit-pattern order.
class Bipartition {
public:
    Bipartition(const FockBasis& basis, int width, int offset = 0)
        : width_(width), offset_(offset), sites_(basis.sites()), particles_(basis.particles()) {
        if (width < 1 || offset < 0 || offset + width > basis.sites() || width >= basis.sites())
            throw ParameterError("block [" + std::to_string(offset) + ", " + std::to_string(offset + width) +
                                 ") must be a proper sub-block of the lattice");
        const Config block = site_mask(offset, width);
        const Config left = site_mask(0, offset);
        const Config rest = site_mask(0, basis.sites()) & ~block;
        const int sectors = std::min(particles_, width) + 1;
        rows_.resize(static_cast<std::size_t>(sectors));
        cols_.resize(static_cast<std::size_t>(sectors));
        for (int n = 0; n < sectors; ++n) {
            rows_[static_cast<std::size_t>(n)] = static_cast<Eigen::Index>(binomial(width, n));
            cols_[static_cast<std::size_t>(n)] = static_cast<Eigen::Index>(binomial(sites_ - width, particles_ - n));
        }
        entries_.reserve(basis.dim());
        for (Config c : basis.configs()) {
            const Config a = extract_bits(c, block);
            const Config b = extract_bits(c, rest);
            const int n = popcount(a);
            // Reordering the block creators in front of the left complement
            // creators costs (-1)^{n_block * n_left}.
            const int sign = ((n * popcount(c & left)) & 1) ? -1 : 1;
            entries_.push_back(Entry{n, static_cast<Eigen::Index>(combinadic_rank(a)),
                                     static_cast<Eigen::Index>(combinadic_rank(b)), sign});
        }
    }

    struct Entry {
        int sector;
        Eigen::Index row;
        Eigen::Index col;
        int sign;
    };

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int offset() const noexcept { return offset_; }
    [[nodiscard]] int sectors() const noexcept { return static_cast<int>(rows_.size()); }
    [[nodiscard]] Eigen::Index sector_rows(int n) const { return rows_.at(static_cast<std::size_t>(n)); }
    [[nodiscard]] Eigen::Index sector_cols(int n) const { return cols_.at(static_cast<std::size_t>(n)); }
    [[nodiscard]] std::span<const Entry> entries() const noexcept { return entries_; }

    /// Dimension of the block Fock space: sum_n C(width, n).
    [[nodiscard]] Eigen::Index block_dim() const {
        Eigen::Index d = 0;
        for (auto r : rows_) d += r;
        return d;
    }

    /// Schmidt coefficient matrices psi_n(a, b), one per sector.
    [[nodiscard]] std::vector<Eigen::MatrixXcd> coefficient_matrices(const Eigen::VectorXcd& fock) const {
        if (static_cast<std::size_t>(fock.size()) != entries_.size())
            throw DimensionError("amplitude vector length differs from basis dimension");
        std::vector<Eigen::MatrixXcd> m;
        m.reserve(rows_.size());
        for (std::size_t n = 0; n < rows_.size(); ++n) m.emplace_back(Eigen::MatrixXcd::Zero(rows_[n], cols_[n]));
        for (std::size_t k = 0; k < entries_.size(); ++k) {
            const Entry& e = entries_[k];
            m[static_cast<std::size_t>(e.sector)](e.row, e.col) =
                static_cast<double>(e.sign) * fock[static_cast<Eigen::Index>(k)];
        }
        return m;
    }

private:
    int width_;
    int offset_;
    int sites_;
    int particles_;
    std::vector<Eigen::Index> rows_;
    std::vector<Eigen::Index> cols_;
    std::vector<Entry> entries_;
};

/// Reduced state of a block, stored by particle-number sector.
struct ReducedDensityMatrix {
    int width = 0;
    int offset = 0;
    std::vector<Eigen::MatrixXcd> blocks;  // blocks[n]: C(width, n) square

    [[nodiscard]] Eigen::Index dim() const {
        Eigen::Index d = 0;
        for (const auto& b : blocks) d += b.rows();
        return d;
    }

    [[nodiscard]] double trace() const {
        double tr = 0.0;
        for (const auto& b : blocks) tr += b.trace().real();
        return tr;
    }

    /// Full matrix over the block Fock space ordered by sector, then bit pattern.
    [[nodiscard]] Eigen::MatrixXcd dense() const {
        Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim(), dim());
        Eigen::Index at = 0;
        for (const auto& b : blocks) {
            rho.block(at, at, b.rows(), b.cols()) = b;
            at += b.rows();
        }
        return rho;
    }
};

namespace detail {

inline void check_normalized(const Eigen::VectorXcd& v, double tol = 1e-10) {
    if (std::abs(v.squaredNorm() - 1.0) > tol)
        throw NormalizationError("state is not normalized (|psi|^2 = " + std::to_string(v.squaredNorm()) + ")");
}

// -sum lambda ln lambda over lambda > floor; rejects clearly negative spectra.
inline double von_neumann_from_eigenvalues(const Eigen::VectorXd& lambda) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
        const double l = lambda[k];
        if (l < -1e-10) throw ConsistencyError("density matrix has eigenvalue " + std::to_string(l));
        if (l > kProbabilityFloor) s -= l * std::log(l);
    }
    return s;
}

inline Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& m) {
    if (m.rows() == 0) return {};
    if (m.rows() == 1) return Eigen::VectorXd::Constant(1, m(0, 0).real());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw ConvergenceError("Hermitian eigensolver failed");
    return solver.eigenvalues();
}

// Nonzero spectrum of M M^dagger through the smaller Gram matrix.
inline Eigen::VectorXd gram_eigenvalues(const Eigen::MatrixXcd& m) {
    if (m.size() == 0) return {};
    if (m.rows() == 1 || m.cols() == 1) return Eigen::VectorXd::Constant(1, m.squaredNorm());
    if (m.rows() <= m.cols()) return hermitian_eigenvalues(m * m.adjoint());
    return hermitian_eigenvalues(m.adjoint() * m);
}

}  // namespace detail

[[nodiscard]] inline ReducedDensityMatrix reduced_density_matrix(const Eigen::VectorXcd& fock, const Bipartition& cut) {
    detail::check_normalized(fock);
    ReducedDensityMatrix rho{cut.width(), cut.offset(), {}};
    for (auto& m : cut.coefficient_matrices(fock)) rho.blocks.emplace_back(m * m.adjoint());
    return rho;
}

[[nodiscard]] inline ReducedDensityMatrix reduced_density_matrix(const Eigen::VectorXcd& fock, const FockBasis& basis,
                                                                 int width, int offset = 0) {
    return reduced_density_matrix(fock, Bipartition(basis, width, offset));
}

[[nodiscard]] inline double entanglement_entropy(const Eigen::MatrixXcd& rho) {
    return detail::von_neumann_from_eigenvalues(detail::hermitian_eigenvalues(rho));
}

[[nodiscard]] inline double entanglement_entropy(const ReducedDensityMatrix& rho) {
    double s = 0.0;
    for (const auto& b : rho.blocks) s += detail::von_neumann_from_eigenvalues(detail::hermitian_eigenvalues(b));
    return s;
}

/// Entanglement entropy straight from Fock amplitudes, reusing one Bipartition.
[[nodiscard]] inline double entanglement_entropy(const Eigen::VectorXcd& fock, const Bipartition& cut) {
    double s = 0.0;
    for (const auto& m : cut.coefficient_matrices(fock)) s += detail::von_neumann_from_eigenvalues(detail::gram_eigenvalues(m));
    return s;
}

/// Probability of finding n particles in the block, n = 0..sectors-1.
[[nodiscard]] inline std::vector<double> block_occupation_distribution(const Eigen::VectorXcd& fock,
                                                                       const Bipartition& cut) {
    std::vector<double> p(static_cast<std::size_t>(cut.sectors()), 0.0);
    const auto entries = cut.entries();
    for (std::size_t k = 0; k < entries.size(); ++k)
        p[static_cast<std::size_t>(entries[k].sector)] += std::norm(fock[static_cast<Eigen::Index>(k)]);
    return p;
}

// ===========================================================================
// Observational entropy
// ===========================================================================

enum class BasisDomain { fock, energy };

struct Macrostate {
    std::string label;
    std::vector<Eigen::Index> members;
};

/// Trace-preserving family of orthogonal projectors, each diagonal in the
/// basis named by `domain`.
struct CoarseGraining {
    BasisDomain domain = BasisDomain::fock;
    std::vector<Macrostate> macrostates;
    double degeneracy_tolerance = 0.0;  // energy domain only

    void validate(Eigen::Index dim) const {
        std::vector<char> seen(static_cast<std::size_t>(dim), 0);
        for (const auto& m : macrostates) {
            if (m.members.empty()) throw ParameterError("macrostate '" + m.label + "' is empty");
            for (auto i : m.members) {
                if (i < 0 || i >= dim) throw ParameterError("macrostate member out of range");
                if (seen[static_cast<std::size_t>(i)]++) throw ParameterError("macrostates overlap");
            }
        }
        if (std::find(seen.begin(), seen.end(), 0) != seen.end())
            throw ParameterError("coarse-graining is not trace-preserving");
    }
};

struct EntropyTerm {
    std::string label;
    double p = 0.0;
    double volume = 0.0;
};

struct EntropyBreakdown {
    double total = 0.0;
    std::vector<EntropyTerm> terms;
};

inline void to_json(nlohmann::json& j, const EntropyBreakdown& b) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : b.terms) terms.push_back({{"label", t.label}, {"p", t.p}, {"V", t.volume}});
    j = nlohmann::json{{"total", b.total}, {"terms", std::move(terms)}};
}

[[nodiscard]] inline CoarseGraining identity_coarse_graining(Eigen::Index dim, BasisDomain domain) {
    Macrostate all{"all", {}};
    for (Eigen::Index i = 0; i < dim; ++i) all.members.push_back(i);
    return CoarseGraining{domain, {std::move(all)}, 0.0};
}

[[nodiscard]] inline CoarseGraining fine_coarse_graining(Eigen::Index dim, BasisDomain domain) {
    CoarseGraining cg{domain, {}, 0.0};
    for (Eigen::Index i = 0; i < dim; ++i) cg.macrostates.push_back({"#" + std::to_string(i), {i}});
    return cg;
}

/// Region-occupation macrostates in the Fock basis, labels in lexicographic order.
[[nodiscard]] inline CoarseGraining position_coarse_graining(const FockBasis& basis, const RegionPartition& partition) {
    std::map<OccupationLabel, std::vector<Eigen::Index>> groups;
    const auto labels = region_occupations(basis, partition);
    for (std::size_t k = 0; k < labels.size(); ++k) groups[labels[k]].push_back(static_cast<Eigen::Index>(k));
    CoarseGraining cg{BasisDomain::fock, {}, 0.0};
    for (auto& [label, members] : groups) cg.macrostates.push_back({label_to_string(label), std::move(members)});
    return cg;
}

/// Consecutive eigenvalues closer than `relative_tolerance * max|E|` share a macrostate.
[[nodiscard]] inline std::vector<std::pair<Eigen::Index, Eigen::Index>> degenerate_groups(
    const Eigen::VectorXd& energies, double relative_tolerance = 1e-9) {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> groups;
    if (energies.size() == 0) return groups;
    const double eps = relative_tolerance * std::max(energies.cwiseAbs().maxCoeff(), 1e-300);
    Eigen::Index start = 0;
    for (Eigen::Index k = 1; k <= energies.size(); ++k) {
        if (k == energies.size() || energies[k] - energies[k - 1] > eps) {
            groups.emplace_back(start, k);
            start = k;
        }
    }
    return groups;
}

[[nodiscard]] inline CoarseGraining energy_coarse_graining(const Spectrum& spec, double relative_tolerance = 1e-9) {
    CoarseGraining cg{BasisDomain::energy, {}, relative_tolerance};
    for (const auto& [begin, end] : degenerate_groups(spec.energies, relative_tolerance)) {
        Macrostate m{"E" + std::to_string(cg.macrostates.size()), {}};
        for (auto k = begin; k < end; ++k) m.members.push_back(k);
        cg.macrostates.push_back(std::move(m));
    }
    return cg;
}

namespace detail {

// A macrostate projector expressed in the basis the state lives in: either a
// coordinate mask or B B^T with orthonormal real columns B.
class Projector {
public:
    Projector(const Macrostate& m, BasisDomain cg_domain, BasisDomain state_domain, const Eigen::MatrixXd* fock_from_energy,
              Eigen::Index dim)
        : members_(m.members), dim_(dim) {
        if (cg_domain == state_domain) return;
        if (fock_from_energy == nullptr)
            throw DomainError("coarse-graining and state live in different bases and no basis change was supplied");
        const Eigen::MatrixXd& U = *fock_from_energy;
        if (U.rows() != dim || U.cols() != dim) throw DimensionError("basis-change matrix has wrong shape");
        columns_.resize(dim, static_cast<Eigen::Index>(members_.size()));
        for (std::size_t j = 0; j < members_.size(); ++j) {
            const auto i = members_[j];
            if (state_domain == BasisDomain::fock)
                columns_.col(static_cast<Eigen::Index>(j)) = U.col(i);  // energy eigenvector in Fock basis
            else
                columns_.col(static_cast<Eigen::Index>(j)) = U.row(i).transpose();  // Fock vector in energy basis
        }
        dense_ = true;
    }

    [[nodiscard]] Eigen::MatrixXcd apply(const Eigen::MatrixXcd& x) const {
        if (dense_) return columns_.cast<Complex>() * (columns_.transpose().cast<Complex>() * x);
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(x.rows(), x.cols());
        for (auto i : members_) out.row(i) = x.row(i);
        return out;
    }

    // Orthonormal basis of the range, as columns.
    [[nodiscard]] Eigen::MatrixXcd range_basis() const {
        if (dense_) return columns_.cast<Complex>();
        Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(dim_, static_cast<Eigen::Index>(members_.size()));
        for (std::size_t j = 0; j < members_.size(); ++j) b(members_[j], static_cast<Eigen::Index>(j)) = 1.0;
        return b;
    }

private:
    std::vector<Eigen::Index> members_;
    Eigen::Index dim_;
    Eigen::MatrixXd columns_;
    bool dense_ = false;
};

struct EngineInput {
    std::vector<std::vector<Projector>> levels;
    std::vector<std::vector<std::string>> labels;
};

inline EngineInput prepare_engine(std::span<const CoarseGraining> cgs, BasisDomain state_domain,
                                  const Eigen::MatrixXd* fock_from_energy, Eigen::Index dim) {
    if (cgs.empty()) throw ParameterError("at least one coarse-graining is required");
    EngineInput in;
    for (const auto& cg : cgs) {
        cg.validate(dim);
        std::vector<Projector> level;
        std::vector<std::string> names;
        for (const auto& m : cg.macrostates) {
            level.emplace_back(m, cg.domain, state_domain, fock_from_energy, dim);
            names.push_back(m.label);
        }
        in.levels.push_back(std::move(level));
        in.labels.push_back(std::move(names));
    }
    return in;
}

// V_i = || P_{i1} P_{i2} ... P_{in} ||_F^2.
inline double multi_volume(const EngineInput& in, const std::vector<std::size_t>& index) {
    const std::size_t n = index.size();
    Eigen::MatrixXcd w = in.levels[n - 1][index[n - 1]].range_basis();
    for (std::size_t l = n - 1; l-- > 0;) w = in.levels[l][index[l]].apply(w);
    return w.squaredNorm();
}

inline EntropyBreakdown finish(std::vector<EntropyTerm> terms) {
    EntropyBreakdown out;
    for (const auto& t : terms) {
        if (t.p > 1e-12 && t.volume < 1e-12)
            throw ConsistencyError("macrostate '" + t.label + "' has probability " + std::to_string(t.p) +
                                   " but zero volume");
        if (t.p >= kProbabilityFloor) out.total -= t.p * std::log(t.p / t.volume);
    }
    out.terms = std::move(terms);
    return out;
}

// Walks every multi-index depth-first; `state` is the partially projected
// object (vector or density matrix) and `project` applies one projector.
template <typename State, typename Project, typename Probability>
void walk(const EngineInput& in, std::size_t level, const State& state, std::vector<std::size_t>& index,
          std::string label, const Project& project, const Probability& probability, std::vector<EntropyTerm>& out) {
    for (std::size_t i = 0; i < in.levels[level].size(); ++i) {
        index.push_back(i);
        const State next = project(in.levels[level][i], state);
        std::string name = label.empty() ? in.labels[level][i] : label + "|" + in.labels[level][i];
        if (level + 1 == in.levels.size())
            out.push_back({std::move(name), probability(next), multi_volume(in, index)});
        else
            walk(in, level + 1, next, index, std::move(name), project, probability, out);
        index.pop_back();
    }
}

}  // namespace detail

/// S_O(C_1, ..., C_n) of a pure state, coarse-grainings applied in list order.
/// `fock_from_energy` (eigenvectors as columns) is needed whenever a
/// coarse-graining's domain differs from the state's.
[[nodiscard]] inline EntropyBreakdown observational_entropy(const Eigen::VectorXcd& amps, BasisDomain state_domain,
                                                            std::span<const CoarseGraining> cgs,
                                                            const Eigen::MatrixXd* fock_from_energy = nullptr) {
    detail::check_normalized(amps, 1e-9);
    const auto in = detail::prepare_engine(cgs, state_domain, fock_from_energy, amps.size());
    std::vector<EntropyTerm> terms;
    std::vector<std::size_t> index;
    const Eigen::MatrixXcd psi = amps;
    detail::walk(
        in, 0, psi, index, "", [](const detail::Projector& p, const Eigen::MatrixXcd& v) { return p.apply(v); },
        [](const Eigen::MatrixXcd& v) { return v.squaredNorm(); }, terms);
    return detail::finish(std::move(terms));
}

/// Mixed-state path: p_i = tr[P_in ... P_i1 rho P_i1 ... P_in].
[[nodiscard]] inline EntropyBreakdown observational_entropy_mixed(const Eigen::MatrixXcd& rho, BasisDomain state_domain,
                                                                  std::span<const CoarseGraining> cgs,
                                                                  const Eigen::MatrixXd* fock_from_energy = nullptr) {
    if (rho.rows() != rho.cols()) throw DimensionError("density matrix is not square");
    if (std::abs(rho.trace().real() - 1.0) > 1e-9) throw NormalizationError("density matrix trace differs from 1");
    const auto in = detail::prepare_engine(cgs, state_domain, fock_from_energy, rho.rows());
    std::vector<EntropyTerm> terms;
    std::vector<std::size_t> index;
    detail::walk(
        in, 0, rho, index, "",
        [](const detail::Projector& p, const Eigen::MatrixXcd& r) {
            return Eigen::MatrixXcd(p.apply(Eigen::MatrixXcd(p.apply(r).adjoint())).adjoint());
        },
        [](const Eigen::MatrixXcd& r) { return r.trace().real(); }, terms);
    return detail::finish(std::move(terms));
}

/// Canonical state e^{-beta H}/Z in the Fock basis.
[[nodiscard]] inline Eigen::MatrixXcd thermal_density_matrix(const Spectrum& spec, double beta) {
    Eigen::ArrayXd w = detail::shifted_weights(spec.energies, beta);
    w /= w.sum();
    const Eigen::MatrixXd rho = spec.eigenvectors * w.matrix().asDiagonal() * spec.eigenvectors.transpose();
    return rho.cast<Complex>();
}

/// Position-then-energy observational entropy with the volume tables
/// precomputed for one (spectrum, partition) pair. Immutable once built.
class SxeEvaluator {
public:
    SxeEvaluator(const Spectrum& spec, const FockBasis& basis, const RegionPartition& partition,
                 double relative_tolerance = 1e-9)
        : U_(spec.eigenvectors), groups_(degenerate_groups(spec.energies, relative_tolerance)) {
        if (static_cast<std::size_t>(spec.dim()) != basis.dim()) throw DimensionError("spectrum and basis differ");
        const CoarseGraining position = position_coarse_graining(basis, partition);
        const Eigen::Index dim = spec.dim();
        for (const auto& m : position.macrostates) {
            labels_.push_back(m.label);
            rows_.push_back(m.members);
            Eigen::MatrixXd block(static_cast<Eigen::Index>(m.members.size()), dim);
            for (std::size_t r = 0; r < m.members.size(); ++r) block.row(static_cast<Eigen::Index>(r)) = U_.row(m.members[r]);
            blocks_.push_back(std::move(block));
        }
        volumes_.resize(static_cast<Eigen::Index>(labels_.size()), static_cast<Eigen::Index>(groups_.size()));
        for (std::size_t x = 0; x < blocks_.size(); ++x) {
            const Eigen::RowVectorXd diag = blocks_[x].colwise().squaredNorm();  // <E_k|P_x|E_k>
            for (std::size_t g = 0; g < groups_.size(); ++g)
                volumes_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(g)) =
                    diag.segment(groups_[g].first, groups_[g].second - groups_[g].first).sum();
        }
    }

    [[nodiscard]] Eigen::Index dim() const noexcept { return U_.rows(); }
    [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }

    /// S_xE of a state given by energy-basis amplitudes.
    [[nodiscard]] double entropy(const Eigen::VectorXcd& energy_amps) const {
        double s = 0.0;
        for_each_term(energy_amps, [&](std::size_t, std::size_t, double p, double v) {
            if (p >= kProbabilityFloor) s -= p * std::log(p / v);
        });
        return s;
    }

    [[nodiscard]] EntropyBreakdown breakdown(const Eigen::VectorXcd& energy_amps) const {
        std::vector<EntropyTerm> terms;
        for_each_term(energy_amps, [&](std::size_t x, std::size_t g, double p, double v) {
            terms.push_back({labels_[x] + "|E" + std::to_string(g), p, v});
        });
        return detail::finish(std::move(terms));
    }

private:
    template <typename Fn>
    void for_each_term(const Eigen::VectorXcd& a, Fn&& fn) const {
        if (a.size() != dim()) throw DimensionError("state and spectrum dimensions differ");
        Eigen::MatrixXd ri(dim(), 2);
        ri.col(0) = a.real();
        ri.col(1) = a.imag();
        const Eigen::MatrixXd fock = U_ * ri;
        Eigen::MatrixXd local;
        for (std::size_t x = 0; x < blocks_.size(); ++x) {
            const auto& rows = rows_[x];
            local.resize(static_cast<Eigen::Index>(rows.size()), 2);
            for (std::size_t r = 0; r < rows.size(); ++r) local.row(static_cast<Eigen::Index>(r)) = fock.row(rows[r]);
            const Eigen::MatrixXd w = blocks_[x].transpose() * local;  // <E_k|P_x|psi>
            const Eigen::VectorXd weight = w.rowwise().squaredNorm();
            for (std::size_t g = 0; g < groups_.size(); ++g) {
                const double p = weight.segment(groups_[g].first, groups_[g].second - groups_[g].first).sum();
                const double v = volumes_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(g));
                if (p > 1e-12 && v < 1e-12) throw ConsistencyError("probability in zero-volume macrostate");
                fn(x, g, p, v);
            }
        }
    }

    Eigen::MatrixXd U_;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> groups_;
    std::vector<std::string> labels_;
    std::vector<std::vector<Eigen::Index>> rows_;
    std::vector<Eigen::MatrixXd> blocks_;
    Eigen::MatrixXd volumes_;
};

/// One-shot S_xE (builds the tables each call).
[[nodiscard]] inline EntropyBreakdown s_xE(const StateVector& state, const Spectrum& spec, const FockBasis& basis,
                                          const RegionPartition& partition, double relative_tolerance = 1e-9) {
    detail::check_normalized(state.amps);
    return SxeEvaluator(spec, basis, partition, relative_tolerance).breakdown(state.amps);
}

// ===========================================================================
// Closed forms
// ===========================================================================

namespace detail {

inline std::vector<double> max_entanglement_weights(int L, int width, int particles) {
    if (width < 0 || width > L || particles < 0 || particles > L) throw ParameterError("invalid (L, width, N_p)");
    std::vector<double> d(static_cast<std::size_t>(particles) + 1, 0.0);
    for (int n = 0; n <= particles; ++n)
        d[static_cast<std::size_t>(n)] =
            static_cast<double>(std::min(binomial(width, n), binomial(L - width, particles - n)));
    return d;
}

}  // namespace detail

/// ln sum_n min{C(width, n), C(L - width, N_p - n)}.
[[nodiscard]] inline double max_entanglement_bound(int L, int width, int particles) {
    double total = 0.0;
    for (double d : detail::max_entanglement_weights(L, width, particles)) total += d;
    return std::log(total);
}

/// Mean block occupation of a maximally entangled state, weights d_n / sum d.
[[nodiscard]] inline double mean_occupation_max_ent(int L, int width, int particles) {
    const auto d = detail::max_entanglement_weights(L, width, particles);
    double total = 0.0;
    double mean = 0.0;
    for (std::size_t n = 0; n < d.size(); ++n) {
        total += d[n];
        mean += static_cast<double>(n) * d[n];
    }
    return mean / total;
}

struct LocalizationPrediction {
    double value = 0.0;        // predicted S_xE of the localized state
    double lower_bound = 0.0;  // (1 - P_max) S_th
    bool consistent = true;    // value >= lower_bound
};

[[nodiscard]] inline LocalizationPrediction s_xE_loc_prediction(double s_th_full, double p_max, int L, int width,
                                                                int particles) {
    if (p_max < 0.0 || p_max > 1.0) throw ParameterError("P_max must lie in [0, 1]");
    if (width < 1 || width >= L) throw ParameterError("window width must satisfy 1 <= width < L");
    const auto xlogx = [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; };
    const double n = particles;
    LocalizationPrediction r;
    r.value = s_th_full - p_max * n * std::log(static_cast<double>(L) / width) -
              (1.0 - p_max) * n * std::log(static_cast<double>(L) / (L - width)) - xlogx(p_max) - xlogx(1.0 - p_max);
    r.lower_bound = (1.0 - p_max) * s_th_full;
    r.consistent = r.value >= r.lower_bound;
    return r;
}

/// Volume-law estimate (width / L) * S_th(full).
[[nodiscard]] inline double volume_law_prediction(double s_th_full, int width, int L) {
    if (width < 0 || width > L || L < 1) throw ParameterError("width must lie in [0, L]");
    return static_cast<double>(width) / L * s_th_full;
}

}  // namespace lattice_entropy
