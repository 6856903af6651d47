#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "lattice_entropy/error.hpp"
#include "lattice_entropy/fock_lattice.hpp"

namespace lattice_entropy {

/// Eigenpairs of a lattice Hamiltonian. Column k of `eigenvectors` is the
/// eigenvector for `energies[k]` expressed in the Fock basis; energies ascend.
struct Spectrum {
    Eigen::VectorXd energies;
    Eigen::MatrixXd eigenvectors;
    LatticeParams params;

    [[nodiscard]] Eigen::Index dim() const noexcept { return energies.size(); }
};

[[nodiscard]] inline Spectrum diagonalize(const Eigen::MatrixXd& H, const LatticeParams& params = {}) {
    if (H.rows() != H.cols()) throw DimensionError("Hamiltonian is not square");
    const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw ParameterError("Hamiltonian is not symmetric");

    // Householder tridiagonalization followed by implicit symmetric QR.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw ConvergenceError("symmetric eigensolver failed to converge");
    return Spectrum{solver.eigenvalues(), solver.eigenvectors(), params};
}

/// A lattice instance with everything derived from its parameters.
struct LatticeModel {
    LatticeParams params;
    FockBasis basis;
    Spectrum spectrum;
};

[[nodiscard]] inline LatticeModel solve_lattice(const LatticeParams& params) {
    FockBasis basis = enumerate_basis(params);
    Spectrum spectrum = diagonalize(build_hamiltonian(params, basis), params);
    return LatticeModel{params, std::move(basis), std::move(spectrum)};
}

namespace detail {

// Boltzmann weights relative to the ground state: e^{-beta (E - E_min)}.
[[nodiscard]] inline Eigen::ArrayXd shifted_weights(const Eigen::VectorXd& energies, double beta) {
    const double e_min = energies.minCoeff();
    return (-beta * (energies.array() - e_min)).exp();
}

[[nodiscard]] inline double canonical_entropy_of_levels(const Eigen::VectorXd& energies, double beta) {
    if (beta < 0.0) throw ParameterError("beta must be non-negative");
    const double e_min = energies.minCoeff();
    const Eigen::ArrayXd w = shifted_weights(energies, beta);
    const double z_shifted = w.sum();
    const double mean_excess = (w * (energies.array() - e_min)).sum() / z_shifted;
    return std::log(z_shifted) + beta * mean_excess;
}

}  // namespace detail

/// ln Z, stable for any beta >= 0.
[[nodiscard]] inline double log_partition_function(const Spectrum& spec, double beta) {
    if (beta < 0.0) throw ParameterError("beta must be non-negative");
    return std::log(detail::shifted_weights(spec.energies, beta).sum()) - beta * spec.energies.minCoeff();
}

[[nodiscard]] inline double partition_function(const Spectrum& spec, double beta) {
    return std::exp(log_partition_function(spec, beta));
}

/// S_th = ln Z + beta <E> of the canonical state.
[[nodiscard]] inline double canonical_entropy(const Spectrum& spec, double beta) {
    return detail::canonical_entropy_of_levels(spec.energies, beta);
}

/// Mean energy of the canonical state.
[[nodiscard]] inline double canonical_energy(const Spectrum& spec, double beta) {
    const Eigen::ArrayXd w = detail::shifted_weights(spec.energies, beta);
    return (w * spec.energies.array()).sum() / w.sum();
}

/// Thermal entropy of the leftmost `width` sites, treated as a lattice of its
/// own: the Hamiltonian restricted to those sites over every particle sector
/// 0..min(N_p, width), normalized by its own partition function.
[[nodiscard]] inline double subsystem_thermal_entropy(const LatticeParams& params, int width, double beta) {
    params.validate();
    if (width < 1 || width >= params.L) throw ParameterError("subsystem width must satisfy 1 <= width < L");
    std::vector<double> levels{0.0};  // vacuum
    LatticeParams sub = params;
    sub.L = width;
    sub.cut_hopping = false;
    for (int n = 1; n <= std::min(params.num_particles, width); ++n) {
        sub.num_particles = n;
        const FockBasis basis(width, n);
        const Spectrum s = diagonalize(build_hamiltonian(sub, basis), sub);
        levels.insert(levels.end(), s.energies.data(), s.energies.data() + s.energies.size());
    }
    const Eigen::VectorXd energies = Eigen::Map<const Eigen::VectorXd>(levels.data(), static_cast<Eigen::Index>(levels.size()));
    return detail::canonical_entropy_of_levels(energies, beta);
}

// ---------------------------------------------------------------------------
// Spectrum cache (JSON). Eigenvectors are stored column-major as a flat array.

inline constexpr int kSpectrumFormatVersion = 1;

inline void to_json(nlohmann::json& j, const LatticeParams& p) {
    j = nlohmann::json{{"L", p.L},         {"Np", p.num_particles}, {"t", p.t},
                       {"tprime", p.t_prime}, {"V", p.V},           {"Vprime", p.V_prime},
                       {"cut_hopping", p.cut_hopping}, {"cut_position", p.cut_position}};
}

inline void from_json(const nlohmann::json& j, LatticeParams& p) {
    p.L = j.value("L", p.L);
    p.num_particles = j.value("Np", p.num_particles);
    p.t = j.value("t", p.t);
    p.t_prime = j.value("tprime", p.t_prime);
    p.V = j.value("V", p.V);
    p.V_prime = j.value("Vprime", p.V_prime);
    p.cut_hopping = j.value("cut_hopping", p.cut_hopping);
    p.cut_position = j.value("cut_position", p.cut_position);
}

[[nodiscard]] inline nlohmann::json spectrum_to_json(const Spectrum& spec) {
    const auto n = spec.dim();
    std::vector<double> energies(spec.energies.data(), spec.energies.data() + n);
    std::vector<double> vectors(spec.eigenvectors.data(), spec.eigenvectors.data() + n * n);
    return nlohmann::json{{"format_version", kSpectrumFormatVersion},
                          {"params", spec.params},
                          {"dim", n},
                          {"energies", std::move(energies)},
                          {"eigenvectors", std::move(vectors)}};
}

[[nodiscard]] inline Spectrum spectrum_from_json(const nlohmann::json& j) {
    if (j.value("format_version", 0) != kSpectrumFormatVersion)
        throw IoError("unsupported spectrum cache format version");
    Spectrum spec;
    spec.params = j.at("params").get<LatticeParams>();
    const auto n = j.at("dim").get<Eigen::Index>();
    const auto energies = j.at("energies").get<std::vector<double>>();
    const auto vectors = j.at("eigenvectors").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(energies.size()) != n || static_cast<Eigen::Index>(vectors.size()) != n * n)
        throw IoError("spectrum cache has inconsistent sizes");
    spec.energies = Eigen::Map<const Eigen::VectorXd>(energies.data(), n);
    spec.eigenvectors = Eigen::Map<const Eigen::MatrixXd>(vectors.data(), n, n);
    return spec;
}

inline void save_spectrum(const Spectrum& spec, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << spectrum_to_json(spec).dump();
    if (!out) throw IoError("failed writing " + path.string());
}

[[nodiscard]] inline Spectrum load_spectrum(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return spectrum_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

/// Loads the spectrum for `params` from `cache_dir` when present and matching,
/// otherwise solves and stores it there.
[[nodiscard]] inline LatticeModel solve_lattice_cached(const LatticeParams& params,
                                                       const std::filesystem::path& cache_dir) {
    if (cache_dir.empty()) return solve_lattice(params);
    nlohmann::json key = params;
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (unsigned char ch : key.dump()) h = (h ^ ch) * 1099511628211ull;
    const auto file = cache_dir / ("spectrum_" + std::to_string(h) + ".json");
    if (std::filesystem::exists(file)) {
        Spectrum spec = load_spectrum(file);
        if (spec.params == params) return LatticeModel{params, enumerate_basis(params), std::move(spec)};
    }
    LatticeModel model = solve_lattice(params);
    std::filesystem::create_directories(cache_dir);
    save_spectrum(model.spectrum, file);
    return model;
}

}  // namespace lattice_entropy
