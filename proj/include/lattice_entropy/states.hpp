#pragma once

// Random pure thermal states (RPTS) in the energy eigenbasis, unitary
// evolution, and phase rotations on the eigenphase torus.

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>

#include "lattice_entropy/error.hpp"
#include "lattice_entropy/spectral.hpp"

namespace lattice_entropy {

using Complex = std::complex<double>;

/// Identifier written into every output so runs can be replayed bit-for-bit.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64+box-muller/v1";

/// Seeded standard-normal stream. std::normal_distribution is
/// implementation-defined, so the transform is spelled out here.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) from the top 53 bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

enum class StateKind { real, complex, other };

[[nodiscard]] inline std::string to_string(StateKind k) {
    switch (k) {
        case StateKind::real: return "real";
        case StateKind::complex: return "complex";
        case StateKind::other: return "other";
    }
    return "other";
}

[[nodiscard]] inline StateKind state_kind_from_string(std::string_view s) {
    if (s == "real") return StateKind::real;
    if (s == "complex") return StateKind::complex;
    if (s == "other") return StateKind::other;
    throw ParameterError("unknown state kind '" + std::string(s) + "'");
}

/// Pure state as amplitudes over the energy eigenbasis.
struct StateVector {
    Eigen::VectorXcd amps;
    double beta = 0.0;
    StateKind kind = StateKind::other;
    std::uint64_t seed = 0;

    [[nodiscard]] Eigen::Index dim() const noexcept { return amps.size(); }
};

/// Phases on the eigenphase torus, gauge-fixed by phi[0] = 0.
class PhaseVector {
public:
    PhaseVector() = default;

    /// All-zero phases of the given length.
    explicit PhaseVector(Eigen::Index dim) : phi_(Eigen::VectorXd::Zero(dim)) {}

    /// Builds from the dim-1 free coordinates; each entry is wrapped to [0, 2pi).
    [[nodiscard]] static PhaseVector from_free(const Eigen::VectorXd& free) {
        PhaseVector p(free.size() + 1);
        for (Eigen::Index k = 0; k < free.size(); ++k) p.phi_[k + 1] = wrap(free[k]);
        return p;
    }

    /// Removes the global phase (subtracts phi[0]) and wraps.
    [[nodiscard]] static PhaseVector gauge_fixed(const Eigen::VectorXd& raw) {
        if (raw.size() == 0) return {};
        PhaseVector p(raw.size());
        for (Eigen::Index k = 1; k < raw.size(); ++k) p.phi_[k] = wrap(raw[k] - raw[0]);
        return p;
    }

    [[nodiscard]] const Eigen::VectorXd& values() const noexcept { return phi_; }
    [[nodiscard]] Eigen::VectorXd free() const { return phi_.tail(std::max<Eigen::Index>(phi_.size() - 1, 0)); }
    [[nodiscard]] Eigen::Index size() const noexcept { return phi_.size(); }
    [[nodiscard]] double operator[](Eigen::Index k) const { return phi_[k]; }

    [[nodiscard]] static double wrap(double x) {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        double r = std::fmod(x, two_pi);
        if (r < 0.0) r += two_pi;
        if (r >= two_pi) r = 0.0;
        return r;
    }

private:
    Eigen::VectorXd phi_;
};

/// amps[E] = c_E e^{-beta E / 2} / sqrt(Z~) with Gaussian c_E, deterministic in
/// (spectrum, beta, kind, seed).
[[nodiscard]] inline StateVector sample_rpts(const Spectrum& spec, double beta, StateKind kind, std::uint64_t seed) {
    if (beta < 0.0) throw ParameterError("beta must be non-negative");
    if (kind == StateKind::other) throw ParameterError("RPTS kind must be real or complex");
    const Eigen::Index n = spec.dim();
    const double e_min = spec.energies.minCoeff();
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;

    for (std::uint64_t attempt = 0;; ++attempt) {
        NormalStream rng(seed + attempt);
        Eigen::VectorXcd amps(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            const double x = rng.normal();
            const double y = rng.normal();
            const Complex c = (kind == StateKind::complex) ? Complex(x, y) * inv_sqrt2 : Complex((x + y) * inv_sqrt2, 0.0);
            // Shifting by E_min only rescales the overall normalization.
            amps[k] = c * std::exp(-0.5 * beta * (spec.energies[k] - e_min));
        }
        const double norm = amps.norm();
        if (norm < 1e-300) continue;
        amps /= norm;
        return StateVector{std::move(amps), beta, kind, seed + attempt};
    }
}

/// e^{-iHt} applied in the eigenbasis.
[[nodiscard]] inline StateVector evolve(const StateVector& state, const Spectrum& spec, double t) {
    if (state.dim() != spec.dim()) throw DimensionError("state and spectrum dimensions differ");
    StateVector out = state;
    for (Eigen::Index k = 0; k < state.dim(); ++k) out.amps[k] *= std::polar(1.0, -spec.energies[k] * t);
    return out;
}

/// amps[E] <- amps[E] e^{-i phi[E]}.
[[nodiscard]] inline StateVector apply_phases(const StateVector& state, const PhaseVector& phi) {
    if (phi.size() != state.dim()) throw DimensionError("phase vector length differs from state dimension");
    StateVector out = state;
    for (Eigen::Index k = 0; k < state.dim(); ++k) out.amps[k] *= std::polar(1.0, -phi[k]);
    return out;
}

/// Phases that reproduce evolve(state, t) up to a global phase.
[[nodiscard]] inline PhaseVector phases_for_time(const Spectrum& spec, double t) {
    return PhaseVector::gauge_fixed(spec.energies * t);
}

/// Amplitudes of an energy-basis vector in the Fock basis (V * amps).
[[nodiscard]] inline Eigen::VectorXcd to_fock_basis(const Eigen::VectorXcd& amps, const Spectrum& spec) {
    if (amps.size() != spec.dim()) throw DimensionError("state and spectrum dimensions differ");
    Eigen::VectorXcd out(amps.size());
    out.real() = spec.eigenvectors * amps.real();
    out.imag() = spec.eigenvectors * amps.imag();
    return out;
}

[[nodiscard]] inline Eigen::VectorXcd to_fock_basis(const StateVector& state, const Spectrum& spec) {
    return to_fock_basis(state.amps, spec);
}

/// Inverse of to_fock_basis (V^T * fock).
[[nodiscard]] inline Eigen::VectorXcd to_energy_basis(const Eigen::VectorXcd& fock, const Spectrum& spec) {
    if (fock.size() != spec.dim()) throw DimensionError("state and spectrum dimensions differ");
    Eigen::VectorXcd out(fock.size());
    out.real() = spec.eigenvectors.transpose() * fock.real();
    out.imag() = spec.eigenvectors.transpose() * fock.imag();
    return out;
}

[[nodiscard]] inline double energy_expectation(const StateVector& state, const Spectrum& spec) {
    return (state.amps.cwiseAbs2().array() * spec.energies.array()).sum();
}

inline void to_json(nlohmann::json& j, const StateVector& s) {
    nlohmann::json amps = nlohmann::json::array();
    for (Eigen::Index k = 0; k < s.dim(); ++k) amps.push_back({s.amps[k].real(), s.amps[k].imag()});
    j = nlohmann::json{{"beta", s.beta},
                       {"kind", to_string(s.kind)},
                       {"seed", s.seed},
                       {"rng", std::string(kRngAlgorithm)},
                       {"amps", std::move(amps)}};
}

inline void from_json(const nlohmann::json& j, StateVector& s) {
    s.beta = j.at("beta").get<double>();
    s.kind = state_kind_from_string(j.at("kind").get<std::string>());
    s.seed = j.at("seed").get<std::uint64_t>();
    const auto& amps = j.at("amps");
    s.amps.resize(static_cast<Eigen::Index>(amps.size()));
    for (std::size_t k = 0; k < amps.size(); ++k)
        s.amps[static_cast<Eigen::Index>(k)] = Complex(amps[k].at(0).get<double>(), amps[k].at(1).get<double>());
}

}  // namespace lattice_entropy
