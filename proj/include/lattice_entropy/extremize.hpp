#pragma once

// Derivative-free extremization over the eigenphase torus (Nelder-Mead with
// restarts) and maximization of the probability of localizing every particle
// inside a window (phase-alignment ascent followed by a simplex polish).

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "lattice_entropy/entropy.hpp"
#include "lattice_entropy/error.hpp"
#include "lattice_entropy/fock_lattice.hpp"
#include "lattice_entropy/spectral.hpp"
#include "lattice_entropy/states.hpp"

namespace lattice_entropy {

struct NelderMeadConfig {
    std::int64_t max_evals = 200000;  // per restart
    double tol_f = 1e-7;
    double tol_x = 1e-6;
    int restarts = 8;
    std::uint64_t seed = 1;
    double initial_step = 0.5 * std::numbers::pi;
    // A run that stalls is re-seeded with a fresh simplex around its best
    // vertex until a rebuild gains less than tol_f.
    int max_rebuilds = 50;
};

inline void to_json(nlohmann::json& j, const NelderMeadConfig& c) {
    j = nlohmann::json{{"max_evals", c.max_evals},       {"tol_f", c.tol_f}, {"tol_x", c.tol_x},
                       {"restarts", c.restarts},         {"seed", c.seed},   {"initial_step", c.initial_step},
                       {"max_rebuilds", c.max_rebuilds}};
}

inline void from_json(const nlohmann::json& j, NelderMeadConfig& c) {
    c.max_evals = j.value("max_evals", c.max_evals);
    c.tol_f = j.value("tol_f", c.tol_f);
    c.tol_x = j.value("tol_x", c.tol_x);
    c.restarts = j.value("restarts", c.restarts);
    c.seed = j.value("seed", c.seed);
    c.initial_step = j.value("initial_step", c.initial_step);
    c.max_rebuilds = j.value("max_rebuilds", c.max_rebuilds);
}

/// Raw simplex-search outcome (minimization convention).
struct SimplexResult {
    double value = std::numeric_limits<double>::infinity();
    Eigen::VectorXd x;
    std::int64_t iterations = 0;
    std::int64_t evaluations = 0;
    int restarts_used = 0;
    bool converged = false;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

namespace detail {

// One Nelder-Mead descent from `start` with an axis-aligned initial simplex.
// Coefficients: reflection 1, expansion 2, contraction 1/2, shrink 1/2.
inline SimplexResult simplex_descent(const Objective& f, const Eigen::VectorXd& start, double step,
                                     const NelderMeadConfig& cfg, std::int64_t budget) {
    const Eigen::Index n = start.size();
    SimplexResult r;
    std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(n + 1), start);
    std::vector<double> vals(static_cast<std::size_t>(n + 1));
    auto eval = [&](const Eigen::VectorXd& x) {
        ++r.evaluations;
        return f(x);
    };
    vals[0] = eval(start);
    for (Eigen::Index i = 0; i < n; ++i) {
        pts[static_cast<std::size_t>(i + 1)][i] += step;
        vals[static_cast<std::size_t>(i + 1)] = eval(pts[static_cast<std::size_t>(i + 1)]);
    }

    std::vector<std::size_t> order(pts.size());
    Eigen::VectorXd centroid(n), xr(n), xe(n), xc(n);
    while (true) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[order.size() - 2];

        double spread_x = 0.0;
        for (const auto& p : pts) spread_x = std::max(spread_x, (p - pts[best]).cwiseAbs().maxCoeff());
        const double spread_f = vals[worst] - vals[best];
        if (spread_x < cfg.tol_x || spread_f < cfg.tol_f) {
            r.converged = true;
            break;
        }
        if (r.evaluations >= budget) break;
        ++r.iterations;

        centroid.setZero();
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (i != worst) centroid += pts[i];
        centroid /= static_cast<double>(n);

        xr = centroid + (centroid - pts[worst]);
        const double fr = eval(xr);
        if (fr < vals[best]) {
            xe = centroid + 2.0 * (centroid - pts[worst]);
            const double fe = eval(xe);
            if (fe < fr) {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = xr;
            vals[worst] = fr;
            continue;
        }
        const bool outside = fr < vals[worst];
        xc = outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                     : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
        const double fc = eval(xc);
        if (fc < (outside ? fr : vals[worst])) {
            pts[worst] = xc;
            vals[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i == best) continue;
            pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
            vals[i] = eval(pts[i]);
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
    r.value = vals[best];
    r.x = pts[best];
    return r;
}

}  // namespace detail

/// Minimizes `f` over R^dim. `starts` seed the first restarts; the remaining
/// restarts start from uniform points in [0, 2pi)^dim drawn from cfg.seed.
/// The best result over all restarts is returned.
[[nodiscard]] inline SimplexResult nelder_mead(const Objective& f, Eigen::Index dim, const NelderMeadConfig& cfg,
                                               const std::vector<Eigen::VectorXd>& starts = {}) {
    if (dim < 1) throw ParameterError("optimizer dimension must be at least 1");
    NormalStream rng(cfg.seed);
    SimplexResult best;
    const int runs = std::max(cfg.restarts, 1);
    for (int run = 0; run < runs; ++run) {
        Eigen::VectorXd x(dim);
        if (static_cast<std::size_t>(run) < starts.size()) {
            x = starts[static_cast<std::size_t>(run)];
            if (x.size() != dim) throw DimensionError("start point has wrong dimension");
        } else {
            for (Eigen::Index k = 0; k < dim; ++k) x[k] = 2.0 * std::numbers::pi * rng.uniform();
        }

        SimplexResult run_result;
        run_result.x = x;
        std::int64_t used = 0;
        for (int rebuild = 0; rebuild <= cfg.max_rebuilds && used < cfg.max_evals; ++rebuild) {
            const double before = run_result.value;
            SimplexResult leg = detail::simplex_descent(f, run_result.x, cfg.initial_step, cfg, cfg.max_evals - used);
            used += leg.evaluations;
            run_result.iterations += leg.iterations;
            run_result.evaluations += leg.evaluations;
            if (leg.value < run_result.value) {
                run_result.value = leg.value;
                run_result.x = leg.x;
            }
            run_result.converged = leg.converged;
            if (!(before - run_result.value > cfg.tol_f)) break;
        }
        best.iterations += run_result.iterations;
        best.evaluations += run_result.evaluations;
        if (run_result.value < best.value) {
            best.value = run_result.value;
            best.x = run_result.x;
            best.converged = run_result.converged;
        }
        best.restarts_used = run + 1;
    }
    return best;
}

enum class EntropyKind { entanglement, observational };
enum class Direction { minimize, maximize };

[[nodiscard]] inline std::string to_string(EntropyKind k) { return k == EntropyKind::entanglement ? "ent" : "xE"; }
[[nodiscard]] inline std::string to_string(Direction d) { return d == Direction::minimize ? "min" : "max"; }

struct ExtremizationResult {
    double value = 0.0;
    PhaseVector phi_star;
    std::int64_t iterations = 0;
    std::int64_t evaluations = 0;
    int restarts_used = 0;
    bool converged = false;
    double scan_value = 0.0;  // best value on the time pre-scan (entropies only)
    double wall_seconds = 0.0;
};

inline void to_json(nlohmann::json& j, const ExtremizationResult& r) {
    const auto& phi = r.phi_star.values();
    j = nlohmann::json{{"value", r.value},
                       {"phi_star", std::vector<double>(phi.data(), phi.data() + phi.size())},
                       {"iterations", r.iterations},
                       {"evaluations", r.evaluations},
                       {"restarts_used", r.restarts_used},
                       {"converged", r.converged},
                       {"scan_value", r.scan_value},
                       {"wall_seconds", r.wall_seconds}};
}

/// Entropy of a state as a function of energy-basis amplitudes, with all
/// per-spectrum tables built once.
class EntropyFunctional {
public:
    EntropyFunctional(const LatticeModel& model, EntropyKind kind, int width, int offset = 0,
                      double relative_tolerance = 1e-9)
        : spectrum_(&model.spectrum), kind_(kind) {
        if (kind == EntropyKind::entanglement)
            cut_.emplace(model.basis, width, offset);
        else
            sxe_.emplace(model.spectrum, model.basis, make_uniform_partition(model.params.L, width), relative_tolerance);
    }

    [[nodiscard]] double operator()(const Eigen::VectorXcd& energy_amps) const {
        if (kind_ == EntropyKind::entanglement) return entanglement_entropy(to_fock_basis(energy_amps, *spectrum_), *cut_);
        return sxe_->entropy(energy_amps);
    }

    [[nodiscard]] EntropyKind kind() const noexcept { return kind_; }

private:
    const Spectrum* spectrum_;
    EntropyKind kind_;
    std::optional<Bipartition> cut_;
    std::optional<SxeEvaluator> sxe_;
};

struct ExtremizeOptions {
    NelderMeadConfig optimizer;
    double scan_t_max = 1e4;
    double scan_dt = 0.5;
    // Above this dimension the simplex first works on the most populated
    // eigenphases only, then polishes in full dimension.
    Eigen::Index staged_threshold = 500;
    Eigen::Index staged_size = 200;
    // Extra restart seeds: phases reached by free evolution at these times.
    // Used after the scan seed, within the restart budget.
    std::vector<double> start_times;
};

inline void to_json(nlohmann::json& j, const ExtremizeOptions& o) {
    j = nlohmann::json{{"optimizer", o.optimizer},
                       {"scan_t_max", o.scan_t_max},
                       {"scan_dt", o.scan_dt},
                       {"staged_threshold", o.staged_threshold},
                       {"staged_size", o.staged_size},
                       {"start_times", o.start_times}};
}

inline void from_json(const nlohmann::json& j, ExtremizeOptions& o) {
    if (j.contains("optimizer")) o.optimizer = j.at("optimizer").get<NelderMeadConfig>();
    o.scan_t_max = j.value("scan_t_max", o.scan_t_max);
    o.scan_dt = j.value("scan_dt", o.scan_dt);
    o.staged_threshold = j.value("staged_threshold", o.staged_threshold);
    o.staged_size = j.value("staged_size", o.staged_size);
    o.start_times = j.value("start_times", o.start_times);
}

/// Extremizes S(apply_phases(state0, phi)) over the gauge-fixed torus.
[[nodiscard]] inline ExtremizationResult extremize_entropy(const StateVector& state0, const Spectrum& spec,
                                                           const EntropyFunctional& entropy, Direction direction,
                                                           const ExtremizeOptions& opts = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    const Eigen::Index n = spec.dim();
    if (state0.dim() != n) throw DimensionError("state and spectrum dimensions differ");
    detail::check_normalized(state0.amps);
    const double sign = direction == Direction::minimize ? 1.0 : -1.0;

    // Coarse time scan; its best point seeds the first restart.
    double scan_best = std::numeric_limits<double>::infinity();
    double t_best = 0.0;
    {
        const Eigen::ArrayXd e = spec.energies.array();
        Eigen::VectorXcd amps(n);
        const auto steps = static_cast<std::int64_t>(std::floor(opts.scan_t_max / opts.scan_dt));
        for (std::int64_t s = 0; s <= steps; ++s) {
            const double t = static_cast<double>(s) * opts.scan_dt;
            for (Eigen::Index k = 0; k < n; ++k) amps[k] = state0.amps[k] * std::polar(1.0, -e[k] * t);
            const double v = sign * entropy(amps);
            if (v < scan_best) {
                scan_best = v;
                t_best = t;
            }
        }
    }
    const PhaseVector scan_phi = phases_for_time(spec, t_best);

    ExtremizationResult out;
    out.scan_value = sign * scan_best;
    if (n == 1) {
        out.value = sign * scan_best;
        out.phi_star = PhaseVector(1);
        out.converged = true;
        return out;
    }

    // Objective over a subset of free phases; the rest stay at `base`.
    Eigen::VectorXcd scratch(n);
    auto make_objective = [&](const std::vector<Eigen::Index>& active, const Eigen::VectorXd& base) {
        return [&, active, base](const Eigen::VectorXd& x) {
            Eigen::VectorXd phi = base;
            for (std::size_t j = 0; j < active.size(); ++j) phi[active[j]] = x[static_cast<Eigen::Index>(j)];
            for (Eigen::Index k = 0; k < n; ++k) scratch[k] = state0.amps[k] * std::polar(1.0, -phi[k]);
            return sign * entropy(scratch);
        };
    };

    Eigen::VectorXd full_start = scan_phi.values();
    std::vector<Eigen::Index> all(static_cast<std::size_t>(n - 1));
    std::iota(all.begin(), all.end(), Eigen::Index{1});

    SimplexResult result;
    if (n > opts.staged_threshold) {
        std::vector<Eigen::Index> top = all;
        std::stable_sort(top.begin(), top.end(), [&](auto a, auto b) { return std::norm(state0.amps[a]) > std::norm(state0.amps[b]); });
        top.resize(static_cast<std::size_t>(std::min<Eigen::Index>(opts.staged_size, n - 1)));
        std::sort(top.begin(), top.end());
        Eigen::VectorXd sub_start(static_cast<Eigen::Index>(top.size()));
        for (std::size_t j = 0; j < top.size(); ++j) sub_start[static_cast<Eigen::Index>(j)] = full_start[top[j]];
        const SimplexResult staged =
            nelder_mead(make_objective(top, full_start), static_cast<Eigen::Index>(top.size()), opts.optimizer, {sub_start});
        for (std::size_t j = 0; j < top.size(); ++j) full_start[top[j]] = staged.x[static_cast<Eigen::Index>(j)];
        NelderMeadConfig polish = opts.optimizer;
        polish.restarts = 1;
        result = nelder_mead(make_objective(all, full_start), n - 1, polish, {full_start.tail(n - 1)});
        result.iterations += staged.iterations;
        result.evaluations += staged.evaluations;
        result.restarts_used += staged.restarts_used;
    } else {
        std::vector<Eigen::VectorXd> starts{full_start.tail(n - 1)};
        for (double t : opts.start_times) starts.push_back(phases_for_time(spec, t).free());
        result = nelder_mead(make_objective(all, full_start), n - 1, opts.optimizer, starts);
    }

    out.phi_star = PhaseVector::from_free(result.x);
    out.value = entropy(apply_phases(state0, out.phi_star).amps);
    out.iterations = result.iterations;
    out.evaluations = result.evaluations;
    out.restarts_used = result.restarts_used;
    out.converged = result.converged;
    if (sign * out.value > scan_best) {
        // The simplex never returns worse than its start; guard against wrap rounding.
        out.phi_star = scan_phi;
        out.value = entropy(apply_phases(state0, scan_phi).amps);
    }
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

[[nodiscard]] inline ExtremizationResult extremize_entropy(const StateVector& state0, const LatticeModel& model,
                                                           EntropyKind kind, Direction direction, int width,
                                                           const ExtremizeOptions& opts = {}) {
    const EntropyFunctional functional(model, kind, width);
    return extremize_entropy(state0, model.spectrum, functional, direction, opts);
}

// ===========================================================================
// Localization
// ===========================================================================

struct LocalizationWindow {
    int first_site = 0;
    int width = 0;
    std::uint64_t subspace_dim = 0;  // M
    std::uint64_t full_dim = 0;      // N
    [[nodiscard]] double dilution_ratio() const { return static_cast<double>(full_dim) / (static_cast<double>(subspace_dim) * subspace_dim); }
    // N >> M^2, read as N >= 10 M^2.
    [[nodiscard]] bool dilute() const { return dilution_ratio() >= 10.0; }
};

/// Diagonal projector onto "every particle inside the window".
struct LocalizationProjector {
    LocalizationWindow window;
    std::vector<Eigen::Index> members;  // Fock indices
};

[[nodiscard]] inline LocalizationProjector localization_projector(const FockBasis& basis, int first_site, int width) {
    if (width < 1 || first_site < 0 || first_site + width > basis.sites())
        throw ParameterError("localization window outside the lattice");
    if (width < basis.particles())
        throw EmptySubspaceError("window of width " + std::to_string(width) + " cannot hold " +
                                 std::to_string(basis.particles()) + " particles");
    const Config mask = site_mask(first_site, width);
    LocalizationProjector p;
    for (std::size_t k = 0; k < basis.dim(); ++k)
        if ((basis.config(k) & ~mask) == 0) p.members.push_back(static_cast<Eigen::Index>(k));
    p.window = {first_site, width, p.members.size(), basis.dim()};
    if (p.members.empty()) throw EmptySubspaceError("localization subspace is empty");
    return p;
}

/// P(v) = ||P_X V v||^2 for energy amplitudes v, with the projected
/// eigenvector rows cached.
class LocalizationProbability {
public:
    LocalizationProbability(const Spectrum& spec, const LocalizationProjector& projector)
        : rows_(static_cast<Eigen::Index>(projector.members.size()), spec.dim()) {
        for (std::size_t r = 0; r < projector.members.size(); ++r)
            rows_.row(static_cast<Eigen::Index>(r)) = spec.eigenvectors.row(projector.members[r]);
    }

    [[nodiscard]] double operator()(const Eigen::VectorXcd& energy_amps) const {
        return (rows_.cast<Complex>() * energy_amps).squaredNorm();
    }

    [[nodiscard]] const Eigen::MatrixXd& rows() const noexcept { return rows_; }

private:
    Eigen::MatrixXd rows_;  // M x N
};

struct LocalizationOptions {
    int ascent_restarts = 8;
    int max_sweeps = 2000;
    double sweep_tolerance = 1e-13;
    std::uint64_t seed = 7;
    NelderMeadConfig polish{.max_evals = 20000, .tol_f = 1e-10, .tol_x = 1e-7, .restarts = 1, .seed = 11,
                            .initial_step = 0.05, .max_rebuilds = 3};
};

inline void to_json(nlohmann::json& j, const LocalizationOptions& o) {
    j = nlohmann::json{{"ascent_restarts", o.ascent_restarts}, {"max_sweeps", o.max_sweeps},
                       {"sweep_tolerance", o.sweep_tolerance}, {"seed", o.seed}, {"polish", o.polish}};
}

inline void from_json(const nlohmann::json& j, LocalizationOptions& o) {
    o.ascent_restarts = j.value("ascent_restarts", o.ascent_restarts);
    o.max_sweeps = j.value("max_sweeps", o.max_sweeps);
    o.sweep_tolerance = j.value("sweep_tolerance", o.sweep_tolerance);
    o.seed = j.value("seed", o.seed);
    if (j.contains("polish")) o.polish = j.at("polish").get<NelderMeadConfig>();
}

/// One full coordinate sweep of phase alignment: each amplitude in turn is
/// rotated to maximize P with the others fixed. `projected` must equal
/// rows * v on entry and is kept in sync. Returns P after the sweep.
inline double phase_alignment_sweep(const Eigen::MatrixXd& rows, Eigen::VectorXcd& v, Eigen::VectorXcd& projected) {
    for (Eigen::Index e = 0; e < v.size(); ++e) {
        const double magnitude = std::abs(v[e]);
        if (magnitude == 0.0) continue;
        const auto column = rows.col(e);
        projected -= column.cast<Complex>() * v[e];
        const Complex s = column.cast<Complex>().dot(projected);  // sum_x U_xe r_x (column is real)
        const double s_abs = std::abs(s);
        v[e] = s_abs > 0.0 ? magnitude * s / s_abs : Complex(magnitude, 0.0);
        projected += column.cast<Complex>() * v[e];
    }
    return projected.squaredNorm();
}

/// Maximizes P(phi) = ||P_X to_fock(apply_phases(state0, phi))||^2.
[[nodiscard]] inline ExtremizationResult maximize_localization(const StateVector& state0, const Spectrum& spec,
                                                               const LocalizationProjector& projector,
                                                               const LocalizationOptions& opts = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    const Eigen::Index n = spec.dim();
    if (state0.dim() != n) throw DimensionError("state and spectrum dimensions differ");
    detail::check_normalized(state0.amps);
    const LocalizationProbability prob(spec, projector);
    const Eigen::MatrixXd& rows = prob.rows();

    ExtremizationResult out;
    NormalStream rng(opts.seed);
    Eigen::VectorXcd best_v = state0.amps;
    double best_p = prob(state0.amps);
    for (int run = 0; run < std::max(opts.ascent_restarts, 1); ++run) {
        Eigen::VectorXcd v = state0.amps;
        if (run > 0)
            for (Eigen::Index k = 0; k < n; ++k) v[k] *= std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
        Eigen::VectorXcd projected = rows.cast<Complex>() * v;
        double p = projected.squaredNorm();
        for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
            const double next = phase_alignment_sweep(rows, v, projected);
            ++out.iterations;
            const bool done = next - p < opts.sweep_tolerance;
            p = next;
            if (done) break;
        }
        out.restarts_used = run + 1;
        if (p > best_p) {
            best_p = p;
            best_v = v;
        }
    }

    // phi_E = arg(a_E) - arg(v_E), so that a_E e^{-i phi_E} = v_E.
    Eigen::VectorXd raw(n);
    for (Eigen::Index k = 0; k < n; ++k)
        raw[k] = (std::abs(state0.amps[k]) > 0.0 && std::abs(best_v[k]) > 0.0) ? std::arg(state0.amps[k]) - std::arg(best_v[k]) : 0.0;
    PhaseVector phi = PhaseVector::gauge_fixed(raw);

    if (n > 1 && opts.polish.max_evals > 0) {
        Eigen::VectorXcd scratch(n);
        const Objective objective = [&](const Eigen::VectorXd& x) {
            scratch[0] = state0.amps[0];
            for (Eigen::Index k = 1; k < n; ++k) scratch[k] = state0.amps[k] * std::polar(1.0, -x[k - 1]);
            return -prob(scratch);
        };
        const SimplexResult polished = nelder_mead(objective, n - 1, opts.polish, {phi.free()});
        out.evaluations = polished.evaluations;
        out.converged = polished.converged;
        const PhaseVector candidate = PhaseVector::from_free(polished.x);
        if (prob(apply_phases(state0, candidate).amps) > prob(apply_phases(state0, phi).amps)) phi = candidate;
    } else {
        out.converged = true;
    }

    out.phi_star = phi;
    out.value = std::clamp(prob(apply_phases(state0, phi).amps), 0.0, 1.0);
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

/// Window of `width` sites centred in the chain (left-leaning when L - width is odd).
[[nodiscard]] inline int centred_window_start(int L, int width) { return (L - width) / 2; }

struct PmaxRow {
    int L = 0;
    double beta = 0.0;
    StateKind kind = StateKind::complex;
    double mean = 0.0;
    double stddev = 0.0;
    int samples = 0;
    LocalizationWindow window;
};

struct PmaxSweepConfig {
    std::vector<int> sizes{10, 20, 30};
    std::vector<double> betas{0.01};
    std::vector<StateKind> kinds{StateKind::real, StateKind::complex};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6};
    int particles = 3;
    int window_width = 5;
    LatticeParams base;
    LocalizationOptions localization;
};

[[nodiscard]] inline std::pair<double, double> mean_and_stddev(const std::vector<double>& xs) {
    if (xs.empty()) return {0.0, 0.0};
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

/// Mean P_max over seeds for every (L, beta, kind); window is centred.
/// Spectra come from `solve` so callers can share or cache them.
[[nodiscard]] inline std::vector<PmaxRow> pmax_beta_sweep(
    const PmaxSweepConfig& cfg, const std::function<LatticeModel(const LatticeParams&)>& solve = solve_lattice) {
    std::vector<PmaxRow> rows;
    for (int L : cfg.sizes) {
        LatticeParams p = cfg.base;
        p.L = L;
        p.num_particles = cfg.particles;
        const LatticeModel model = solve(p);
        const auto projector = localization_projector(model.basis, centred_window_start(L, cfg.window_width), cfg.window_width);
        for (double beta : cfg.betas) {
            for (StateKind kind : cfg.kinds) {
                std::vector<double> values;
                for (auto seed : cfg.seeds) {
                    const StateVector s = sample_rpts(model.spectrum, beta, kind, seed);
                    values.push_back(maximize_localization(s, model.spectrum, projector, cfg.localization).value);
                }
                const auto [mean, sd] = mean_and_stddev(values);
                rows.push_back({L, beta, kind, mean, sd, static_cast<int>(values.size()), projector.window});
            }
        }
    }
    return rows;
}

}  // namespace lattice_entropy
