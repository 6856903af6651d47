#pragma once

// Experiment drivers: entropy time series and their histograms, sweeps over
// system size and temperature, localization runs, and the glue that turns
// each into a ResultSet for emit_outputs.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lattice_entropy/entropy.hpp"
#include "lattice_entropy/error.hpp"
#include "lattice_entropy/extremize.hpp"
#include "lattice_entropy/fock_lattice.hpp"
#include "lattice_entropy/output.hpp"
#include "lattice_entropy/parallel.hpp"
#include "lattice_entropy/spectral.hpp"
#include "lattice_entropy/states.hpp"

namespace lattice_entropy {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[nodiscard]] inline EntropyKind entropy_kind_from_string(std::string_view s) {
    if (s == "ent") return EntropyKind::entanglement;
    if (s == "xE") return EntropyKind::observational;
    throw ParameterError("unknown entropy '" + std::string(s) + "' (expected ent or xE)");
}

[[nodiscard]] inline Direction direction_from_string(std::string_view s) {
    if (s == "min") return Direction::minimize;
    if (s == "max") return Direction::maximize;
    throw ParameterError("unknown direction '" + std::string(s) + "' (expected min or max)");
}

enum class WindowPlacement { left, centred };

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    std::string experiment = "histogram";
    LatticeParams lattice;
    double beta = 0.01;
    std::vector<double> betas{0.01, 0.1, 0.3, 0.5, 1.0, 3.0, 10.0};
    std::vector<int> sizes{8, 12, 16, 20, 24, 28};
    int width = 4;  // subsystem / region / window width
    std::vector<std::uint64_t> seeds{1};
    std::vector<StateKind> kinds{StateKind::complex};
    std::vector<EntropyKind> entropies{EntropyKind::entanglement, EntropyKind::observational};
    double t_max = 5e4;
    double dt = 0.5;
    int bins = 100;
    int density_every = 1000;  // keep every n-th density sample in traces
    bool extrema = true;       // run the optimizer (markers, min/max columns)
    WindowPlacement window = WindowPlacement::left;
    Direction direction = Direction::minimize;  // extremize subcommand
    double time = 0.0;                          // density subcommand
    ExtremizeOptions optimizer;
    LocalizationOptions localization;
    std::string output_dir = "out";
    unsigned threads = 0;

    void validate() const {
        lattice.validate();
        if (betas.empty() || sizes.empty() || seeds.empty() || kinds.empty() || entropies.empty())
            throw ParameterError("grids must be nonempty");
        if (!(dt > 0.0)) throw ParameterError("dt must be positive");
        if (!(t_max >= dt)) throw ParameterError("t_max must be at least dt");
        if (beta < 0.0) throw ParameterError("beta must be non-negative");
        for (double b : betas)
            if (b < 0.0) throw ParameterError("beta grid entries must be non-negative");
        for (int L : sizes)
            if (L < 1 || L > kMaxSites) throw ParameterError("size grid entry out of range: " + std::to_string(L));
        if (width < 1) throw ParameterError("width must be at least 1");
        if (bins < 1) throw ParameterError("bins must be at least 1");
        if (density_every < 1) throw ParameterError("density_every must be at least 1");
        if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
            throw ParameterError("seeds must be distinct");
        for (StateKind k : kinds)
            if (k == StateKind::other) throw ParameterError("state kinds must be real or complex");
    }
};

inline void to_json(nlohmann::json& j, const ExperimentConfig& c) {
    std::vector<std::string> kinds, entropies;
    for (auto k : c.kinds) kinds.push_back(to_string(k));
    for (auto e : c.entropies) entropies.push_back(to_string(e));
    j = nlohmann::json{{"experiment", c.experiment},
                       {"lattice", c.lattice},
                       {"beta", c.beta},
                       {"betas", c.betas},
                       {"sizes", c.sizes},
                       {"width", c.width},
                       {"seeds", c.seeds},
                       {"kinds", kinds},
                       {"entropies", entropies},
                       {"t_max", c.t_max},
                       {"dt", c.dt},
                       {"bins", c.bins},
                       {"density_every", c.density_every},
                       {"extrema", c.extrema},
                       {"window", c.window == WindowPlacement::left ? "left" : "centred"},
                       {"direction", to_string(c.direction)},
                       {"time", c.time},
                       {"optimizer", c.optimizer},
                       {"localization", c.localization},
                       {"output_dir", c.output_dir}};
}

/// Missing keys keep the values already in `c`, so a file can override a
/// subset of the command-line settings.
inline void from_json(const nlohmann::json& j, ExperimentConfig& c) {
    if (!j.is_object()) throw ParameterError("config must be a JSON object");
    static const std::set<std::string> known{"experiment", "lattice", "beta", "betas", "sizes", "width", "seeds",
                                             "kinds", "entropies", "t_max", "dt", "bins", "density_every", "extrema",
                                             "window", "direction", "time", "optimizer", "localization", "output_dir",
                                             "threads"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw ParameterError("unknown config key '" + key + "'");
    c.experiment = j.value("experiment", c.experiment);
    if (j.contains("lattice")) {
        nlohmann::json merged = c.lattice;
        merged.update(j.at("lattice"));
        c.lattice = merged.get<LatticeParams>();
    }
    c.beta = j.value("beta", c.beta);
    c.betas = j.value("betas", c.betas);
    c.sizes = j.value("sizes", c.sizes);
    c.width = j.value("width", c.width);
    c.seeds = j.value("seeds", c.seeds);
    if (j.contains("kinds")) {
        c.kinds.clear();
        for (const auto& k : j.at("kinds")) c.kinds.push_back(state_kind_from_string(k.get<std::string>()));
    }
    if (j.contains("entropies")) {
        c.entropies.clear();
        for (const auto& e : j.at("entropies")) c.entropies.push_back(entropy_kind_from_string(e.get<std::string>()));
    }
    c.t_max = j.value("t_max", c.t_max);
    c.dt = j.value("dt", c.dt);
    c.bins = j.value("bins", c.bins);
    c.density_every = j.value("density_every", c.density_every);
    c.extrema = j.value("extrema", c.extrema);
    if (j.contains("window")) {
        const auto w = j.at("window").get<std::string>();
        if (w == "left") c.window = WindowPlacement::left;
        else if (w == "centred" || w == "centered") c.window = WindowPlacement::centred;
        else throw ParameterError("unknown window placement '" + w + "'");
    }
    if (j.contains("direction")) c.direction = direction_from_string(j.at("direction").get<std::string>());
    c.time = j.value("time", c.time);
    if (j.contains("optimizer")) {
        nlohmann::json merged = c.optimizer;
        merged.update(j.at("optimizer"));
        c.optimizer = merged.get<ExtremizeOptions>();
    }
    if (j.contains("localization")) {
        nlohmann::json merged = c.localization;
        merged.update(j.at("localization"));
        c.localization = merged.get<LocalizationOptions>();
    }
    c.output_dir = j.value("output_dir", c.output_dir);
    c.threads = j.value("threads", c.threads);
}

inline void apply_config_file(ExperimentConfig& c, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("cannot parse config " + path.string() + ": " + e.what());
    }
    from_json(j, c);
}

// ---------------------------------------------------------------------------
// Time series
// ---------------------------------------------------------------------------

struct EntropyTrace {
    std::vector<double> times;
    std::vector<double> s_ent;  // empty when not requested
    std::vector<double> s_xe;
    std::vector<double> density_times;
    std::vector<std::vector<double>> densities;

    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
    [[nodiscard]] const std::vector<double>& series(EntropyKind k) const { return k == EntropyKind::entanglement ? s_ent : s_xe; }
};

/// Samples S_ent and/or S_xE along free evolution at t = 0, dt, 2 dt, ...
/// (round(t_max / dt) samples).
[[nodiscard]] inline EntropyTrace sample_trace(const LatticeModel& model, const StateVector& state, int width, double t_max,
                                               double dt, const std::vector<EntropyKind>& entropies, int density_every = 0) {
    if (!(dt > 0.0)) throw ParameterError("dt must be positive");
    const auto count = static_cast<std::size_t>(std::llround(t_max / dt));
    const bool want_ent = std::find(entropies.begin(), entropies.end(), EntropyKind::entanglement) != entropies.end();
    const bool want_xe = std::find(entropies.begin(), entropies.end(), EntropyKind::observational) != entropies.end();
    std::optional<Bipartition> cut;
    std::optional<SxeEvaluator> sxe;
    if (want_ent) cut.emplace(model.basis, width, 0);
    if (want_xe) sxe.emplace(model.spectrum, model.basis, make_uniform_partition(model.params.L, width));

    EntropyTrace trace;
    trace.times.reserve(count);
    if (want_ent) trace.s_ent.reserve(count);
    if (want_xe) trace.s_xe.reserve(count);
    const Eigen::Index n = model.spectrum.dim();
    Eigen::VectorXcd amps(n);
    for (std::size_t s = 0; s < count; ++s) {
        const double t = static_cast<double>(s) * dt;
        for (Eigen::Index k = 0; k < n; ++k) amps[k] = state.amps[k] * std::polar(1.0, -model.spectrum.energies[k] * t);
        trace.times.push_back(t);
        const bool keep_density = density_every > 0 && s % static_cast<std::size_t>(density_every) == 0;
        if (want_ent || keep_density) {
            const Eigen::VectorXcd fock = to_fock_basis(amps, model.spectrum);
            if (want_ent) trace.s_ent.push_back(entanglement_entropy(fock, *cut));
            if (keep_density) {
                trace.density_times.push_back(t);
                trace.densities.push_back(particle_density(fock, model.basis));
            }
        }
        if (want_xe) trace.s_xe.push_back(sxe->entropy(amps));
    }
    return trace;
}

/// Mean after discarding the leading `burn_in` fraction of samples.
[[nodiscard]] inline double trace_average(const std::vector<double>& xs, double burn_in = 0.01) {
    if (xs.empty()) return kNaN;
    const auto skip = std::min(static_cast<std::size_t>(std::floor(burn_in * static_cast<double>(xs.size()))), xs.size() - 1);
    double sum = 0.0;
    for (std::size_t i = skip; i < xs.size(); ++i) sum += xs[i];
    return sum / static_cast<double>(xs.size() - skip);
}

// ---------------------------------------------------------------------------
// Histograms and tail fits
// ---------------------------------------------------------------------------

struct Histogram {
    double lo = 0.0;
    double bin_width = 1.0;
    std::vector<std::uint64_t> counts;
    std::vector<double> probabilities;
    std::uint64_t total = 0;

    [[nodiscard]] double center(std::size_t b) const { return lo + (static_cast<double>(b) + 0.5) * bin_width; }
    [[nodiscard]] std::size_t mode() const {
        return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    }
};

/// Equal-width bins spanning [min, max] of the data.
[[nodiscard]] inline Histogram make_histogram(const std::vector<double>& xs, int bins) {
    if (bins < 1) throw ParameterError("bins must be at least 1");
    Histogram h;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    h.probabilities.assign(static_cast<std::size_t>(bins), 0.0);
    if (xs.empty()) return h;
    const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
    double lo = *mn, hi = *mx;
    if (hi - lo <= 0.0) {
        lo -= 0.5;
        hi += 0.5;
    }
    h.lo = lo;
    h.bin_width = (hi - lo) / bins;
    for (double x : xs) {
        auto b = static_cast<std::int64_t>(std::floor((x - lo) / h.bin_width));
        b = std::clamp<std::int64_t>(b, 0, bins - 1);
        ++h.counts[static_cast<std::size_t>(b)];
    }
    h.total = xs.size();
    for (std::size_t b = 0; b < h.counts.size(); ++b)
        h.probabilities[b] = static_cast<double>(h.counts[b]) / static_cast<double>(h.total);
    return h;
}

struct TailFit {
    double slope = kNaN;      // d ln p / d(depth below the mode)
    double intercept = kNaN;
    double r_squared = kNaN;
    int bins_used = 0;
    [[nodiscard]] bool valid() const { return bins_used >= 3 && std::isfinite(slope); }
};

/// Count-weighted least squares of ln p against depth = center(mode) - center(b)
/// over the left tail: bins below the mode with at least `min_count` samples
/// and at most `core_fraction` of the mode's count. The default 0.5 leaves out
/// the core above half maximum; 1.0 fits every bin below the mode.
/// Exponential suppression of low values shows up as a negative slope.
[[nodiscard]] inline TailFit fit_left_tail(const Histogram& h, std::uint64_t min_count = 5, double core_fraction = 0.5) {
    TailFit fit;
    if (h.total == 0) return fit;
    const std::size_t mode = h.mode();
    const double ceiling = core_fraction * static_cast<double>(h.counts[mode]);
    std::vector<double> x, y, w;
    for (std::size_t b = 0; b < mode; ++b) {
        if (h.counts[b] < min_count || static_cast<double>(h.counts[b]) > ceiling) continue;
        x.push_back(h.center(mode) - h.center(b));
        y.push_back(std::log(h.probabilities[b]));
        w.push_back(static_cast<double>(h.counts[b]));
    }
    fit.bins_used = static_cast<int>(x.size());
    if (x.size() < 3) return fit;
    double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
    }
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += w[i] * (x[i] - mx) * (x[i] - mx);
        sxy += w[i] * (x[i] - mx) * (y[i] - my);
        syy += w[i] * (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0) return fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += w[i] * r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

// ---------------------------------------------------------------------------
// Shared pieces
// ---------------------------------------------------------------------------

[[nodiscard]] inline LatticeParams params_for(const ExperimentConfig& cfg, int L) {
    LatticeParams p = cfg.lattice;
    p.L = L;
    return p;
}

/// Solves every distinct lattice once, in parallel.
[[nodiscard]] inline std::vector<LatticeModel> solve_all(const std::vector<LatticeParams>& params, unsigned threads) {
    std::vector<std::optional<LatticeModel>> slots(params.size());
    parallel_for(params.size(), threads, [&](std::size_t i) { slots[i] = solve_lattice(params[i]); });
    std::vector<LatticeModel> out;
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

[[nodiscard]] inline std::size_t arg_extreme(const std::vector<double>& xs, bool largest) {
    if (xs.empty()) return 0;
    const auto it = largest ? std::max_element(xs.begin(), xs.end()) : std::min_element(xs.begin(), xs.end());
    return static_cast<std::size_t>(it - xs.begin());
}

/// Optimizer options with the trace's own extreme time added as a start, so
/// the optimum can never be worse than what sampling already found.
[[nodiscard]] inline ExtremizeOptions seeded_options(const ExtremizeOptions& base, const EntropyTrace& trace, EntropyKind kind,
                                                     Direction direction) {
    ExtremizeOptions opts = base;
    const auto& xs = trace.series(kind);
    if (!xs.empty()) opts.start_times.push_back(trace.times[arg_extreme(xs, direction == Direction::maximize)]);
    return opts;
}

struct Extremes {
    double min = kNaN;
    double ave = kNaN;
    double max = kNaN;
    std::optional<ExtremizationResult> argmin;
    std::optional<ExtremizationResult> argmax;
};

/// min/ave/max of one entropy for one state: ave from the trace, min/max from
/// the optimizer when `extrema` is set and otherwise from the trace.
[[nodiscard]] inline Extremes entropy_extremes(const LatticeModel& model, const StateVector& state, const EntropyTrace& trace,
                                               EntropyKind kind, const ExperimentConfig& cfg) {
    Extremes e;
    const auto& xs = trace.series(kind);
    e.ave = trace_average(xs);
    if (!xs.empty()) {
        e.min = *std::min_element(xs.begin(), xs.end());
        e.max = *std::max_element(xs.begin(), xs.end());
    }
    if (cfg.extrema) {
        const EntropyFunctional functional(model, kind, cfg.width);
        e.argmin = extremize_entropy(state, model.spectrum, functional, Direction::minimize,
                                     seeded_options(cfg.optimizer, trace, kind, Direction::minimize));
        e.argmax = extremize_entropy(state, model.spectrum, functional, Direction::maximize,
                                     seeded_options(cfg.optimizer, trace, kind, Direction::maximize));
        e.min = e.argmin->value;
        e.max = e.argmax->value;
    }
    return e;
}

[[nodiscard]] inline double region_occupancy(const std::vector<double>& density, int first, int width) {
    double s = 0.0;
    for (int i = first; i < first + width && i < static_cast<int>(density.size()); ++i) s += density[static_cast<std::size_t>(i)];
    return s;
}

/// Largest summed density over the regions of a uniform partition.
[[nodiscard]] inline double max_region_occupancy(const std::vector<double>& density, int width) {
    double best = 0.0;
    for (int first = 0; first < static_cast<int>(density.size()); first += width)
        best = std::max(best, region_occupancy(density, first, width));
    return best;
}

// ---------------------------------------------------------------------------
// Histogram experiment
// ---------------------------------------------------------------------------

struct EntropyHistogram {
    EntropyKind kind = EntropyKind::entanglement;
    Histogram histogram;
    TailFit fit;
    Extremes extremes;
};

struct DensitySnapshot {
    std::string label;
    double time = kNaN;  // NaN for optimized states
    double entropy = kNaN;
    std::vector<double> density;
};

struct HistogramResult {
    LatticeParams params;
    double beta = 0.0;
    StateVector state;
    EntropyTrace trace;
    std::vector<EntropyHistogram> entropies;
    std::vector<DensitySnapshot> snapshots;
    double s_th_subsystem = 0.0;
    double s_th_full = 0.0;
    std::vector<std::string> warnings;
};

[[nodiscard]] inline HistogramResult run_histogram(const ExperimentConfig& cfg) {
    cfg.validate();
    HistogramResult out;
    out.params = cfg.lattice;
    out.beta = cfg.beta;
    const LatticeModel model = solve_lattice(cfg.lattice);
    out.state = sample_rpts(model.spectrum, cfg.beta, cfg.kinds.front(), cfg.seeds.front());
    out.trace = sample_trace(model, out.state, cfg.width, cfg.t_max, cfg.dt, cfg.entropies, cfg.density_every);
    out.s_th_full = canonical_entropy(model.spectrum, cfg.beta);
    out.s_th_subsystem = subsystem_thermal_entropy(cfg.lattice, cfg.width, cfg.beta);
    if (out.trace.size() < 1000)
        out.warnings.push_back("only " + std::to_string(out.trace.size()) + " samples; tail statistics will be poor");

    out.entropies.resize(cfg.entropies.size());
    parallel_for(cfg.entropies.size(), cfg.threads, [&](std::size_t i) {
        EntropyHistogram& h = out.entropies[i];
        h.kind = cfg.entropies[i];
        h.histogram = make_histogram(out.trace.series(h.kind), cfg.bins);
        h.fit = fit_left_tail(h.histogram);
        h.extremes = entropy_extremes(model, out.state, out.trace, h.kind, cfg);
    });

    auto at_time = [&](const std::string& label, std::size_t sample, double entropy) {
        const double t = out.trace.times[sample];
        const Eigen::VectorXcd fock = to_fock_basis(evolve(out.state, model.spectrum, t), model.spectrum);
        out.snapshots.push_back({label, t, entropy, particle_density(fock, model.basis)});
    };
    for (const auto& h : out.entropies) {
        const auto& xs = out.trace.series(h.kind);
        const std::string name = to_string(h.kind);
        if (xs.empty()) continue;
        const std::size_t lo = arg_extreme(xs, false), hi = arg_extreme(xs, true);
        std::size_t mid = 0;
        for (std::size_t s = 0; s < xs.size(); ++s)
            if (std::abs(xs[s] - h.extremes.ave) < std::abs(xs[mid] - h.extremes.ave)) mid = s;
        at_time("sample-min-" + name, lo, xs[lo]);
        at_time("sample-mean-" + name, mid, xs[mid]);
        at_time("sample-max-" + name, hi, xs[hi]);
        for (const auto* r : {h.extremes.argmin ? &*h.extremes.argmin : nullptr, h.extremes.argmax ? &*h.extremes.argmax : nullptr}) {
            if (r == nullptr) continue;
            const Eigen::VectorXcd fock = to_fock_basis(apply_phases(out.state, r->phi_star), model.spectrum);
            const std::string label = (r == &*h.extremes.argmin ? "optimal-min-" : "optimal-max-") + name;
            out.snapshots.push_back({label, kNaN, r->value, particle_density(fock, model.basis)});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sweeps over L or beta
// ---------------------------------------------------------------------------

struct SweepSample {
    double x = 0.0;  // L or beta
    std::uint64_t seed = 0;
    EntropyKind kind = EntropyKind::entanglement;
    Extremes extremes;
};

struct SweepRow {
    double x = 0.0;
    EntropyKind kind = EntropyKind::entanglement;
    double min_mean = kNaN, min_std = kNaN;
    double ave_mean = kNaN, ave_std = kNaN;
    double max_mean = kNaN, max_std = kNaN;
    double s_th_subsystem = kNaN;
    double s_th_full = kNaN;
    double volume_law = kNaN;     // only for size sweeps
    double max_ent_bound = kNaN;  // only for size sweeps
    int seeds = 0;
};

struct SweepResult {
    std::string axis;  // "L" or "beta"
    std::vector<SweepSample> samples;
    std::vector<SweepRow> rows;
};

namespace detail {

struct SweepPoint {
    std::size_t model;
    double x;
    double beta;
};

inline SweepResult run_sweep(const ExperimentConfig& cfg, const std::string& axis, const std::vector<LatticeModel>& models,
                             const std::vector<SweepPoint>& points) {
    struct Task {
        std::size_t point;
        std::uint64_t seed;
        EntropyKind kind;
    };
    std::vector<Task> tasks;
    for (std::size_t p = 0; p < points.size(); ++p)
        for (auto seed : cfg.seeds)
            for (auto kind : cfg.entropies) {
                const auto& params = models[points[p].model].params;
                if (kind == EntropyKind::observational && params.L % cfg.width != 0) continue;
                tasks.push_back({p, seed, kind});
            }

    SweepResult out;
    out.axis = axis;
    out.samples.resize(tasks.size());
    parallel_for(tasks.size(), cfg.threads, [&](std::size_t i) {
        const Task& task = tasks[i];
        const SweepPoint& point = points[task.point];
        const LatticeModel& model = models[point.model];
        const StateVector state = sample_rpts(model.spectrum, point.beta, cfg.kinds.front(), task.seed);
        const EntropyTrace trace = sample_trace(model, state, cfg.width, cfg.t_max, cfg.dt, {task.kind});
        out.samples[i] = {point.x, task.seed, task.kind, entropy_extremes(model, state, trace, task.kind, cfg)};
    });

    for (std::size_t p = 0; p < points.size(); ++p) {
        const LatticeModel& model = models[points[p].model];
        for (auto kind : cfg.entropies) {
            std::vector<double> mins, aves, maxs;
            for (std::size_t i = 0; i < tasks.size(); ++i) {
                if (tasks[i].point != p || tasks[i].kind != kind) continue;
                mins.push_back(out.samples[i].extremes.min);
                aves.push_back(out.samples[i].extremes.ave);
                maxs.push_back(out.samples[i].extremes.max);
            }
            if (aves.empty()) continue;
            SweepRow row;
            row.x = points[p].x;
            row.kind = kind;
            std::tie(row.min_mean, row.min_std) = mean_and_stddev(mins);
            std::tie(row.ave_mean, row.ave_std) = mean_and_stddev(aves);
            std::tie(row.max_mean, row.max_std) = mean_and_stddev(maxs);
            row.s_th_full = canonical_entropy(model.spectrum, points[p].beta);
            row.s_th_subsystem = subsystem_thermal_entropy(model.params, cfg.width, points[p].beta);
            row.seeds = static_cast<int>(aves.size());
            out.rows.push_back(row);
        }
    }
    return out;
}

}  // namespace detail

[[nodiscard]] inline SweepResult run_size_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<LatticeParams> params;
    for (int L : cfg.sizes) params.push_back(params_for(cfg, L));
    const auto models = solve_all(params, cfg.threads);
    std::vector<detail::SweepPoint> points;
    for (std::size_t i = 0; i < models.size(); ++i) points.push_back({i, static_cast<double>(cfg.sizes[i]), cfg.beta});
    SweepResult out = detail::run_sweep(cfg, "L", models, points);
    for (auto& row : out.rows) {
        const int L = static_cast<int>(row.x);
        row.volume_law = volume_law_prediction(row.s_th_full, cfg.width, L);
        row.max_ent_bound = max_entanglement_bound(L, cfg.width, cfg.lattice.num_particles);
    }
    return out;
}

[[nodiscard]] inline SweepResult run_beta_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::vector<LatticeModel> models{solve_lattice(cfg.lattice)};
    std::vector<detail::SweepPoint> points;
    for (double b : cfg.betas) points.push_back({0, b, b});
    return detail::run_sweep(cfg, "beta", models, points);
}

// ---------------------------------------------------------------------------
// Localized states
// ---------------------------------------------------------------------------

struct LocalizedSample {
    int L = 0;
    std::uint64_t seed = 0;
    double p_max = kNaN;
    double s_xe_loc = kNaN;
    double s_ent_loc = kNaN;
    double s_xe_min = kNaN;  // only with extrema
    double s_xe_max = kNaN;
    double s_th_full = kNaN;
    LocalizationPrediction prediction;
};

struct LocalizedRow {
    int L = 0;
    double p_max_mean = kNaN, p_max_std = kNaN;
    double s_xe_loc_mean = kNaN, s_xe_loc_std = kNaN;
    double s_ent_loc_mean = kNaN, s_ent_loc_std = kNaN;
    double s_xe_min_mean = kNaN, s_xe_max_mean = kNaN;
    double prediction_mean = kNaN, lower_bound_mean = kNaN;
    double s_th_full = kNaN;
    LocalizationWindow window;
    int seeds = 0;
};

struct LocalizedResult {
    std::vector<LocalizedSample> samples;
    std::vector<LocalizedRow> rows;
};

[[nodiscard]] inline int window_start(const ExperimentConfig& cfg, int L) {
    return cfg.window == WindowPlacement::left ? 0 : centred_window_start(L, cfg.width);
}

[[nodiscard]] inline LocalizedResult run_localized_entropy(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<LatticeParams> params;
    for (int L : cfg.sizes) params.push_back(params_for(cfg, L));
    const auto models = solve_all(params, cfg.threads);
    std::vector<LocalizationProjector> projectors;
    for (std::size_t i = 0; i < models.size(); ++i)
        projectors.push_back(localization_projector(models[i].basis, window_start(cfg, cfg.sizes[i]), cfg.width));

    LocalizedResult out;
    out.samples.resize(models.size() * cfg.seeds.size());
    parallel_for(out.samples.size(), cfg.threads, [&](std::size_t i) {
        const std::size_t m = i / cfg.seeds.size();
        const auto seed = cfg.seeds[i % cfg.seeds.size()];
        const LatticeModel& model = models[m];
        const int L = cfg.sizes[m];
        LocalizedSample& s = out.samples[i];
        s.L = L;
        s.seed = seed;
        const StateVector state = sample_rpts(model.spectrum, cfg.beta, cfg.kinds.front(), seed);
        const ExtremizationResult loc = maximize_localization(state, model.spectrum, projectors[m], cfg.localization);
        const StateVector localized = apply_phases(state, loc.phi_star);
        s.p_max = loc.value;
        s.s_th_full = canonical_entropy(model.spectrum, cfg.beta);
        s.s_ent_loc = entanglement_entropy(to_fock_basis(localized, model.spectrum), Bipartition(model.basis, cfg.width, 0));
        if (L % cfg.width == 0) {
            const EntropyFunctional sxe(model, EntropyKind::observational, cfg.width);
            s.s_xe_loc = sxe(localized.amps);
            if (cfg.extrema) {
                s.s_xe_min = extremize_entropy(state, model.spectrum, sxe, Direction::minimize, cfg.optimizer).value;
                s.s_xe_max = extremize_entropy(state, model.spectrum, sxe, Direction::maximize, cfg.optimizer).value;
            }
        }
        s.prediction = s_xE_loc_prediction(s.s_th_full, s.p_max, L, cfg.width, cfg.lattice.num_particles);
    });

    for (std::size_t m = 0; m < models.size(); ++m) {
        std::vector<double> p, xe, ent, xmin, xmax, pred, lb;
        for (const auto& s : out.samples) {
            if (s.L != cfg.sizes[m]) continue;
            p.push_back(s.p_max);
            xe.push_back(s.s_xe_loc);
            ent.push_back(s.s_ent_loc);
            xmin.push_back(s.s_xe_min);
            xmax.push_back(s.s_xe_max);
            pred.push_back(s.prediction.value);
            lb.push_back(s.prediction.lower_bound);
        }
        LocalizedRow row;
        row.L = cfg.sizes[m];
        std::tie(row.p_max_mean, row.p_max_std) = mean_and_stddev(p);
        std::tie(row.s_xe_loc_mean, row.s_xe_loc_std) = mean_and_stddev(xe);
        std::tie(row.s_ent_loc_mean, row.s_ent_loc_std) = mean_and_stddev(ent);
        row.s_xe_min_mean = mean_and_stddev(xmin).first;
        row.s_xe_max_mean = mean_and_stddev(xmax).first;
        row.prediction_mean = mean_and_stddev(pred).first;
        row.lower_bound_mean = mean_and_stddev(lb).first;
        row.s_th_full = canonical_entropy(models[m].spectrum, cfg.beta);
        row.window = projectors[m].window;
        row.seeds = static_cast<int>(p.size());
        out.rows.push_back(row);
    }
    return out;
}

// ---------------------------------------------------------------------------
// P_max over temperature
// ---------------------------------------------------------------------------

[[nodiscard]] inline std::vector<PmaxRow> run_pmax_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<std::vector<PmaxRow>> per_size(cfg.sizes.size());
    parallel_for(cfg.sizes.size(), cfg.threads, [&](std::size_t i) {
        PmaxSweepConfig pc;
        pc.sizes = {cfg.sizes[i]};
        pc.betas = cfg.betas;
        pc.kinds = cfg.kinds;
        pc.seeds = cfg.seeds;
        pc.particles = cfg.lattice.num_particles;
        pc.window_width = cfg.width;
        pc.base = cfg.lattice;
        pc.localization = cfg.localization;
        per_size[i] = pmax_beta_sweep(pc);
    });
    std::vector<PmaxRow> rows;
    for (auto& v : per_size) rows.insert(rows.end(), v.begin(), v.end());
    return rows;
}

// ---------------------------------------------------------------------------
// Single extremization and density snapshots
// ---------------------------------------------------------------------------

struct SingleExtremization {
    EntropyKind kind = EntropyKind::entanglement;
    Direction direction = Direction::minimize;
    std::uint64_t seed = 0;
    ExtremizationResult result;
    std::vector<double> density;
};

[[nodiscard]] inline SingleExtremization run_extremize(const ExperimentConfig& cfg) {
    cfg.validate();
    const LatticeModel model = solve_lattice(cfg.lattice);
    const StateVector state = sample_rpts(model.spectrum, cfg.beta, cfg.kinds.front(), cfg.seeds.front());
    SingleExtremization out;
    out.kind = cfg.entropies.front();
    out.direction = cfg.direction;
    out.seed = cfg.seeds.front();
    out.result = extremize_entropy(state, model, out.kind, out.direction, cfg.width, cfg.optimizer);
    out.density = particle_density(to_fock_basis(apply_phases(state, out.result.phi_star), model.spectrum), model.basis);
    return out;
}

[[nodiscard]] inline std::vector<DensitySnapshot> run_density(const ExperimentConfig& cfg) {
    cfg.validate();
    const LatticeModel model = solve_lattice(cfg.lattice);
    std::vector<DensitySnapshot> out;
    for (auto seed : cfg.seeds) {
        const StateVector state = sample_rpts(model.spectrum, cfg.beta, cfg.kinds.front(), seed);
        const Eigen::VectorXcd fock = to_fock_basis(evolve(state, model.spectrum, cfg.time), model.spectrum);
        out.push_back({"seed-" + std::to_string(seed), cfg.time, kNaN, particle_density(fock, model.basis)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// ResultSet conversion
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline Table density_table(const std::vector<DensitySnapshot>& snapshots) {
    Table t{"density", {"label", "time", "entropy", "site", "density"}, {}};
    for (const auto& s : snapshots)
        for (std::size_t i = 0; i < s.density.size(); ++i)
            t.add_row({s.label, s.time, s.entropy, static_cast<std::int64_t>(i), s.density[i]});
    return t;
}

inline std::string table_name_for_plot(bool by_size, const std::string& entropy) {
    return std::string(by_size ? "size_sweep_" : "beta_sweep_") + entropy;
}

inline ResultSet make_results(const std::string& experiment, const ExperimentConfig& cfg) {
    ResultSet rs;
    rs.experiment = experiment;
    rs.config = cfg;
    return rs;
}

inline HeatMap density_map(const std::vector<DensitySnapshot>& snapshots, const std::string& title) {
    HeatMap h{"density", title, {}, {}};
    for (const auto& s : snapshots) {
        h.row_labels.push_back(s.label);
        h.rows.push_back(s.density);
    }
    return h;
}

}  // namespace detail

[[nodiscard]] inline ResultSet to_results(const HistogramResult& r, const ExperimentConfig& cfg) {
    ResultSet rs = detail::make_results("histogram", cfg);
    Table trace{"trace", {"t"}, {}};
    for (const auto& h : r.entropies) trace.columns.push_back("S_" + to_string(h.kind));
    for (std::size_t s = 0; s < r.trace.size(); ++s) {
        std::vector<Cell> row{r.trace.times[s]};
        for (const auto& h : r.entropies) row.emplace_back(r.trace.series(h.kind)[s]);
        trace.add_row(std::move(row));
    }
    rs.tables.push_back(std::move(trace));

    Table fits{"tail_fit", {"entropy", "slope", "intercept", "r_squared", "bins_used"}, {}};
    Table markers{"markers", {"entropy", "sample_min", "sample_max", "ave", "extremized_min", "extremized_max", "S_th_A", "S_th_AB"}, {}};
    nlohmann::json summary = nlohmann::json::object();
    for (const auto& h : r.entropies) {
        const std::string name = to_string(h.kind);
        Table hist{"histogram_" + name, {"bin_center", "count", "probability"}, {}};
        for (std::size_t b = 0; b < h.histogram.counts.size(); ++b)
            hist.add_row({h.histogram.center(b), static_cast<std::int64_t>(h.histogram.counts[b]), h.histogram.probabilities[b]});
        rs.tables.push_back(std::move(hist));
        fits.add_row({name, h.fit.slope, h.fit.intercept, h.fit.r_squared, static_cast<std::int64_t>(h.fit.bins_used)});
        const auto& xs = r.trace.series(h.kind);
        const double smin = xs.empty() ? kNaN : *std::min_element(xs.begin(), xs.end());
        const double smax = xs.empty() ? kNaN : *std::max_element(xs.begin(), xs.end());
        const double emin = h.extremes.argmin ? h.extremes.argmin->value : kNaN;
        const double emax = h.extremes.argmax ? h.extremes.argmax->value : kNaN;
        const double s_a = h.kind == EntropyKind::entanglement ? r.s_th_subsystem : kNaN;
        markers.add_row({name, smin, smax, h.extremes.ave, emin, emax, s_a, r.s_th_full});

        LinePlot plot{"histogram_" + name, "Probability histogram of S_" + name, "S_" + name, "probability", {}, true, true, {}};
        Series bars{"samples", {}, {}, {}, false};
        for (std::size_t b = 0; b < h.histogram.counts.size(); ++b) {
            bars.x.push_back(h.histogram.center(b));
            bars.y.push_back(h.histogram.probabilities[b]);
        }
        plot.series.push_back(std::move(bars));
        if (h.fit.valid()) {
            Series line{"left-tail fit", {}, {}, {}, true};
            const double mode_center = h.histogram.center(h.histogram.mode());
            for (std::size_t b = 0; b <= h.histogram.mode(); ++b) {
                const double depth = mode_center - h.histogram.center(b);
                line.x.push_back(h.histogram.center(b));
                line.y.push_back(std::exp(h.fit.intercept + h.fit.slope * depth));
            }
            plot.series.push_back(std::move(line));
        }
        if (std::isfinite(emin)) plot.markers.push_back({"min", emin});
        if (std::isfinite(emax)) plot.markers.push_back({"max", emax});
        plot.markers.push_back({"ave", h.extremes.ave});
        plot.markers.push_back({"S_th(A+B)", r.s_th_full});
        if (h.kind == EntropyKind::entanglement) plot.markers.push_back({"S_th(A)", r.s_th_subsystem});
        rs.plots.push_back(std::move(plot));

        summary[name] = {{"sample_min", detail::finite_or_null(smin)},
                         {"sample_max", detail::finite_or_null(smax)},
                         {"ave", detail::finite_or_null(h.extremes.ave)},
                         {"min", detail::finite_or_null(emin)},
                         {"max", detail::finite_or_null(emax)},
                         {"tail_slope", detail::finite_or_null(h.fit.slope)},
                         {"tail_r_squared", detail::finite_or_null(h.fit.r_squared)}};
        if (h.extremes.argmin) summary[name]["phi_star_min"] = h.extremes.argmin->phi_star.values();
        if (h.extremes.argmax) summary[name]["phi_star_max"] = h.extremes.argmax->phi_star.values();
    }
    rs.tables.push_back(std::move(fits));
    rs.tables.push_back(std::move(markers));
    rs.tables.push_back(detail::density_table(r.snapshots));
    rs.heat_maps.push_back(detail::density_map(r.snapshots, "Particle density"));
    summary["samples"] = r.trace.size();
    summary["S_th_A"] = r.s_th_subsystem;
    summary["S_th_AB"] = r.s_th_full;
    summary["warnings"] = r.warnings;
    rs.summary = std::move(summary);
    return rs;
}

[[nodiscard]] inline ResultSet to_results(const SweepResult& r, const ExperimentConfig& cfg) {
    const bool by_size = r.axis == "L";
    ResultSet rs = detail::make_results(by_size ? "sweep-size" : "sweep-beta", cfg);
    Table table{by_size ? "size_sweep" : "beta_sweep",
                {r.axis, "entropy", "min_mean", "min_std", "ave_mean", "ave_std", "max_mean", "max_std", "S_th_A", "S_th_AB"},
                {}};
    if (by_size) {
        table.columns.push_back("volume_law");
        table.columns.push_back("max_ent_bound");
    }
    table.columns.push_back("seeds");
    for (const auto& row : r.rows) {
        std::vector<Cell> cells{by_size ? Cell{static_cast<std::int64_t>(row.x)} : Cell{row.x}, to_string(row.kind),
                                row.min_mean, row.min_std, row.ave_mean, row.ave_std, row.max_mean, row.max_std,
                                row.s_th_subsystem, row.s_th_full};
        if (by_size) {
            cells.emplace_back(row.volume_law);
            cells.emplace_back(row.max_ent_bound);
        }
        cells.emplace_back(static_cast<std::int64_t>(row.seeds));
        table.add_row(std::move(cells));
    }
    Table per_seed{table.name + "_seeds", {r.axis, "seed", "entropy", "min", "ave", "max"}, {}};
    for (const auto& s : r.samples)
        per_seed.add_row({by_size ? Cell{static_cast<std::int64_t>(s.x)} : Cell{s.x}, static_cast<std::int64_t>(s.seed),
                          to_string(s.kind), s.extremes.min, s.extremes.ave, s.extremes.max});
    rs.tables.push_back(std::move(table));
    rs.tables.push_back(std::move(per_seed));

    for (EntropyKind kind : cfg.entropies) {
        const std::string name = to_string(kind);
        LinePlot plot{detail::table_name_for_plot(by_size, name), "S_" + name + (by_size ? " vs system size" : " vs inverse temperature"),
                      by_size ? "L" : "beta", "entropy", {}, false, false, {}};
        Series mins{"min", {}, {}, {}, false}, aves{"ave", {}, {}, {}, false}, maxs{"max", {}, {}, {}, false};
        Series sth_a{"S_th(A)", {}, {}, {}, true}, sth{"S_th(A+B)", {}, {}, {}, true}, vol{"volume law", {}, {}, {}, true};
        for (const auto& row : r.rows) {
            if (row.kind != kind) continue;
            for (auto* s : {&mins, &aves, &maxs, &sth_a, &sth, &vol}) s->x.push_back(row.x);
            mins.y.push_back(row.min_mean);
            mins.err.push_back(row.min_std);
            aves.y.push_back(row.ave_mean);
            aves.err.push_back(row.ave_std);
            maxs.y.push_back(row.max_mean);
            maxs.err.push_back(row.max_std);
            sth_a.y.push_back(row.s_th_subsystem);
            sth.y.push_back(row.s_th_full);
            vol.y.push_back(row.volume_law);
        }
        if (mins.x.empty()) continue;
        plot.series = {mins, aves, maxs, sth};
        if (kind == EntropyKind::entanglement) {
            plot.series.push_back(sth_a);
            if (by_size) plot.series.push_back(vol);
        }
        rs.plots.push_back(std::move(plot));
    }
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows)
        rows.push_back({{r.axis, row.x}, {"entropy", to_string(row.kind)}, {"min", detail::finite_or_null(row.min_mean)},
                        {"ave", detail::finite_or_null(row.ave_mean)}, {"max", detail::finite_or_null(row.max_mean)}});
    rs.summary["rows"] = std::move(rows);
    return rs;
}

[[nodiscard]] inline ResultSet to_results(const LocalizedResult& r, const ExperimentConfig& cfg) {
    ResultSet rs = detail::make_results("localize", cfg);
    Table table{"localized",
                {"L", "window_first", "window_width", "M", "N", "P_max_mean", "P_max_std", "S_xE_loc_mean", "S_xE_loc_std",
                 "S_ent_loc_mean", "S_ent_loc_std", "S_xE_min_mean", "S_xE_max_mean", "prediction_mean", "lower_bound_mean",
                 "S_th_AB", "seeds"},
                {}};
    for (const auto& row : r.rows)
        table.add_row({static_cast<std::int64_t>(row.L), static_cast<std::int64_t>(row.window.first_site),
                       static_cast<std::int64_t>(row.window.width), static_cast<std::int64_t>(row.window.subspace_dim),
                       static_cast<std::int64_t>(row.window.full_dim), row.p_max_mean, row.p_max_std, row.s_xe_loc_mean,
                       row.s_xe_loc_std, row.s_ent_loc_mean, row.s_ent_loc_std, row.s_xe_min_mean, row.s_xe_max_mean,
                       row.prediction_mean, row.lower_bound_mean, row.s_th_full, static_cast<std::int64_t>(row.seeds)});
    Table per_seed{"localized_seeds", {"L", "seed", "P_max", "S_xE_loc", "S_ent_loc", "S_xE_min", "S_xE_max", "prediction", "lower_bound"}, {}};
    for (const auto& s : r.samples)
        per_seed.add_row({static_cast<std::int64_t>(s.L), static_cast<std::int64_t>(s.seed), s.p_max, s.s_xe_loc, s.s_ent_loc,
                          s.s_xe_min, s.s_xe_max, s.prediction.value, s.prediction.lower_bound});
    rs.tables.push_back(std::move(table));
    rs.tables.push_back(std::move(per_seed));

    LinePlot plot{"localized", "Entropies of the localized state", "L", "entropy", {}, false, false, {}};
    Series xe{"S_xE(loc)", {}, {}, {}, false}, ent{"S_ent(loc)", {}, {}, {}, false}, pred{"prediction", {}, {}, {}, true},
        xmin{"S_xE(min)", {}, {}, {}, false};
    for (const auto& row : r.rows) {
        const double L = row.L;
        xe.x.push_back(L);
        xe.y.push_back(row.s_xe_loc_mean);
        xe.err.push_back(row.s_xe_loc_std);
        ent.x.push_back(L);
        ent.y.push_back(row.s_ent_loc_mean);
        ent.err.push_back(row.s_ent_loc_std);
        pred.x.push_back(L);
        pred.y.push_back(row.prediction_mean);
        if (std::isfinite(row.s_xe_min_mean)) {
            xmin.x.push_back(L);
            xmin.y.push_back(row.s_xe_min_mean);
        }
    }
    plot.series = {xe, ent, pred};
    if (!xmin.x.empty()) plot.series.push_back(xmin);
    rs.plots.push_back(std::move(plot));
    nlohmann::json pmax = nlohmann::json::array();
    for (const auto& row : r.rows) pmax.push_back({{"L", row.L}, {"P_max", row.p_max_mean}});
    rs.summary["P_max"] = std::move(pmax);
    return rs;
}

[[nodiscard]] inline ResultSet to_results(const std::vector<PmaxRow>& rows, const ExperimentConfig& cfg) {
    ResultSet rs = detail::make_results("pmax-sweep", cfg);
    Table table{"pmax_sweep", {"L", "beta", "sqrt_beta", "kind", "P_max_mean", "P_max_std", "samples", "M", "N", "dilute"}, {}};
    for (const auto& r : rows)
        table.add_row({static_cast<std::int64_t>(r.L), r.beta, std::sqrt(r.beta), to_string(r.kind), r.mean, r.stddev,
                       static_cast<std::int64_t>(r.samples), static_cast<std::int64_t>(r.window.subspace_dim),
                       static_cast<std::int64_t>(r.window.full_dim), static_cast<std::int64_t>(r.window.dilute())});
    rs.tables.push_back(std::move(table));
    LinePlot plot{"pmax_sweep", "Maximal localization probability", "sqrt(beta)", "P_max", {}, false, false, {}};
    std::map<std::pair<int, std::string>, Series> by_curve;
    for (const auto& r : rows) {
        auto& s = by_curve[{r.L, to_string(r.kind)}];
        s.name = "L=" + std::to_string(r.L) + " " + to_string(r.kind);
        s.dashed = r.kind == StateKind::real;
        s.x.push_back(std::sqrt(r.beta));
        s.y.push_back(r.mean);
        s.err.push_back(r.stddev);
    }
    for (auto& [_, s] : by_curve) plot.series.push_back(std::move(s));
    rs.plots.push_back(std::move(plot));
    return rs;
}

[[nodiscard]] inline ResultSet to_results(const SingleExtremization& r, const ExperimentConfig& cfg) {
    ResultSet rs = detail::make_results("extremize", cfg);
    rs.summary = {{"entropy", to_string(r.kind)},
                  {"direction", to_string(r.direction)},
                  {"seed", r.seed},
                  {"value", r.result.value},
                  {"phi_star", r.result.phi_star.values()},
                  {"scan_value", r.result.scan_value},
                  {"evaluations", r.result.evaluations},
                  {"restarts_used", r.result.restarts_used},
                  {"converged", r.result.converged}};
    std::vector<DensitySnapshot> snap{{to_string(r.direction) + "-" + to_string(r.kind), kNaN, r.result.value, r.density}};
    rs.tables.push_back(detail::density_table(snap));
    rs.heat_maps.push_back(detail::density_map(snap, "Particle density of the extremal state"));
    return rs;
}

[[nodiscard]] inline ResultSet to_results(const std::vector<DensitySnapshot>& snapshots, const ExperimentConfig& cfg) {
    ResultSet rs = detail::make_results("density", cfg);
    rs.tables.push_back(detail::density_table(snapshots));
    rs.heat_maps.push_back(detail::density_map(snapshots, "Particle density"));
    return rs;
}

}  // namespace lattice_entropy
