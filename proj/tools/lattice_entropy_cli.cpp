// lattice-entropy: command-line driver for the experiment harness.
//
//   lattice-entropy histogram   --L 16 --beta 0.01 --seeds 1 --out runs/hist
//   lattice-entropy sweep-size  --sizes 8,12,16,20 --seeds 1,2,3,4,5,6
//   lattice-entropy sweep-beta  --betas 0.01,0.1,1,10
//   lattice-entropy localize    --sizes 8,12,16
//   lattice-entropy pmax-sweep  --sizes 10,20 --betas 0.01,1,4
//   lattice-entropy extremize   --entropies xE --direction min
//   lattice-entropy density     --time 100
//
// Every subcommand accepts --config FILE (JSON); keys present in the file win
// over flags.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lattice_entropy/harness.hpp"

namespace le = lattice_entropy;

namespace {

struct Command {
    le::ExperimentConfig cfg;
    std::vector<std::string> kinds;
    std::vector<std::string> entropies;
    std::string window;
    std::string direction;
    std::string config_file;
    bool no_extrema = false;
    bool gnuplot = false;
};

void add_flags(CLI::App* app, Command& c) {
    auto& cfg = c.cfg;
    for (auto k : cfg.kinds) c.kinds.push_back(le::to_string(k));
    for (auto e : cfg.entropies) c.entropies.push_back(le::to_string(e));
    c.window = cfg.window == le::WindowPlacement::left ? "left" : "centred";
    c.direction = le::to_string(cfg.direction);

    app->add_option("--L", cfg.lattice.L, "number of sites")->capture_default_str();
    app->add_option("--np", cfg.lattice.num_particles, "number of particles")->capture_default_str();
    app->add_option("--t", cfg.lattice.t, "nearest-neighbour hopping")->capture_default_str();
    app->add_option("--tprime", cfg.lattice.t_prime, "next-nearest-neighbour hopping")->capture_default_str();
    app->add_option("--V", cfg.lattice.V, "nearest-neighbour interaction")->capture_default_str();
    app->add_option("--Vprime", cfg.lattice.V_prime, "next-nearest-neighbour interaction")->capture_default_str();
    app->add_flag("--cut-hopping", cfg.lattice.cut_hopping, "drop hops across the cut at --cut-position");
    app->add_option("--cut-position", cfg.lattice.cut_position, "first site right of the cut")->capture_default_str();
    app->add_option("--beta", cfg.beta, "inverse temperature")->capture_default_str();
    app->add_option("--betas", cfg.betas, "inverse temperature grid")->delimiter(',')->capture_default_str();
    app->add_option("--sizes", cfg.sizes, "system size grid")->delimiter(',')->capture_default_str();
    app->add_option("--width", cfg.width, "subsystem, region or window width")->capture_default_str();
    app->add_option("--seeds", cfg.seeds, "state seeds")->delimiter(',')->capture_default_str();
    app->add_option("--kinds", c.kinds, "state kinds (real, complex)")->delimiter(',')->capture_default_str();
    app->add_option("--entropies", c.entropies, "entropies (ent, xE)")->delimiter(',')->capture_default_str();
    app->add_option("--t-max", cfg.t_max, "time series length")->capture_default_str();
    app->add_option("--dt", cfg.dt, "time step")->capture_default_str();
    app->add_option("--bins", cfg.bins, "histogram bins")->capture_default_str();
    app->add_option("--density-every", cfg.density_every, "keep every n-th density sample")->capture_default_str();
    app->add_flag("--no-extrema", c.no_extrema, "skip the optimizer; min/max come from sampling");
    app->add_option("--window", c.window, "localization window placement (left, centred)")->capture_default_str();
    app->add_option("--direction", c.direction, "min or max")->capture_default_str();
    app->add_option("--time", cfg.time, "evolution time for density snapshots")->capture_default_str();
    app->add_option("--restarts", cfg.optimizer.optimizer.restarts, "simplex restarts")->capture_default_str();
    app->add_option("--max-evals", cfg.optimizer.optimizer.max_evals, "objective evaluations per restart")->capture_default_str();
    app->add_option("--tol-f", cfg.optimizer.optimizer.tol_f, "simplex convergence in value")->capture_default_str();
    app->add_option("--tol-x", cfg.optimizer.optimizer.tol_x, "simplex convergence in phase")->capture_default_str();
    app->add_option("--opt-seed", cfg.optimizer.optimizer.seed, "seed for random restarts")->capture_default_str();
    app->add_option("--scan-t-max", cfg.optimizer.scan_t_max, "length of the time pre-scan")->capture_default_str();
    app->add_option("--ascent-restarts", cfg.localization.ascent_restarts, "phase-alignment restarts")->capture_default_str();
    app->add_option("--out", cfg.output_dir, "output directory")->capture_default_str();
    app->add_option("--threads", cfg.threads, "worker threads (0 = all cores)")->capture_default_str();
    app->add_flag("--gnuplot", c.gnuplot, "also write gnuplot scripts");
    app->add_option("--config", c.config_file, "JSON config; its keys override flags")->check(CLI::ExistingFile);
}

void finalize(Command& c) {
    auto& cfg = c.cfg;
    cfg.kinds.clear();
    for (const auto& k : c.kinds) cfg.kinds.push_back(le::state_kind_from_string(k));
    cfg.entropies.clear();
    for (const auto& e : c.entropies) cfg.entropies.push_back(le::entropy_kind_from_string(e));
    if (c.window == "left") cfg.window = le::WindowPlacement::left;
    else if (c.window == "centred" || c.window == "centered") cfg.window = le::WindowPlacement::centred;
    else throw le::ParameterError("unknown window placement '" + c.window + "'");
    cfg.direction = le::direction_from_string(c.direction);
    if (c.no_extrema) cfg.extrema = false;
    if (!c.config_file.empty()) le::apply_config_file(cfg, c.config_file);
    cfg.validate();
}

le::ResultSet run(const le::ExperimentConfig& cfg) {
    const std::string& e = cfg.experiment;
    if (e == "histogram") {
        auto r = le::run_histogram(cfg);
        for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
        for (const auto& h : r.entropies)
            std::printf("S_%s: ave=%.6f min=%.6f max=%.6f tail slope=%.4f R2=%.4f\n", le::to_string(h.kind).c_str(),
                        h.extremes.ave, h.extremes.min, h.extremes.max, h.fit.slope, h.fit.r_squared);
        return le::to_results(r, cfg);
    }
    if (e == "sweep-size" || e == "sweep-beta") {
        auto r = e == "sweep-size" ? le::run_size_sweep(cfg) : le::run_beta_sweep(cfg);
        for (const auto& row : r.rows)
            std::printf("%s=%g S_%s: min=%.4f ave=%.4f max=%.4f S_th(A)=%.4f S_th(A+B)=%.4f\n", r.axis.c_str(), row.x,
                        le::to_string(row.kind).c_str(), row.min_mean, row.ave_mean, row.max_mean, row.s_th_subsystem,
                        row.s_th_full);
        return le::to_results(r, cfg);
    }
    if (e == "localize") {
        auto r = le::run_localized_entropy(cfg);
        for (const auto& row : r.rows)
            std::printf("L=%d P_max=%.4f S_xE(loc)=%.4f S_ent(loc)=%.4f prediction=%.4f\n", row.L, row.p_max_mean,
                        row.s_xe_loc_mean, row.s_ent_loc_mean, row.prediction_mean);
        return le::to_results(r, cfg);
    }
    if (e == "pmax-sweep") {
        auto rows = le::run_pmax_sweep(cfg);
        for (const auto& row : rows)
            std::printf("L=%d beta=%g %s P_max=%.4f +- %.4f\n", row.L, row.beta, le::to_string(row.kind).c_str(), row.mean,
                        row.stddev);
        return le::to_results(rows, cfg);
    }
    if (e == "extremize") {
        auto r = le::run_extremize(cfg);
        std::printf("%s S_%s = %.9f (%lld evaluations, %.1f s)\n", le::to_string(r.direction).c_str(),
                    le::to_string(r.kind).c_str(), r.result.value, static_cast<long long>(r.result.evaluations),
                    r.result.wall_seconds);
        auto rs = le::to_results(r, cfg);
        nlohmann::json full = r.result;
        full["seed"] = r.seed;
        full["config"] = cfg;
        le::write_file(std::filesystem::path(cfg.output_dir) / "result.json", full.dump(2) + "\n");
        return rs;
    }
    if (e == "density") {
        auto snaps = le::run_density(cfg);
        for (const auto& s : snaps) {
            std::printf("%s:", s.label.c_str());
            for (double d : s.density) std::printf(" %.4f", d);
            std::printf("\n");
        }
        return le::to_results(snaps, cfg);
    }
    throw le::ParameterError("unknown experiment '" + e + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entropy fluctuations of random pure thermal states on a fermion chain"};
    app.require_subcommand(1);

    std::map<std::string, std::unique_ptr<Command>> commands;
    auto make = [&](const std::string& name) -> Command& {
        auto c = std::make_unique<Command>();
        c->cfg.experiment = name;
        auto& ref = *c;
        commands[name] = std::move(c);
        return ref;
    };
    auto seeds6 = std::vector<std::uint64_t>{1, 2, 3, 4, 5, 6};

    std::vector<std::pair<CLI::App*, Command*>> subs;
    auto sub = [&](const std::string& name, const std::string& help, auto setup) {
        Command& c = make(name);
        setup(c.cfg);
        CLI::App* s = app.add_subcommand(name, help);
        add_flags(s, c);
        subs.emplace_back(s, &c);
    };
    sub("histogram", "time series, histograms, tail fits and extremization markers", [](auto&) {});
    sub("sweep-size", "min/ave/max entropies against system size", [&](le::ExperimentConfig& c) { c.seeds = seeds6; });
    sub("sweep-beta", "min/ave/max entropies against inverse temperature", [&](le::ExperimentConfig& c) { c.seeds = seeds6; });
    sub("localize", "entropies of states with maximal localization probability", [&](le::ExperimentConfig& c) {
        c.seeds = seeds6;
        c.extrema = false;
    });
    sub("pmax-sweep", "maximal localization probability against temperature", [&](le::ExperimentConfig& c) {
        c.seeds = seeds6;
        c.lattice.num_particles = 3;
        c.width = 5;
        c.sizes = {10, 20, 30};
        c.betas = {0.01, 0.25, 1.0, 2.25, 4.0, 6.25};
        c.kinds = {le::StateKind::real, le::StateKind::complex};
        c.window = le::WindowPlacement::centred;
    });
    sub("extremize", "extremize one entropy for one state", [](le::ExperimentConfig& c) { c.entropies = {le::EntropyKind::entanglement}; });
    sub("density", "particle density of evolved states", [](auto&) {});

    CLI11_PARSE(app, argc, argv);

    try {
        for (auto [s, c] : subs) {
            if (!s->parsed()) continue;
            finalize(*c);
            const auto t0 = std::chrono::steady_clock::now();
            const le::ResultSet results = run(c->cfg);
            le::EmitOptions emit;
            emit.gnuplot = c->gnuplot;
            const auto files = le::emit_outputs(results, c->cfg.output_dir, le::kRngAlgorithm, emit);
            const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            le::write_file(std::filesystem::path(c->cfg.output_dir) / "timing.json",
                           nlohmann::json{{"wall_seconds", seconds}}.dump() + "\n");
            std::printf("wrote %zu files to %s (%.1f s)\n", files.size() + 1, c->cfg.output_dir.c_str(), seconds);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
