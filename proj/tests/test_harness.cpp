#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "lattice_entropy/harness.hpp"

using namespace lattice_entropy;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.lattice.L = 8;
    c.lattice.num_particles = 2;
    c.t_max = 200;
    c.dt = 0.5;
    c.bins = 20;
    c.density_every = 50;
    c.optimizer.optimizer.restarts = 1;
    c.optimizer.optimizer.max_evals = 3000;
    c.optimizer.scan_t_max = 100;
    c.threads = 2;
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("lattice_entropy_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST(Config, ValidationRules) {
    ExperimentConfig c;
    EXPECT_NO_THROW(c.validate());
    c.dt = 0.0;
    EXPECT_THROW(c.validate(), ParameterError);
    c = ExperimentConfig{};
    c.seeds = {1, 1};
    EXPECT_THROW(c.validate(), ParameterError);
    c = ExperimentConfig{};
    c.betas.clear();
    EXPECT_THROW(c.validate(), ParameterError);
}

TEST(Config, JsonRoundTripAndPartialOverride) {
    ExperimentConfig c = small_config();
    c.kinds = {StateKind::real};
    c.direction = Direction::maximize;
    const nlohmann::json j = c;
    ExperimentConfig back;
    from_json(j, back);
    EXPECT_EQ(nlohmann::json(back), j);

    ExperimentConfig d = small_config();
    from_json(nlohmann::json{{"beta", 0.7}, {"lattice", {{"L", 12}}}}, d);
    EXPECT_EQ(d.beta, 0.7);
    EXPECT_EQ(d.lattice.L, 12);
    EXPECT_EQ(d.lattice.num_particles, 2);
    EXPECT_THROW(from_json(nlohmann::json{{"bogus", 1}}, d), ParameterError);
}

TEST(Trace, LengthsAndBurnIn) {
    ExperimentConfig c = small_config();
    const LatticeModel m = solve_lattice(c.lattice);
    const StateVector s = sample_rpts(m.spectrum, 0.01, StateKind::complex, 1);
    const auto tr = sample_trace(m, s, 4, 100, 0.5, {EntropyKind::entanglement, EntropyKind::observational}, 10);
    EXPECT_EQ(tr.size(), 200u);
    EXPECT_EQ(tr.s_ent.size(), 200u);
    EXPECT_EQ(tr.s_xe.size(), 200u);
    EXPECT_EQ(tr.densities.size(), 20u);
    for (double x : tr.s_ent) EXPECT_TRUE(std::isfinite(x));
    EXPECT_DOUBLE_EQ(tr.times[3], 1.5);

    std::vector<double> xs(100, 1.0);
    xs[0] = 101.0;  // dropped as burn-in
    EXPECT_DOUBLE_EQ(trace_average(xs), 1.0);
}

TEST(Histogram, NormalizationAndMode) {
    std::vector<double> xs;
    NormalStream rng(5);
    for (int i = 0; i < 5000; ++i) xs.push_back(rng.normal());
    const Histogram h = make_histogram(xs, 100);
    EXPECT_NEAR(std::accumulate(h.probabilities.begin(), h.probabilities.end(), 0.0), 1.0, 1e-9);
    EXPECT_EQ(std::accumulate(h.counts.begin(), h.counts.end(), std::uint64_t{0}), 5000u);
    const Histogram flat = make_histogram(std::vector<double>(10, 2.0), 4);
    EXPECT_NEAR(std::accumulate(flat.probabilities.begin(), flat.probabilities.end(), 0.0), 1.0, 1e-12);
}

TEST(Histogram, TailFitRecoversExponential) {
    // Counts 2^k below the mode: ln p falls by ln 2 per bin of depth.
    Histogram h;
    h.lo = 0.0;
    h.bin_width = 1.0;
    for (int k = 0; k < 10; ++k) h.counts.push_back(std::uint64_t{8} << k);
    h.counts.push_back(1 << 20);
    h.total = std::accumulate(h.counts.begin(), h.counts.end(), std::uint64_t{0});
    for (auto c : h.counts) h.probabilities.push_back(static_cast<double>(c) / static_cast<double>(h.total));
    const TailFit fit = fit_left_tail(h);
    EXPECT_EQ(fit.bins_used, 10);
    EXPECT_NEAR(fit.slope, -std::log(2.0), 1e-12);
    EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
}

TEST(Histogram, TailFitSkipsCoreAndSparseBins) {
    Histogram h;
    h.bin_width = 1.0;
    h.counts = {2, 10, 20, 40, 80, 600, 900, 1000, 300};
    h.total = std::accumulate(h.counts.begin(), h.counts.end(), std::uint64_t{0});
    for (auto c : h.counts) h.probabilities.push_back(static_cast<double>(c) / static_cast<double>(h.total));
    const TailFit tail = fit_left_tail(h);
    EXPECT_EQ(tail.bins_used, 4);  // 10, 20, 40, 80
    EXPECT_NEAR(tail.slope, -std::log(2.0), 1e-12);
    EXPECT_EQ(fit_left_tail(h, 5, 1.0).bins_used, 6);
    EXPECT_FALSE(fit_left_tail(h, 5, 0.001).valid());
}

TEST(Drivers, HistogramMarkersBracketSamples) {
    ExperimentConfig c = small_config();
    const HistogramResult r = run_histogram(c);
    ASSERT_EQ(r.entropies.size(), 2u);
    EXPECT_FALSE(r.warnings.empty());  // 400 samples
    for (const auto& h : r.entropies) {
        const auto& xs = r.trace.series(h.kind);
        EXPECT_LE(h.extremes.min, *std::min_element(xs.begin(), xs.end()) + 1e-12);
        EXPECT_GE(h.extremes.max, *std::max_element(xs.begin(), xs.end()) - 1e-12);
        EXPECT_NEAR(std::accumulate(h.histogram.probabilities.begin(), h.histogram.probabilities.end(), 0.0), 1.0, 1e-9);
    }
    EXPECT_FALSE(r.snapshots.empty());
}

TEST(Drivers, SizeSweepShapeAndAverageConsistency) {
    ExperimentConfig c = small_config();
    c.sizes = {8, 12};
    c.seeds = {1, 2};
    c.extrema = false;
    const SweepResult r = run_size_sweep(c);
    EXPECT_EQ(r.rows.size(), 4u);  // one per (L, entropy)
    EXPECT_EQ(r.samples.size(), 8u);
    for (const auto& row : r.rows) {
        EXPECT_EQ(row.seeds, 2);
        EXPECT_LE(row.min_mean, row.ave_mean);
        EXPECT_LE(row.ave_mean, row.max_mean);
    }
    // the sweep's ave for (L=8, seed 1) is the histogram time-series mean
    ExperimentConfig hc = c;
    hc.seeds = {1};
    const HistogramResult h = run_histogram(hc);
    for (const auto& s : r.samples) {
        if (s.x == 8 && s.seed == 1) {
            EXPECT_DOUBLE_EQ(s.extremes.ave, trace_average(h.trace.series(s.kind)));
        }
    }

    const ResultSet rs = to_results(r, c);
    EXPECT_EQ(rs.tables.front().rows.size(), 4u);
}

TEST(Drivers, LocalizedAndPmax) {
    ExperimentConfig c = small_config();
    c.sizes = {8};
    c.seeds = {1};
    c.extrema = false;
    c.localization.ascent_restarts = 2;
    c.localization.polish.max_evals = 500;
    const LocalizedResult r = run_localized_entropy(c);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_GT(r.rows[0].p_max_mean, 0.5);
    EXPECT_TRUE(std::isfinite(r.rows[0].s_xe_loc_mean));

    ExperimentConfig p = c;
    p.lattice.num_particles = 3;
    p.width = 5;
    p.sizes = {10};
    p.betas = {0.01, 4.0};
    p.kinds = {StateKind::complex};
    p.window = WindowPlacement::centred;
    const auto rows = run_pmax_sweep(p);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_GT(rows[0].mean, rows[1].mean);
}

TEST(Output, EmptyTableIsHeaderOnly) {
    Table t{"empty", {"a", "b"}, {}};
    EXPECT_EQ(to_csv(t), "a,b\n");
    EXPECT_THROW(t.add_row({std::int64_t{1}}), DimensionError);
}

TEST(Output, NumberFormatting) {
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(format_number(1e-20), "1e-20");
    EXPECT_EQ(format_number(std::nan("")), "nan");
    EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
}

TEST(Output, GitBlobHash) {
    // `printf 'hello\n' | git hash-object --stdin`
    EXPECT_EQ(git_blob_hash("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
    EXPECT_EQ(git_blob_hash(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST(Output, RerunIsByteIdentical) {
    ExperimentConfig c = small_config();
    c.extrema = false;
    const auto a = scratch("rerun_a"), b = scratch("rerun_b");
    const auto files_a = emit_outputs(to_results(run_histogram(c), c), a, kRngAlgorithm, {true, true, true, true});
    const auto files_b = emit_outputs(to_results(run_histogram(c), c), b, kRngAlgorithm, {true, true, true, true});
    ASSERT_EQ(files_a.size(), files_b.size());
    for (std::size_t i = 0; i < files_a.size(); ++i) {
        EXPECT_EQ(files_a[i].filename(), files_b[i].filename());
        EXPECT_EQ(slurp(files_a[i]), slurp(files_b[i])) << files_a[i];
    }
    const auto summary = nlohmann::json::parse(slurp(a / "summary.json"));
    EXPECT_EQ(summary.at("schema_version").get<int>(), kSummarySchemaVersion);
    EXPECT_EQ(summary.at("rng_algorithm").get<std::string>(), std::string(kRngAlgorithm));
    EXPECT_EQ(summary.at("seeds"), nlohmann::json(c.seeds));
    EXPECT_EQ(summary.at("input_hash").get<std::string>(), git_blob_hash(nlohmann::json(c).dump()));
    EXPECT_TRUE(fs::exists(a / "histogram_ent.svg"));
    EXPECT_TRUE(fs::exists(a / "histogram_ent.gp"));
    EXPECT_TRUE(fs::exists(a / "density.svg"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Output, UnwritableDirectoryReportsPath) {
    const auto dir = scratch("blocker");
    fs::create_directories(dir);
    write_file(dir / "file", "x");
    try {
        (void)emit_outputs(ResultSet{}, dir / "file" / "sub", kRngAlgorithm);
        FAIL() << "expected IoError";
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("file"), std::string::npos);
    }
    fs::remove_all(dir);
}

TEST(Parallel, ResultsIndependentOfThreadCount) {
    std::vector<double> one(50), many(50);
    parallel_for(50, 1, [&](std::size_t i) { one[i] = std::sin(static_cast<double>(i)); });
    parallel_for(50, 4, [&](std::size_t i) { many[i] = std::sin(static_cast<double>(i)); });
    EXPECT_EQ(one, many);
    EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) { if (i == 7) throw ParameterError("boom"); }), ParameterError);
}
