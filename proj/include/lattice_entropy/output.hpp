#pragma once

// Result tables, plots and their serialization: CSV with 12 significant
// digits, a versioned JSON summary, standalone SVG figures and gnuplot
// scripts with inline data.

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "lattice_entropy/error.hpp"

namespace lattice_entropy {

inline constexpr int kSummarySchemaVersion = 1;

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row) {
        if (row.size() != columns.size()) throw DimensionError("row width differs from table '" + name + "'");
        rows.push_back(std::move(row));
    }
};

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> err;  // optional symmetric error bars
    bool dashed = false;
};

struct LinePlot {
    std::string name;
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    bool log_y = false;
    bool bars = false;  // draw the first series as a histogram
    std::vector<std::pair<std::string, double>> markers;  // vertical lines
};

struct HeatMap {
    std::string name;
    std::string title;
    std::vector<std::string> row_labels;
    std::vector<std::vector<double>> rows;  // values in [0, 1]
};

struct ResultSet {
    std::string experiment;
    nlohmann::json config;
    nlohmann::json summary = nlohmann::json::object();
    std::vector<Table> tables;
    std::vector<LinePlot> plots;
    std::vector<HeatMap> heat_maps;
};

[[nodiscard]] inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

[[nodiscard]] inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

[[nodiscard]] inline std::string to_csv(const Table& table) {
    std::ostringstream os;
    for (std::size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << csv_escape(table.columns[c]);
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) os << ',';
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>) os << format_number(v);
                    else if constexpr (std::is_same_v<T, std::string>) os << csv_escape(v);
                    else os << v;
                },
                row[c]);
        }
        os << '\n';
    }
    return os.str();
}

/// git-style object hash: SHA-1 of "blob <size>\0<content>", lowercase hex.
[[nodiscard]] inline std::string git_blob_hash(const std::string& content) {
    const std::string header = "blob " + std::to_string(content.size()) + '\0';
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr) throw Error("cannot allocate digest context");
    const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                    EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                    EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                    EVP_DigestFinal_ex(ctx, digest, &length) == 1;
    EVP_MD_CTX_free(ctx);
    if (!ok) throw Error("SHA-1 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

namespace detail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline const char* palette(std::size_t i) {
    static constexpr const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    return colors[i % 8];
}

}  // namespace detail

[[nodiscard]] inline std::string render_svg(const LinePlot& plot) {
    constexpr double W = 640, H = 420, left = 70, right = 160, top = 40, bottom = 55;
    const double pw = W - left - right, ph = H - top - bottom;
    auto ty = [&](double y) { return plot.log_y ? (y > 0 ? std::log10(y) : std::numeric_limits<double>::quiet_NaN()) : y; };

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : plot.series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double e = i < s.err.size() ? s.err[i] : 0.0;
            const double lo = ty(s.y[i] - e), hi = ty(s.y[i] + e), mid = ty(s.y[i]);
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            for (double v : {lo, hi, mid})
                if (std::isfinite(v)) {
                    y0 = std::min(y0, v);
                    y1 = std::max(y1, v);
                }
        }
    for (const auto& [_, x] : plot.markers) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto sy = [&](double y) { return top + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << detail::xml_escape(plot.title) << "</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
        const double px = left + pw * k / 4.0, py = top + ph * (1.0 - k / 4.0);
        os << "<text x=\"" << px << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">" << format_number(std::round(xv * 1000) / 1000) << "</text>\n";
        const double label = plot.log_y ? std::pow(10.0, yv) : yv;
        char buf[32];
        std::snprintf(buf, sizeof buf, plot.log_y ? "%.1e" : "%.3g", label);
        os << "<text x=\"" << left - 6 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\">" << buf << "</text>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << detail::xml_escape(plot.x_label) << "</text>\n";
    os << "<text transform=\"translate(16," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << detail::xml_escape(plot.y_label) << "</text>\n";

    for (std::size_t si = 0; si < plot.series.size(); ++si) {
        const auto& s = plot.series[si];
        const char* color = detail::palette(si);
        if (plot.bars && si == 0 && s.x.size() > 1) {
            const double half = 0.5 * (s.x[1] - s.x[0]);
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(ty(s.y[i]))) continue;
                const double xa = sx(s.x[i] - half), xb = sx(s.x[i] + half), yb = sy(s.y[i]);
                os << "<rect x=\"" << xa << "\" y=\"" << yb << "\" width=\"" << std::max(xb - xa, 0.5) << "\" height=\"" << std::max(top + ph - yb, 0.0)
                   << "\" fill=\"" << color << "\" fill-opacity=\"0.6\"/>\n";
            }
        } else {
            os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                if (std::isfinite(ty(s.y[i]))) os << sx(s.x[i]) << ',' << sy(s.y[i]) << ' ';
            os << "\"/>\n";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(ty(s.y[i]))) continue;
                os << "<circle cx=\"" << sx(s.x[i]) << "\" cy=\"" << sy(s.y[i]) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
                if (i < s.err.size() && s.err[i] > 0)
                    os << "<line x1=\"" << sx(s.x[i]) << "\" x2=\"" << sx(s.x[i]) << "\" y1=\"" << sy(s.y[i] - s.err[i]) << "\" y2=\"" << sy(s.y[i] + s.err[i])
                       << "\" stroke=\"" << color << "\"/>\n";
            }
        }
        os << "<text x=\"" << left + pw + 10 << "\" y=\"" << top + 14 + 16 * si << "\" fill=\"" << color << "\">" << detail::xml_escape(s.name) << "</text>\n";
    }
    for (std::size_t mi = 0; mi < plot.markers.size(); ++mi) {
        const auto& [label, x] = plot.markers[mi];
        os << "<line x1=\"" << sx(x) << "\" x2=\"" << sx(x) << "\" y1=\"" << top << "\" y2=\"" << top + ph << "\" stroke=\"" << detail::palette(mi + 3) << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << left + pw + 10 << "\" y=\"" << top + 14 + 16 * (plot.series.size() + mi) << "\" fill=\"" << detail::palette(mi + 3) << "\">"
           << detail::xml_escape(label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

[[nodiscard]] inline std::string render_svg(const HeatMap& map) {
    std::size_t cols = 0;
    for (const auto& r : map.rows) cols = std::max(cols, r.size());
    const double cell = 24, left = 150, top = 40;
    const double W = left + cell * static_cast<double>(cols) + 20, H = top + cell * static_cast<double>(map.rows.size()) + 30;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << detail::xml_escape(map.title) << "</text>\n";
    for (std::size_t r = 0; r < map.rows.size(); ++r) {
        const double y = top + cell * static_cast<double>(r);
        os << "<text x=\"" << left - 8 << "\" y=\"" << y + cell * 0.65 << "\" text-anchor=\"end\">"
           << detail::xml_escape(r < map.row_labels.size() ? map.row_labels[r] : "") << "</text>\n";
        for (std::size_t c = 0; c < map.rows[r].size(); ++c) {
            const double v = std::clamp(map.rows[r][c], 0.0, 1.0);
            const int shade = static_cast<int>(std::lround(255.0 * (1.0 - v)));
            os << "<rect x=\"" << left + cell * static_cast<double>(c) << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
               << "\" fill=\"rgb(255," << shade << ',' << shade << ")\" stroke=\"#999\"/>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

[[nodiscard]] inline std::string render_gnuplot(const LinePlot& plot) {
    std::ostringstream os;
    os << "# gnuplot script\nset terminal pngcairo size 800,520\nset output '" << plot.name << ".png'\n";
    os << "set title \"" << plot.title << "\"\nset xlabel \"" << plot.x_label << "\"\nset ylabel \"" << plot.y_label << "\"\n";
    if (plot.log_y) os << "set logscale y\n";
    for (std::size_t si = 0; si < plot.series.size(); ++si) {
        const auto& s = plot.series[si];
        os << "$s" << si << " << EOD\n";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            os << format_number(s.x[i]) << ' ' << format_number(s.y[i]) << ' ' << format_number(i < s.err.size() ? s.err[i] : 0.0) << '\n';
        os << "EOD\n";
    }
    for (std::size_t mi = 0; mi < plot.markers.size(); ++mi)
        os << "set arrow from " << format_number(plot.markers[mi].second) << ", graph 0 to " << format_number(plot.markers[mi].second)
           << ", graph 1 nohead\n";
    os << "plot ";
    for (std::size_t si = 0; si < plot.series.size(); ++si) {
        const auto& s = plot.series[si];
        if (si) os << ", \\\n     ";
        const bool bars = plot.bars && si == 0;
        os << "$s" << si << (bars ? " using 1:2 with boxes" : (s.err.empty() ? " using 1:2 with linespoints" : " using 1:2:3 with yerrorlines"))
           << " title \"" << s.name << "\"";
    }
    os << '\n';
    return os.str();
}

struct EmitOptions {
    bool csv = true;
    bool json = true;
    bool svg = true;
    bool gnuplot = false;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing " + path.string());
}

/// Summary document: deterministic for a given result set.
[[nodiscard]] inline nlohmann::json summary_json(const ResultSet& results, std::string_view rng_algorithm) {
    const std::string config_text = results.config.dump();
    nlohmann::json tables = nlohmann::json::array();
    for (const auto& t : results.tables) tables.push_back({{"name", t.name}, {"file", t.name + ".csv"}, {"rows", t.rows.size()}});
    return nlohmann::json{{"schema_version", kSummarySchemaVersion},
                          {"experiment", results.experiment},
                          {"config", results.config},
                          {"seeds", results.config.value("seeds", nlohmann::json::array())},
                          {"rng_algorithm", std::string(rng_algorithm)},
                          {"input_hash", git_blob_hash(config_text)},
                          {"tables", std::move(tables)},
                          {"results", results.summary}};
}

/// Writes every table, plot and the summary under `dir`; returns the paths written.
inline std::vector<std::filesystem::path> emit_outputs(const ResultSet& results, const std::filesystem::path& dir,
                                                       std::string_view rng_algorithm, const EmitOptions& opts = {}) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> written;
    auto put = [&](const std::filesystem::path& p, const std::string& content) {
        write_file(p, content);
        written.push_back(p);
    };
    if (opts.csv)
        for (const auto& t : results.tables) put(dir / (t.name + ".csv"), to_csv(t));
    if (opts.json) put(dir / "summary.json", summary_json(results, rng_algorithm).dump(2) + "\n");
    if (opts.svg) {
        for (const auto& p : results.plots) put(dir / (p.name + ".svg"), render_svg(p));
        for (const auto& h : results.heat_maps) put(dir / (h.name + ".svg"), render_svg(h));
    }
    if (opts.gnuplot)
        for (const auto& p : results.plots) put(dir / (p.name + ".gp"), render_gnuplot(p));
    return written;
}

}  // namespace lattice_entropy
