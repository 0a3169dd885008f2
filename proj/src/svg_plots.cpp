#include "emspec/svg_plots.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

#include "emspec/csv.hpp"
#include "emspec/errors.hpp"
#include "emspec/garch.hpp"
#include "emspec/indicators.hpp"
#include "emspec/mode_test.hpp"
#include "emspec/spectrum.hpp"

namespace emspec {

namespace {

namespace fs = std::filesystem;

constexpr double kWidth = 900.0;
constexpr double kPanelHeight = 190.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 34.0;
constexpr double kMarginBottom = 34.0;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
}

// Short numeric label for an axis tick.
std::string tick_label(double v) {
    const double a = std::abs(v);
    char buf[40];
    if (v == 0.0) return "0";
    if (a >= 1e5 || a < 1e-3) {
        std::snprintf(buf, sizeof(buf), "%.1e", v);
    } else if (a >= 100.0) {
        std::snprintf(buf, sizeof(buf), "%.0f", v);
    } else if (a >= 1.0) {
        std::snprintf(buf, sizeof(buf), "%.2f", v);
    } else {
        std::snprintf(buf, sizeof(buf), "%.4f", v);
    }
    return std::string(buf);
}

struct LinearScale {
    double d0 = 0.0, d1 = 1.0;  // data range
    double p0 = 0.0, p1 = 1.0;  // pixel range

    double operator()(double v) const { return p0 + (v - d0) / (d1 - d0) * (p1 - p0); }
};

LinearScale make_scale(double lo, double hi, double p0, double p1) {
    if (!(hi > lo)) {  // degenerate: widen symmetrically
        const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.5;
        lo -= pad;
        hi += pad;
    }
    return LinearScale{lo, hi, p0, p1};
}

// Tick positions at a 1/2/5 x 10^k step covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi, int target = 5) {
    std::vector<double> out;
    const double span = hi - lo;
    if (!(span > 0.0) || !std::isfinite(span)) return out;
    double step = std::pow(10.0, std::floor(std::log10(span / target)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (span / (step * m) <= target + 1) {
            step *= m;
            break;
        }
    }
    double t = std::ceil(lo / step) * step;
    for (; t <= hi + step * 1e-9; t += step) out.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
    return out;
}

struct Svg {
    std::string body;
    double height = 0.0;

    void rect(double x, double y, double w, double h, const char* fill,
              const char* extra = "") {
        body += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" + fmt(w) +
                "\" height=\"" + fmt(h) + "\" fill=\"" + fill + "\" " + extra + "/>\n";
    }
    void line(double x1, double y1, double x2, double y2, const char* stroke,
              const char* extra = "") {
        body += "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) +
                "\" y2=\"" + fmt(y2) + "\" stroke=\"" + stroke + "\" " + extra + "/>\n";
    }
    void text(double x, double y, const std::string& s, const char* extra = "") {
        std::string esc;
        for (char c : s) {
            if (c == '<') esc += "&lt;";
            else if (c == '>') esc += "&gt;";
            else if (c == '&') esc += "&amp;";
            else esc += c;
        }
        body += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" " + extra + ">" + esc +
                "</text>\n";
    }
    void polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                  const char* stroke) {
        body += "<polyline fill=\"none\" stroke=\"";
        body += stroke;
        body += "\" stroke-width=\"1.3\" points=\"";
        for (std::size_t i = 0; i < xs.size(); ++i) {
            body += fmt(xs[i]) + "," + fmt(ys[i]) + " ";
        }
        body += "\"/>\n";
    }
    void circle(double x, double y, double r, const char* fill) {
        body += "<circle cx=\"" + fmt(x) + "\" cy=\"" + fmt(y) + "\" r=\"" + fmt(r) +
                "\" fill=\"" + fill + "\"/>\n";
    }

    std::string finish() const {
        std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) +
                          "\" height=\"" + fmt(height) +
                          "\" font-family=\"sans-serif\" font-size=\"11\">\n";
        out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        out += body;
        out += "</svg>\n";
        return out;
    }
};

// One time-series panel: values against equally spaced observation index,
// tick labels from the date vector, optional horizontal threshold line and
// optional point markers (e.g. rejections).
struct PanelSeries {
    const std::vector<double>* values = nullptr;
    const char* color = "#2b6cb0";
};

void draw_time_panel(Svg& svg, double top, const std::string& title,
                     const std::vector<Date>& dates, const std::vector<PanelSeries>& series,
                     const std::optional<double>& threshold = std::nullopt,
                     const std::vector<std::size_t>& marked = {}) {
    const double x0 = kMarginLeft, x1 = kWidth - kMarginRight;
    const double y0 = top + kMarginTop, y1 = top + kPanelHeight - kMarginBottom;

    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& s : series) {
        for (double v : *s.values) {
            if (!std::isfinite(v)) continue;
            if (first) {
                lo = hi = v;
                first = false;
            } else {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    }
    if (threshold) {
        lo = std::min(lo, *threshold);
        hi = std::max(hi, *threshold);
    }
    LinearScale sx = make_scale(0.0, static_cast<double>(dates.size() - 1), x0, x1);
    LinearScale sy = make_scale(lo, hi, y1, y0);

    svg.text(x0, top + 18.0, title, "font-size=\"13\" font-weight=\"bold\" fill=\"#222\"");
    svg.line(x0, y1, x1, y1, "#444");
    svg.line(x0, y0, x0, y1, "#444");

    for (double t : nice_ticks(sy.d0, sy.d1)) {
        const double py = sy(t);
        svg.line(x0 - 4, py, x0, py, "#444");
        svg.line(x0, py, x1, py, "#eee");
        svg.text(x0 - 8, py + 3.5, tick_label(t), "text-anchor=\"end\" fill=\"#333\"");
    }
    const std::size_t n = dates.size();
    const std::size_t n_ticks = std::min<std::size_t>(6, n);
    for (std::size_t k = 0; k < n_ticks; ++k) {
        const std::size_t i = n_ticks == 1 ? 0 : k * (n - 1) / (n_ticks - 1);
        const double px = sx(static_cast<double>(i));
        svg.line(px, y1, px, y1 + 4, "#444");
        svg.text(px, y1 + 16, dates[i].to_string(), "text-anchor=\"middle\" fill=\"#333\"");
    }

    if (threshold) {
        const double py = sy(*threshold);
        svg.line(x0, py, x1, py, "#c53030", "stroke-dasharray=\"6 4\" stroke-width=\"1.2\"");
        svg.text(x1 - 4, py - 5, "threshold " + tick_label(*threshold),
                 "text-anchor=\"end\" fill=\"#c53030\"");
    }

    for (const auto& s : series) {
        std::vector<double> xs, ys;
        xs.reserve(n);
        ys.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = (*s.values)[i];
            if (!std::isfinite(v)) continue;
            xs.push_back(sx(static_cast<double>(i)));
            ys.push_back(sy(v));
        }
        svg.polyline(xs, ys, s.color);
    }
    for (std::size_t i : marked) {
        const double v = (*series.front().values)[i];
        if (!std::isfinite(v)) continue;
        svg.circle(sx(static_cast<double>(i)), sy(v), 3.2, "#c53030");
    }
    svg.height = std::max(svg.height, top + kPanelHeight);
}

std::string range_text(const PlotOptions& opt) {
    return "no rows in the requested date range" +
           (opt.from ? " from " + opt.from->to_string() : std::string()) +
           (opt.to ? " to " + opt.to->to_string() : std::string());
}

// Keeps rows whose date lies in [from, to]; an empty result is an error.
template <typename Keep>
void filter_range(const std::vector<Date>& dates, const PlotOptions& opt, const Keep& keep) {
    std::size_t kept = 0;
    for (std::size_t i = 0; i < dates.size(); ++i) {
        if (opt.from && dates[i] < *opt.from) continue;
        if (opt.to && *opt.to < dates[i]) continue;
        keep(i);
        ++kept;
    }
    if (kept == 0) throw InputError(range_text(opt));
}

std::string require_csv(const std::string& path, const char* producer) {
    if (!fs::exists(path)) {
        throw InputError("missing " + path + "; run `emspec " + producer + "` first");
    }
    return read_text_file(path);
}

std::string plots_dir(const PipelineConfig& config) {
    const std::string dir = (fs::path(config.output_dir) / "plots").generic_string();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create plot directory " + dir + ": " + ec.message());
    return dir;
}

std::vector<std::string> finish_plot(const PipelineConfig& config, const char* stage_name,
                                     const std::vector<std::pair<std::string, std::string>>& files,
                                     double seconds) {
    StageArtifacts stage;
    stage.name = stage_name;
    stage.seconds = seconds;
    stage.files = files;
    record_stage(config, stage);
    std::vector<std::string> paths;
    for (const auto& [path, hash] : files) paths.push_back(path);
    return paths;
}

}  // namespace

std::vector<std::string> plot_indicators(const PipelineConfig& config,
                                         const PlotOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    IndicatorSeries all =
        indicators_from_csv(require_csv(indicators_path(config), "indicators"),
                            indicators_path(config));

    std::vector<Date> dates;
    std::vector<double> r, mu, lmax;
    std::vector<double> lmin;
    bool any_lmin = false;
    filter_range(all.dates, options, [&](std::size_t i) {
        dates.push_back(all.dates[i]);
        r.push_back(all.r[i]);
        mu.push_back(all.mu[i]);
        lmax.push_back(all.lambda_max[i]);
        if (all.lambda_min[i]) {
            lmin.push_back(*all.lambda_min[i]);
            any_lmin = true;
        } else {
            lmin.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    });

    Svg svg;
    double top = 0.0;
    draw_time_panel(svg, top, "market return r(t)", dates, {{&r, "#2b6cb0"}});
    top += kPanelHeight;
    draw_time_panel(svg, top, "mean market correlation mu(t)", dates, {{&mu, "#2f855a"}});
    top += kPanelHeight;
    if (any_lmin) {
        draw_time_panel(svg, top, "smallest emerging eigenvalue lambda_min(t)", dates,
                        {{&lmin, "#6b46c1"}});
        top += kPanelHeight;
    }
    draw_time_panel(svg, top, "largest eigenvalue lambda_max(t)", dates, {{&lmax, "#c05621"}});

    const std::string path = (fs::path(plots_dir(config)) / "indicators.svg").generic_string();
    const std::string content = svg.finish();
    write_file_atomic(path, content);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return finish_plot(config, "plot-indicators", {{path, content_hash_hex(content)}}, secs);
}

std::vector<std::string> plot_outliers(const PipelineConfig& config, const PlotOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    OutlierSeries all = outliers_from_csv(require_csv(outliers_path(config), "outliers"),
                                          outliers_path(config));
    if (all.results.empty()) {
        throw InputError(outliers_path(config) +
                         " has no test results; every epoch was skipped (emerging sample "
                         "below the minimum)");
    }

    std::vector<Date> dates;
    for (const auto& res : all.results) dates.push_back(res.end_date);
    std::vector<Date> kept_dates;
    std::vector<double> nlp;
    std::vector<std::size_t> rejects;
    filter_range(dates, options, [&](std::size_t i) {
        kept_dates.push_back(all.results[i].end_date);
        nlp.push_back(all.results[i].neg_log10_p);
        if (all.results[i].reject) rejects.push_back(kept_dates.size() - 1);
    });

    Svg svg;
    draw_time_panel(svg, 0.0, "-log10 p of the lower-half unimodality test", kept_dates,
                    {{&nlp, "#2b6cb0"}}, -std::log10(config.level), rejects);

    const std::string path = (fs::path(plots_dir(config)) / "outliers.svg").generic_string();
    const std::string content = svg.finish();
    write_file_atomic(path, content);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return finish_plot(config, "plot-outliers", {{path, content_hash_hex(content)}}, secs);
}

std::vector<std::string> plot_garch(const PipelineConfig& config, const PlotOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const std::string text = require_csv(garch_paths_path(config), "garch-fit");

    // date,series_name,sigma rows grouped by series in file order.
    std::vector<std::string> names;
    std::vector<std::vector<Date>> dates;
    std::vector<std::vector<double>> sigmas;
    std::size_t pos = 0, line_no = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        const std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1) {
            if (split_csv_line(line) != std::vector<std::string>{"date", "series_name", "sigma"}) {
                throw InputError(garch_paths_path(config) + ": unexpected header '" + line + "'");
            }
            continue;
        }
        const auto cells = split_csv_line(line);
        if (cells.size() != 3) {
            throw InputError(garch_paths_path(config) + ":" + std::to_string(line_no) +
                             ": expected 3 cells");
        }
        const Date d = Date::parse(cells[0]);
        const double sigma = parse_double(cells[2], "sigma");
        auto it = std::find(names.begin(), names.end(), cells[1]);
        std::size_t gi;
        if (it == names.end()) {
            names.push_back(cells[1]);
            dates.emplace_back();
            sigmas.emplace_back();
            gi = names.size() - 1;
        } else {
            gi = static_cast<std::size_t>(it - names.begin());
        }
        dates[gi].push_back(d);
        sigmas[gi].push_back(sigma);
    }
    if (names.empty()) throw InputError(garch_paths_path(config) + " has no data rows");

    Svg svg;
    double top = 0.0;
    bool drew = false;
    for (std::size_t g = 0; g < names.size(); ++g) {
        std::vector<Date> kd;
        std::vector<double> ks;
        try {
            filter_range(dates[g], options, [&](std::size_t i) {
                kd.push_back(dates[g][i]);
                ks.push_back(sigmas[g][i]);
            });
        } catch (const InputError&) {
            continue;  // series entirely outside the range; maybe others remain
        }
        draw_time_panel(svg, top, "conditional volatility sigma(t): " + names[g], kd,
                        {{&ks, "#2b6cb0"}});
        top += kPanelHeight;
        drew = true;
    }
    if (!drew) throw InputError(range_text(options));

    const std::string path = (fs::path(plots_dir(config)) / "garch.svg").generic_string();
    const std::string content = svg.finish();
    write_file_atomic(path, content);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return finish_plot(config, "plot-garch", {{path, content_hash_hex(content)}}, secs);
}

std::vector<std::string> plot_spectra(const PipelineConfig& config, const PlotOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<SpectrumSplit> all =
        emerging_from_csv(require_csv(emerging_cache_path(config), "indicators"),
                          emerging_cache_path(config));

    std::vector<Date> dates;
    for (const auto& s : all) dates.push_back(s.end_date);
    std::vector<std::size_t> in_range;
    filter_range(dates, options, [&](std::size_t i) { in_range.push_back(i); });

    std::size_t pick = in_range.back();
    if (options.spectrum_date) {
        bool found = false;
        for (std::size_t i : in_range) {
            if (all[i].end_date == *options.spectrum_date) {
                pick = i;
                found = true;
                break;
            }
        }
        if (!found) {
            throw InputError("no epoch ends at " + options.spectrum_date->to_string() +
                             " (cached range " + all[in_range.front()].end_date.to_string() +
                             " .. " + all[in_range.back()].end_date.to_string() + ")");
        }
    }
    const SpectrumSplit& split = all[pick];
    if (split.emerging.empty()) {
        throw InputError("epoch " + split.end_date.to_string() +
                         " has no emerging spectrum (epoch length >= instrument count)");
    }
    const ShapeStats stats = spectrum_shape_stats(split, options.bins);

    Svg svg;
    const double x0 = kMarginLeft, x1 = kWidth - kMarginRight;
    const double y0 = kMarginTop, y1 = kPanelHeight * 1.4 - kMarginBottom;
    std::size_t max_count = 1;
    for (std::size_t c : stats.histogram) max_count = std::max(max_count, c);
    LinearScale sx = make_scale(stats.hist_lo, stats.hist_hi, x0, x1);
    LinearScale sy = make_scale(0.0, static_cast<double>(max_count), y1, y0);

    svg.text(x0, 18.0, "emerging spectrum, epoch ending " + split.end_date.to_string(),
             "font-size=\"13\" font-weight=\"bold\" fill=\"#222\"");
    svg.line(x0, y1, x1, y1, "#444");
    svg.line(x0, y0, x0, y1, "#444");
    for (double t : nice_ticks(0.0, static_cast<double>(max_count), 4)) {
        const double py = sy(t);
        svg.line(x0 - 4, py, x0, py, "#444");
        svg.text(x0 - 8, py + 3.5, tick_label(t), "text-anchor=\"end\" fill=\"#333\"");
    }
    for (double t : nice_ticks(sx.d0, sx.d1, 6)) {
        const double px = sx(t);
        svg.line(px, y1, px, y1 + 4, "#444");
        svg.text(px, y1 + 16, tick_label(t), "text-anchor=\"middle\" fill=\"#333\"");
    }
    const double bin_w = (stats.hist_hi - stats.hist_lo) / stats.histogram.size();
    for (std::size_t b = 0; b < stats.histogram.size(); ++b) {
        if (stats.histogram[b] == 0) continue;
        const double bx0 = sx(stats.hist_lo + b * bin_w);
        const double bx1 = sx(stats.hist_lo + (b + 1) * bin_w);
        const double by = sy(static_cast<double>(stats.histogram[b]));
        svg.rect(bx0, by, std::max(0.5, bx1 - bx0 - 0.6), y1 - by, "#6b46c1",
                 "fill-opacity=\"0.75\"");
    }
    svg.height = kPanelHeight * 1.4;

    if (options.mp_overlay) {
        // Null-model panel: the Marchenko-Pastur bulk density for Q = M/N.
        // Separate panel because the emerging scale is orders of magnitude
        // below the bulk support.
        const std::size_t n_instruments = split.emerging.size() + config.epoch_len - 1;
        const double q = static_cast<double>(config.epoch_len) / n_instruments;
        const MarchenkoPastur mp = marchenko_pastur(q, 1.0);
        const double p_top = svg.height;
        const double py0 = p_top + kMarginTop, py1 = p_top + kPanelHeight - kMarginBottom;
        const double mlo = std::max(0.0, mp.lambda_minus);
        LinearScale mx = make_scale(mlo, mp.lambda_plus, x0, x1);
        double dmax = 0.0;
        std::vector<double> lam, den;
        for (int i = 0; i <= 240; ++i) {
            const double l = mlo + (mp.lambda_plus - mlo) * i / 240.0;
            const double d = mp.density(l);
            lam.push_back(l);
            den.push_back(d);
            dmax = std::max(dmax, d);
        }
        LinearScale my = make_scale(0.0, dmax * 1.05, py1, py0);
        char qbuf[64];
        std::snprintf(qbuf, sizeof(qbuf), "Marchenko-Pastur null model, Q=%.3f", q);
        svg.text(x0, p_top + 18.0, qbuf, "font-size=\"13\" font-weight=\"bold\" fill=\"#222\"");
        svg.line(x0, py1, x1, py1, "#444");
        svg.line(x0, py0, x0, py1, "#444");
        for (double t : nice_ticks(mx.d0, mx.d1, 6)) {
            const double px = mx(t);
            svg.line(px, py1, px, py1 + 4, "#444");
            svg.text(px, py1 + 16, tick_label(t), "text-anchor=\"middle\" fill=\"#333\"");
        }
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < lam.size(); ++i) {
            xs.push_back(mx(lam[i]));
            ys.push_back(my(den[i]));
        }
        svg.polyline(xs, ys, "#2b6cb0");
        svg.height = p_top + kPanelHeight;
    }

    char namebuf[48];
    std::snprintf(namebuf, sizeof(namebuf), "spectrum_%08lld.svg",
                  static_cast<long long>(split.end_date.ordinal()));
    const std::string path = (fs::path(plots_dir(config)) / namebuf).generic_string();
    const std::string content = svg.finish();
    write_file_atomic(path, content);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return finish_plot(config, "plot-spectra", {{path, content_hash_hex(content)}}, secs);
}

}  // namespace emspec
