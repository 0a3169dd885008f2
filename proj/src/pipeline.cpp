#include "emspec/pipeline.hpp"

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "emspec/csv.hpp"
#include "emspec/errors.hpp"
#include "emspec/garch.hpp"
#include "emspec/indicators.hpp"
#include "emspec/mode_test.hpp"
#include "emspec/regression.hpp"
#include "emspec/version.hpp"

namespace emspec {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::size_t parse_size(const std::string& value, const std::string& key,
                       const std::string& origin) {
    std::size_t out = 0;
    const char* b = value.data();
    const char* e = b + value.size();
    auto res = std::from_chars(b, e, out);
    if (res.ec != std::errc{} || res.ptr != e) {
        throw InputError(origin + ": " + key + " expects a nonnegative integer, got \"" +
                         value + "\"");
    }
    return out;
}

std::uint64_t parse_u64(const std::string& value, const std::string& key,
                        const std::string& origin) {
    std::uint64_t out = 0;
    const char* b = value.data();
    const char* e = b + value.size();
    auto res = std::from_chars(b, e, out);
    if (res.ec != std::errc{} || res.ptr != e) {
        throw InputError(origin + ": " + key + " expects an unsigned integer, got \"" + value +
                         "\"");
    }
    return out;
}

bool parse_bool(const std::string& value, const std::string& key, const std::string& origin) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw InputError(origin + ": " + key + " expects true/false, got \"" + value + "\"");
}

double parse_real(const std::string& value, const std::string& key, const std::string& origin) {
    return parse_double(value, origin + ": " + key);
}

std::string join_path(const std::string& dir, const char* name) {
    return (fs::path(dir) / name).generic_string();
}

struct StageTimer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void ensure_output_dir(const PipelineConfig& config) {
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec) {
        throw InputError("cannot create output directory " + config.output_dir + ": " +
                         ec.message());
    }
}

void write_artifact(StageArtifacts& stage, const std::string& path, const std::string& content) {
    write_file_atomic(path, content);
    stage.files.emplace_back(path, content_hash_hex(content));
}

std::string read_input(StageArtifacts& stage, const std::string& path) {
    std::string text = read_text_file(path);
    stage.inputs.emplace_back(path, content_hash_hex(text));
    return text;
}

std::string require_cache(const std::string& path, const char* producer) {
    if (!fs::exists(path)) {
        throw InputError("missing " + path + "; run `emspec " + producer + "` first");
    }
    return read_text_file(path);
}

json config_json(const PipelineConfig& c) {
    json j;
    j["prices_path"] = c.prices_path;
    j["price_format"] = c.price_format;
    j["index_path"] = c.index_path;
    j["output_dir"] = c.output_dir;
    j["epoch_len"] = c.epoch_len;
    j["shift"] = c.shift;
    j["epsilon"] = c.epsilon;
    j["degenerate"] = c.degenerate;
    j["lags"] = c.lags;
    j["regression_window"] = c.regression_window;
    j["bootstrap"] = c.bootstrap;
    j["level"] = c.level;
    if (c.seed) {
        j["seed"] = *c.seed;
    } else {
        j["seed"] = nullptr;
    }
    j["min_outlier_sample"] = c.min_outlier_sample;
    j["alignment"] = c.alignment;
    j["max_gap"] = c.max_gap;
    j["garch_diff"] = c.garch_diff;
    return j;
}

// Merges this run's artifacts into the manifest: config echo, version,
// input/output hashes, and per-stage wall time. Keys are overwritten per
// stage, so rerunning a stage with unchanged inputs reproduces the hashes.
void update_manifest(const PipelineConfig& config, const std::vector<StageArtifacts>& stages) {
    json manifest;
    const std::string path = manifest_path(config);
    if (fs::exists(path)) {
        try {
            manifest = json::parse(read_text_file(path));
        } catch (const std::exception&) {
            manifest = json::object();  // corrupt manifest: rebuild from scratch
        }
    }
    manifest["version"] = EMSPEC_VERSION;
    manifest["config"] = config_json(config);
    if (!manifest.contains("inputs")) manifest["inputs"] = json::object();
    if (!manifest.contains("outputs")) manifest["outputs"] = json::object();
    if (!manifest.contains("stages")) manifest["stages"] = json::object();
    for (const auto& stage : stages) {
        json entry;
        entry["seconds"] = stage.seconds;
        json outs = json::array();
        for (const auto& [file, hash] : stage.files) {
            const std::string name = fs::path(file).filename().generic_string();
            manifest["outputs"][name] = hash;
            outs.push_back(name);
        }
        entry["outputs"] = outs;
        if (!stage.notes.empty()) entry["notes"] = stage.notes;
        manifest["stages"][stage.name] = entry;
        for (const auto& [file, hash] : stage.inputs) {
            manifest["inputs"][file] = hash;
        }
    }
    write_file_atomic(path, manifest.dump(2) + "\n");
}

}  // namespace

void PipelineConfig::validate() const {
    epoch_spec().validate();
    power_params().validate();
    price_format_enum();
    align_policy();
    degenerate_policy();
    if (lags < 1) throw InputError("lags must be at least 1");
    if (regression_window < lags + 10) {
        throw InputError("regression_window must be at least lags + 10");
    }
    if (bootstrap < 100) throw InputError("bootstrap must be at least 100");
    if (!(level > 0.0 && level < 1.0)) throw InputError("level must lie in (0,1)");
    if (min_outlier_sample < 8) throw InputError("min_outlier_sample must be at least 8");
}

PriceFormat PipelineConfig::price_format_enum() const {
    if (price_format == "wide") return PriceFormat::wide_csv;
    if (price_format == "long") return PriceFormat::long_csv;
    throw InputError("price_format must be wide or long, got \"" + price_format + "\"");
}

AlignPolicy PipelineConfig::align_policy() const {
    if (alignment == "forward_fill") return AlignPolicy::forward_fill(static_cast<int>(max_gap));
    if (alignment == "intersect") return AlignPolicy::intersect_dates();
    throw InputError("alignment must be forward_fill or intersect, got \"" + alignment + "\"");
}

DegeneratePolicy PipelineConfig::degenerate_policy() const {
    if (degenerate == "error") return DegeneratePolicy::error;
    if (degenerate == "drop") return DegeneratePolicy::drop;
    throw InputError("degenerate must be error or drop, got \"" + degenerate + "\"");
}

EpochSpec PipelineConfig::epoch_spec() const {
    return EpochSpec{epoch_len, shift};
}

PowerMapParams PipelineConfig::power_params() const {
    return PowerMapParams{epsilon};
}

void apply_config_value(PipelineConfig& config, const std::string& key, const std::string& value,
                        const std::string& origin) {
    if (key == "prices_path") {
        config.prices_path = value;
    } else if (key == "price_format") {
        config.price_format = value;
    } else if (key == "index_path") {
        config.index_path = value;
    } else if (key == "output_dir") {
        config.output_dir = value;
    } else if (key == "epoch_len") {
        config.epoch_len = parse_size(value, key, origin);
    } else if (key == "shift") {
        config.shift = parse_size(value, key, origin);
    } else if (key == "epsilon") {
        config.epsilon = parse_real(value, key, origin);
    } else if (key == "degenerate") {
        config.degenerate = value;
    } else if (key == "lags") {
        config.lags = parse_size(value, key, origin);
    } else if (key == "regression_window") {
        config.regression_window = parse_size(value, key, origin);
    } else if (key == "bootstrap") {
        config.bootstrap = parse_size(value, key, origin);
    } else if (key == "level") {
        config.level = parse_real(value, key, origin);
    } else if (key == "seed") {
        config.seed = parse_u64(value, key, origin);
    } else if (key == "min_outlier_sample") {
        config.min_outlier_sample = parse_size(value, key, origin);
    } else if (key == "alignment") {
        config.alignment = value;
    } else if (key == "max_gap") {
        config.max_gap = parse_size(value, key, origin);
    } else if (key == "garch_diff") {
        config.garch_diff = parse_bool(value, key, origin);
    } else {
        throw InputError(origin + ": unknown config key \"" + key + "\"");
    }
}

PipelineConfig parse_config(const std::string& text, const std::string& origin) {
    PipelineConfig config;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = trimmed(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::size_t eq = line.find('=');
        const std::string where = origin + ":" + std::to_string(line_no);
        if (eq == std::string::npos) {
            throw InputError(where + ": expected key=value, got \"" + line + "\"");
        }
        const std::string key = trimmed(line.substr(0, eq));
        const std::string value = trimmed(line.substr(eq + 1));
        if (key.empty()) throw InputError(where + ": empty config key");
        apply_config_value(config, key, value, where);
    }
    return config;
}

PipelineConfig load_config_file(const std::string& path) {
    return parse_config(read_text_file(path), path);
}

std::string config_to_kv(const PipelineConfig& c) {
    std::string out;
    auto kv = [&out](const char* key, const std::string& value) {
        out += key;
        out += '=';
        out += value;
        out += '\n';
    };
    kv("prices_path", c.prices_path);
    kv("price_format", c.price_format);
    kv("index_path", c.index_path);
    kv("output_dir", c.output_dir);
    kv("epoch_len", std::to_string(c.epoch_len));
    kv("shift", std::to_string(c.shift));
    kv("epsilon", format_double(c.epsilon));
    kv("degenerate", c.degenerate);
    kv("lags", std::to_string(c.lags));
    kv("regression_window", std::to_string(c.regression_window));
    kv("bootstrap", std::to_string(c.bootstrap));
    kv("level", format_double(c.level));
    if (c.seed) kv("seed", std::to_string(*c.seed));
    kv("min_outlier_sample", std::to_string(c.min_outlier_sample));
    kv("alignment", c.alignment);
    kv("max_gap", std::to_string(c.max_gap));
    kv("garch_diff", c.garch_diff ? "true" : "false");
    return out;
}

std::string returns_cache_path(const PipelineConfig& c) { return join_path(c.output_dir, "returns.csv"); }
std::string indicators_path(const PipelineConfig& c) { return join_path(c.output_dir, "indicators.csv"); }
std::string spectra_path(const PipelineConfig& c) { return join_path(c.output_dir, "spectra.csv"); }
std::string emerging_cache_path(const PipelineConfig& c) { return join_path(c.output_dir, "emerging.csv"); }
std::string outliers_path(const PipelineConfig& c) { return join_path(c.output_dir, "outliers.csv"); }
std::string regression_path(const PipelineConfig& c) { return join_path(c.output_dir, "regression.csv"); }
std::string garch_path(const PipelineConfig& c) { return join_path(c.output_dir, "garch.csv"); }
std::string garch_paths_path(const PipelineConfig& c) { return join_path(c.output_dir, "garch_paths.csv"); }
std::string alignment_report_path(const PipelineConfig& c) { return join_path(c.output_dir, "alignment_report.json"); }
std::string manifest_path(const PipelineConfig& c) { return join_path(c.output_dir, "manifest.json"); }

StageArtifacts run_ingest(const PipelineConfig& config) {
    config.validate();
    if (config.prices_path.empty()) throw InputError("prices_path is required");
    ensure_output_dir(config);
    StageTimer timer;
    StageArtifacts stage;
    stage.name = "ingest";

    const std::string raw = read_input(stage, config.prices_path);
    PricePanel loaded = parse_prices(raw, config.price_format_enum(), config.prices_path);
    AlignmentReport report;
    PricePanel aligned = align(loaded, config.align_policy(), &report);
    ReturnPanel returns = to_returns(aligned);

    write_artifact(stage, returns_cache_path(config), return_panel_to_csv(returns));
    write_artifact(stage, alignment_report_path(config), report.to_json());
    if (!report.dropped_tickers.empty()) {
        stage.notes.push_back("dropped " + std::to_string(report.dropped_tickers.size()) +
                              " instrument(s) during alignment");
    }
    if (report.filled_cells > 0) {
        stage.notes.push_back("forward-filled " + std::to_string(report.filled_cells) +
                              " cell(s)");
    }
    if (report.dropped_dates > 0) {
        stage.notes.push_back("dropped " + std::to_string(report.dropped_dates) +
                              " incomplete date(s)");
    }

    stage.seconds = timer.seconds();
    update_manifest(config, {stage});
    return stage;
}

StageArtifacts run_indicators(const PipelineConfig& config) {
    config.validate();
    ensure_output_dir(config);
    StageTimer timer;
    StageArtifacts stage;
    stage.name = "indicators";

    const std::string cache = require_cache(returns_cache_path(config), "ingest");
    stage.inputs.emplace_back(returns_cache_path(config), content_hash_hex(cache));
    ReturnPanel returns = return_panel_from_csv(cache, returns_cache_path(config));

    PricePanel index_panel;
    const PricePanel* index_ptr = nullptr;
    if (!config.index_path.empty()) {
        const std::string index_raw = read_input(stage, config.index_path);
        index_panel = parse_prices(index_raw, PriceFormat::wide_csv, config.index_path);
        index_ptr = &index_panel;
    }

    std::vector<SpectrumSplit> splits;
    IndicatorSeries series = build_indicators(returns, config.epoch_spec(),
                                              config.power_params(),
                                              config.degenerate_policy(), index_ptr, &splits);

    write_artifact(stage, indicators_path(config), indicators_to_csv(series));
    write_artifact(stage, spectra_path(config), spectra_to_csv(splits));
    write_artifact(stage, emerging_cache_path(config), emerging_to_csv(splits));

    std::size_t degenerate = 0, nonpositive = 0;
    for (const auto& flag : series.flags) {
        if (flag.find("degenerate_dropped") != std::string::npos) ++degenerate;
        if (flag.find("gap_nonpositive") != std::string::npos) ++nonpositive;
    }
    if (degenerate > 0) {
        stage.notes.push_back(std::to_string(degenerate) +
                              " epoch(s) dropped degenerate instruments");
    }
    if (nonpositive > 0) {
        stage.notes.push_back(std::to_string(nonpositive) +
                              " epoch(s) with nonpositive separation gap");
    }

    stage.seconds = timer.seconds();
    update_manifest(config, {stage});
    return stage;
}

StageArtifacts run_outliers(const PipelineConfig& config) {
    config.validate();
    if (!config.seed) throw InputError("seed is required for the outlier stage");
    ensure_output_dir(config);
    StageTimer timer;
    StageArtifacts stage;
    stage.name = "outliers";

    const std::string cache = require_cache(emerging_cache_path(config), "indicators");
    stage.inputs.emplace_back(emerging_cache_path(config), content_hash_hex(cache));
    std::vector<SpectrumSplit> splits = emerging_from_csv(cache, emerging_cache_path(config));

    OutlierParams params;
    params.bootstrap = config.bootstrap;
    params.level = config.level;
    params.seed = *config.seed;
    params.min_sample = config.min_outlier_sample;
    OutlierSeries series = outlier_series(splits, params);

    write_artifact(stage, outliers_path(config), outliers_to_csv(series));
    if (!series.skipped.empty()) {
        stage.notes.push_back(std::to_string(series.skipped.size()) + " epoch(s) skipped");
    }

    stage.seconds = timer.seconds();
    update_manifest(config, {stage});
    return stage;
}

StageArtifacts run_regress(const PipelineConfig& config) {
    config.validate();
    ensure_output_dir(config);
    StageTimer timer;
    StageArtifacts stage;
    stage.name = "regress";

    const std::string cache = require_cache(indicators_path(config), "indicators");
    stage.inputs.emplace_back(indicators_path(config), content_hash_hex(cache));
    IndicatorSeries series = indicators_from_csv(cache, indicators_path(config));

    std::vector<Date> dates;
    std::vector<double> mu;
    std::vector<double> lambda_min;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!series.lambda_min[i]) continue;
        dates.push_back(series.dates[i]);
        mu.push_back(series.mu[i]);
        lambda_min.push_back(*series.lambda_min[i]);
    }
    if (dates.empty()) {
        throw InputError(
            "indicators carry no emerging spectrum (epoch length >= instrument count); "
            "the lagged regression needs lambda_min");
    }

    RollingRegression rolling = rolling_t_series(dates, mu, lambda_min, config.lags,
                                                 config.regression_window);
    write_artifact(stage, regression_path(config), regression_to_csv(rolling));
    if (!rolling.skipped.empty()) {
        stage.notes.push_back(std::to_string(rolling.skipped.size()) + " window(s) skipped");
    }

    stage.seconds = timer.seconds();
    update_manifest(config, {stage});
    return stage;
}

StageArtifacts run_garch(const PipelineConfig& config) {
    config.validate();
    ensure_output_dir(config);
    StageTimer timer;
    StageArtifacts stage;
    stage.name = "garch";

    const std::string cache = require_cache(indicators_path(config), "indicators");
    stage.inputs.emplace_back(indicators_path(config), content_hash_hex(cache));
    IndicatorSeries series = indicators_from_csv(cache, indicators_path(config));

    std::vector<IndicatorVolatility> fits;
    fits.push_back(fit_indicator_volatility(series.dates, series.r, "market_return", false));
    fits.push_back(fit_indicator_volatility(series.dates, series.mu, "mean_correlation",
                                            config.garch_diff));

    write_artifact(stage, garch_path(config), garch_fits_to_csv(fits));
    write_artifact(stage, garch_paths_path(config), garch_paths_to_csv(fits));
    for (const auto& fit : fits) {
        if (!fit.fit.converged) {
            stage.notes.push_back(fit.series_name + ": optimizer did not converge");
        }
        if (fit.fit.boundary) {
            stage.notes.push_back(fit.series_name + ": persistence at stationarity boundary");
        }
    }

    stage.seconds = timer.seconds();
    update_manifest(config, {stage});
    return stage;
}

void record_stage(const PipelineConfig& config, const StageArtifacts& stage) {
    update_manifest(config, {stage});
}

std::vector<StageArtifacts> run_all(const PipelineConfig& config) {
    config.validate();
    if (!config.seed) throw InputError("seed is required for run-all (outlier stage)");
    std::vector<StageArtifacts> stages;
    stages.push_back(run_ingest(config));
    stages.push_back(run_indicators(config));
    stages.push_back(run_outliers(config));
    stages.push_back(run_regress(config));
    stages.push_back(run_garch(config));
    update_manifest(config, stages);
    return stages;
}

}  // namespace emspec
