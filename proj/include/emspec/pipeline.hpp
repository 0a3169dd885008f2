#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "emspec/correlation.hpp"
#include "emspec/panel.hpp"
#include "emspec/spectrum.hpp"

namespace emspec {

// Everything a full run needs, with defaults matching the reference
// configuration (M=20, shift 1, epsilon 0.01, 3 lags, half-year regression
// window, B=500 at the 0.1% level). Values come from three layers: these
// defaults, then a key=value config file, then command-line flags.
struct PipelineConfig {
    std::string prices_path;
    std::string price_format = "wide";  // wide | long
    std::string index_path;             // optional wide-format index prices
    std::string output_dir = "out";

    std::size_t epoch_len = 20;
    std::size_t shift = 1;
    double epsilon = 0.01;
    std::string degenerate = "error";  // error | drop

    std::size_t lags = 3;
    std::size_t regression_window = 126;

    std::size_t bootstrap = 500;
    double level = 0.001;
    std::optional<std::uint64_t> seed;  // required by the outlier stage
    std::size_t min_outlier_sample = 8;

    std::string alignment = "forward_fill";  // forward_fill | intersect
    std::size_t max_gap = 5;

    bool garch_diff = false;  // first-difference indicator series before GARCH

    void validate() const;

    PriceFormat price_format_enum() const;
    AlignPolicy align_policy() const;
    DegeneratePolicy degenerate_policy() const;
    EpochSpec epoch_spec() const;
    PowerMapParams power_params() const;
};

// Applies one key=value assignment; unknown keys and unparsable values are
// errors naming the origin (file:line or "flag").
void apply_config_value(PipelineConfig& config, const std::string& key,
                        const std::string& value, const std::string& origin);

// Flat key=value text, one assignment per line, '#' comments. Starts from
// defaults; callers layer flags on top afterwards.
PipelineConfig parse_config(const std::string& text, const std::string& origin = "<config>");
PipelineConfig load_config_file(const std::string& path);

// The same flat format back out; parse_config(config_to_kv(c)) == c.
std::string config_to_kv(const PipelineConfig& config);

// What one stage did: wall time, raw inputs it read and files it wrote (both
// as (path, content hash)), and free-form notes (skipped-epoch counts and
// similar soft errors).
struct StageArtifacts {
    std::string name;
    double seconds = 0.0;
    std::vector<std::pair<std::string, std::string>> inputs;
    std::vector<std::pair<std::string, std::string>> files;
    std::vector<std::string> notes;
};

// Pipeline stages. Each reads its inputs from the raw config paths or from
// the cached CSVs of earlier stages in output_dir, and fails with an error
// naming the prerequisite subcommand when a cache is missing. Every stage
// rewrites the manifest with its own artifacts merged in.
StageArtifacts run_ingest(const PipelineConfig& config);
StageArtifacts run_indicators(const PipelineConfig& config);
StageArtifacts run_outliers(const PipelineConfig& config);
StageArtifacts run_regress(const PipelineConfig& config);
StageArtifacts run_garch(const PipelineConfig& config);

// ingest -> indicators -> outliers -> regress -> garch, one manifest at the
// end covering all five.
std::vector<StageArtifacts> run_all(const PipelineConfig& config);

// Merges one externally-run stage (e.g. a plot pass) into the manifest.
void record_stage(const PipelineConfig& config, const StageArtifacts& stage);

// Cache-file locations inside output_dir.
std::string returns_cache_path(const PipelineConfig& config);
std::string indicators_path(const PipelineConfig& config);
std::string spectra_path(const PipelineConfig& config);
std::string emerging_cache_path(const PipelineConfig& config);
std::string outliers_path(const PipelineConfig& config);
std::string regression_path(const PipelineConfig& config);
std::string garch_path(const PipelineConfig& config);
std::string garch_paths_path(const PipelineConfig& config);
std::string alignment_report_path(const PipelineConfig& config);
std::string manifest_path(const PipelineConfig& config);

}  // namespace emspec
