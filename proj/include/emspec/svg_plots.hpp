#pragma once

#include <optional>
#include <string>
#include <vector>

#include "emspec/dates.hpp"
#include "emspec/pipeline.hpp"

namespace emspec {

// Static-figure options. from/to restrict the date range (inclusive);
// spectrum_date picks the epoch for the spectrum histogram (default: the
// last cached epoch); mp_overlay adds the Marchenko-Pastur null-model curve.
struct PlotOptions {
    std::optional<Date> from;
    std::optional<Date> to;
    std::optional<Date> spectrum_date;
    bool mp_overlay = false;
    std::size_t bins = 40;
};

// Each reads the stage CSVs from config.output_dir, writes SVG files under
// <output_dir>/plots, records them in the manifest, and returns the paths.
// A missing upstream CSV is an error naming the subcommand that produces it;
// an empty date-range filter is an error, not an empty file.
std::vector<std::string> plot_indicators(const PipelineConfig& config,
                                         const PlotOptions& options = {});
std::vector<std::string> plot_spectra(const PipelineConfig& config,
                                      const PlotOptions& options = {});
std::vector<std::string> plot_outliers(const PipelineConfig& config,
                                       const PlotOptions& options = {});
std::vector<std::string> plot_garch(const PipelineConfig& config,
                                    const PlotOptions& options = {});

}  // namespace emspec
