// emspec command line: staged crash-indicator pipeline over daily price panels.
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "emspec/csv.hpp"
#include "emspec/errors.hpp"
#include "emspec/garch.hpp"
#include "emspec/pipeline.hpp"
#include "emspec/svg_plots.hpp"
#include "emspec/synthetic.hpp"
#include "emspec/version.hpp"

namespace {

using namespace emspec;

void print_stage(const StageArtifacts& stage) {
    std::printf("[%s] %.2fs\n", stage.name.c_str(), stage.seconds);
    for (const auto& [path, hash] : stage.files) {
        std::printf("  wrote %s (%s)\n", path.c_str(), hash.c_str());
    }
    for (const auto& note : stage.notes) std::printf("  note: %s\n", note.c_str());
}

// Registers the shared pipeline options on a subcommand, all bound to `cfg`.
// CLI11 only assigns a bound variable when its flag is present, so the
// precedence defaults < config file < flags falls out of the load order.
void add_pipeline_options(CLI::App* cmd, PipelineConfig& cfg, std::string& config_path) {
    cmd->add_option("--config", config_path, "key=value config file (applied before flags)");
    cmd->add_option("--prices", cfg.prices_path, "price CSV path");
    cmd->add_option("--price-format", cfg.price_format, "price layout: wide or long");
    cmd->add_option("--index", cfg.index_path, "market index price CSV (wide, one column)");
    cmd->add_option("-o,--out", cfg.output_dir, "output directory");
    cmd->add_option("--epoch-len", cfg.epoch_len, "epoch length M in trading days");
    cmd->add_option("--shift", cfg.shift, "epoch shift in trading days");
    cmd->add_option("--epsilon", cfg.epsilon, "power-map distortion exponent offset");
    cmd->add_option("--degenerate", cfg.degenerate, "degenerate instrument policy: error or drop");
    cmd->add_option("--lags", cfg.lags, "regression lag count");
    cmd->add_option("--window", cfg.regression_window, "rolling regression window length");
    cmd->add_option("--bootstrap", cfg.bootstrap, "mode-test bootstrap replicates");
    cmd->add_option("--level", cfg.level, "mode-test rejection level");
    cmd->add_option("--seed", cfg.seed, "root RNG seed (required for outlier stages)");
    cmd->add_option("--min-outlier-sample", cfg.min_outlier_sample,
                    "smallest lower-half sample the mode test accepts");
    cmd->add_option("--alignment", cfg.alignment, "missing-data policy: forward_fill or intersect");
    cmd->add_option("--max-gap", cfg.max_gap, "longest forward-filled gap in rows");
    cmd->add_flag("--garch-diff,!--no-garch-diff", cfg.garch_diff,
                  "first-difference the correlation series before the GARCH fit");
}

Date parse_date_flag(const std::string& text, const char* flag) {
    try {
        return Date::parse(text);
    } catch (const InputError& e) {
        throw InputError(std::string(flag) + ": " + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    PipelineConfig cfg;

    // The config file is the middle precedence layer, so it must be applied
    // before CLI11 assigns any flag values: scan argv for it up front.
    try {
        std::string config_path;
        for (int i = 1; i < argc; ++i) {
            const std::string arg = argv[i];
            std::string path;
            if (arg == "--config" && i + 1 < argc) {
                path = argv[i + 1];
            } else if (arg.rfind("--config=", 0) == 0) {
                path = arg.substr(9);
            }
            if (path.empty()) continue;
            if (!config_path.empty() && path != config_path) {
                throw InputError("at most one --config file may be given");
            }
            config_path = path;
        }
        if (!config_path.empty()) cfg = load_config_file(config_path);
    } catch (const InputError& e) {
        std::fprintf(stderr, "emspec: %s\n", e.what());
        return 2;
    }

    CLI::App app{"Market crash indicators from the emerging eigenspectrum of "
                 "distorted epoch-wise correlation matrices"};
    app.set_version_flag("--version", EMSPEC_VERSION);
    app.require_subcommand(1);
    std::string config_path_sink;  // value already consumed by the pre-scan

    auto* cmd_run = app.add_subcommand("run-all", "run every stage in order");
    auto* cmd_ingest = app.add_subcommand("ingest", "parse and align prices, cache returns");
    auto* cmd_ind = app.add_subcommand("indicators", "rolling spectra and indicator series");
    auto* cmd_out = app.add_subcommand("outliers", "per-epoch lower-half unimodality test");
    auto* cmd_reg = app.add_subcommand("regress", "lagged rolling regression of mu on lambda_min");
    auto* cmd_garch = app.add_subcommand("garch-fit", "GARCH(1,1) fits of the indicator series");
    for (CLI::App* cmd : {cmd_run, cmd_ingest, cmd_ind, cmd_out, cmd_reg, cmd_garch}) {
        add_pipeline_options(cmd, cfg, config_path_sink);
    }

    auto* cmd_plot = app.add_subcommand("plot", "render SVG charts from cached stage outputs");
    add_pipeline_options(cmd_plot, cfg, config_path_sink);
    std::string plot_kind;
    std::string plot_from, plot_to, plot_date;
    PlotOptions plot_opt;
    cmd_plot->add_option("--kind", plot_kind, "indicators, spectra, outliers or garch")
        ->required()
        ->check(CLI::IsMember({"indicators", "spectra", "outliers", "garch"}));
    cmd_plot->add_option("--from", plot_from, "first date to draw (YYYY-MM-DD)");
    cmd_plot->add_option("--to", plot_to, "last date to draw (YYYY-MM-DD)");
    cmd_plot->add_option("--date", plot_date, "epoch end date for the spectrum chart");
    cmd_plot->add_flag("--mp", plot_opt.mp_overlay,
                       "add a Marchenko-Pastur null-model panel to the spectrum chart");
    cmd_plot->add_option("--bins", plot_opt.bins, "spectrum histogram bin count");

    auto* cmd_sim = app.add_subcommand("simulate", "write synthetic fixtures");
    std::vector<double> sim_garch;
    bool sim_two_regime = false;
    double sim_factor_rho = 0.0, sim_sector_mkt = 0.2, sim_sector_weight = 0.4;
    std::size_t sim_sectors = 0;
    std::size_t sim_len = 5000, sim_dates = 500, sim_instruments = 50;
    double sim_vol = 0.01;
    std::optional<std::uint64_t> sim_seed;
    std::string sim_out, sim_start = "2000-01-03";
    TwoRegimeSpec regime;
    auto* mode = cmd_sim->add_option_group("mode", "what to simulate");
    auto* opt_garch = mode->add_option("--garch", sim_garch,
                                       "GARCH(1,1) series; alpha0 alpha1 beta1")
                          ->expected(3);
    auto* opt_regime = mode->add_flag("--two-regime", sim_two_regime,
                                      "two-regime crash panel with one burst window");
    auto* opt_factor = mode->add_option("--factor", sim_factor_rho,
                                        "one-factor panel with this pairwise correlation");
    mode->add_option("--sector", sim_sectors,
                     "market-plus-sector panel with this many sectors");
    mode->require_option(1);
    cmd_sim->add_option("--out", sim_out, "output CSV path")->required();
    cmd_sim->add_option("--len", sim_len, "series length (garch mode)");
    cmd_sim->add_option("--dates", sim_dates, "trading-day count (panel modes)");
    cmd_sim->add_option("--instruments", sim_instruments, "instrument count (panel modes)");
    cmd_sim->add_option("--vol", sim_vol, "daily return volatility (panel modes)");
    cmd_sim->add_option("--seed", sim_seed, "generator seed");
    cmd_sim->add_option("--start", sim_start, "first calendar date (panel modes)");
    cmd_sim->add_option("--mkt-weight", sim_sector_mkt, "market variance share (sector mode)");
    cmd_sim->add_option("--sector-weight", sim_sector_weight,
                        "sector variance share (sector mode)");
    cmd_sim->add_option("--rho1", regime.rho_first, "first-regime correlation (two-regime)");
    cmd_sim->add_option("--rho2", regime.rho_second, "second-regime correlation (two-regime)");
    cmd_sim->add_option("--burst-start", regime.burst_start, "first burst row (two-regime)");
    cmd_sim->add_option("--burst-len", regime.burst_len, "burst row count (two-regime)");
    cmd_sim->add_option("--burst-rho", regime.burst_rho, "burst correlation (two-regime)");
    cmd_sim->add_option("--pairs", regime.duplicate_pairs,
                        "instrument pairs locked during the burst (two-regime)");
    cmd_sim->add_option("--pair-noise", regime.duplicate_noise,
                        "residual noise inside a locked pair, in vol units (two-regime)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    const char* where = "emspec";
    try {
        if (*cmd_run) {
            where = "run-all";
            for (const auto& stage : run_all(cfg)) print_stage(stage);
        } else if (*cmd_ingest) {
            where = "ingest";
            print_stage(run_ingest(cfg));
        } else if (*cmd_ind) {
            where = "indicators";
            print_stage(run_indicators(cfg));
        } else if (*cmd_out) {
            where = "outliers";
            print_stage(run_outliers(cfg));
        } else if (*cmd_reg) {
            where = "regress";
            print_stage(run_regress(cfg));
        } else if (*cmd_garch) {
            where = "garch-fit";
            print_stage(run_garch(cfg));
        } else if (*cmd_plot) {
            where = "plot";
            if (!plot_from.empty()) plot_opt.from = parse_date_flag(plot_from, "--from");
            if (!plot_to.empty()) plot_opt.to = parse_date_flag(plot_to, "--to");
            if (!plot_date.empty()) plot_opt.spectrum_date = parse_date_flag(plot_date, "--date");
            std::vector<std::string> written;
            if (plot_kind == "indicators") written = plot_indicators(cfg, plot_opt);
            else if (plot_kind == "spectra") written = plot_spectra(cfg, plot_opt);
            else if (plot_kind == "outliers") written = plot_outliers(cfg, plot_opt);
            else written = plot_garch(cfg, plot_opt);
            for (const auto& path : written) std::printf("wrote %s\n", path.c_str());
        } else if (*cmd_sim) {
            where = "simulate";
            std::string csv;
            if (opt_garch->count() > 0) {
                GarchParams params{sim_garch[0], {sim_garch[1]}, {sim_garch[2]}};
                const auto series = garch_simulate(params, sim_len, sim_seed.value_or(1));
                csv = "t,x\n";
                for (std::size_t t = 0; t < series.size(); ++t) {
                    csv += std::to_string(t) + "," + format_double(series[t]) + "\n";
                }
            } else {
                ReturnPanel panel;
                if (opt_regime->count() > 0) {
                    if (cmd_sim->count("--dates") > 0) regime.num_dates = sim_dates;
                    if (cmd_sim->count("--instruments") > 0) {
                        regime.num_instruments = sim_instruments;
                    }
                    if (cmd_sim->count("--vol") > 0) regime.vol = sim_vol;
                    if (sim_seed) regime.seed = *sim_seed;
                    panel = two_regime_panel(regime);
                } else if (opt_factor->count() > 0) {
                    panel = factor_panel(sim_dates, sim_instruments, sim_factor_rho,
                                         sim_seed.value_or(1), sim_vol);
                } else {
                    panel = sector_panel(sim_dates, sim_instruments, sim_sectors, sim_sector_mkt,
                                         sim_sector_weight, sim_seed.value_or(1), sim_vol);
                }
                // Re-stamp the calendar from --start, then emit prices so the
                // fixture enters the pipeline through the ingest stage.
                const Date start = parse_date_flag(sim_start, "--start");
                const auto calendar = weekday_calendar(start, panel.num_dates() + 1);
                PricePanel prices = prices_from_returns(panel);
                prices.dates = calendar;
                csv = price_panel_to_csv(prices);
            }
            write_file_atomic(sim_out, csv);
            std::printf("wrote %s\n", sim_out.c_str());
        }
    } catch (const InputError& e) {
        std::fprintf(stderr, "emspec %s: %s\n", where, e.what());
        return 2;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "emspec %s: %s\n", where, e.what());
        return 3;
    }
    return 0;
}
