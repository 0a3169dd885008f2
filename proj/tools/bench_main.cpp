// Timing harness: serial reference implementations against the parallel maps.
#include <chrono>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "emspec/correlation.hpp"
#include "emspec/indicators.hpp"
#include "emspec/mode_test.hpp"
#include "emspec/parallel.hpp"
#include "emspec/regression.hpp"
#include "emspec/spectrum.hpp"
#include "emspec/synthetic.hpp"

namespace {

using namespace emspec;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-22s serial %8.3fs   parallel %8.3fs   speedup %.2fx\n", name, serial,
                parallel, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"emspec benchmark: serial reference vs parallel maps"};
    std::size_t num_dates = 2000;
    std::size_t num_instruments = 100;
    std::size_t bootstrap = 200;
    std::uint64_t seed = 42;
    app.add_option("--dates", num_dates, "panel length in trading days");
    app.add_option("--instruments", num_instruments, "panel width");
    app.add_option("--bootstrap", bootstrap, "mode-test replicates per epoch");
    app.add_option("--seed", seed, "panel seed");
    CLI11_PARSE(app, argc, argv);

    std::printf("panel %zu x %zu, %d worker(s)\n", num_dates, num_instruments,
                resolved_thread_count());
    const ReturnPanel panel = sector_panel(num_dates, num_instruments, 5, 0.2, 0.4, seed);
    const EpochSpec epochs{20, 1};
    const PowerMapParams params{0.01};

    auto t0 = Clock::now();
    const auto corr_s = rolling_correlations_serial(panel, epochs);
    const double corr_serial = seconds_since(t0);
    t0 = Clock::now();
    const auto corr_p = rolling_correlations(panel, epochs);
    report("rolling correlations", corr_serial, seconds_since(t0));

    t0 = Clock::now();
    const auto spectra_s = rolling_spectra_serial(corr_s, params);
    const double spec_serial = seconds_since(t0);
    t0 = Clock::now();
    const auto spectra_p = rolling_spectra(corr_p, params);
    report("rolling spectra", spec_serial, seconds_since(t0));

    OutlierParams op;
    op.bootstrap = bootstrap;
    op.seed = seed;
    t0 = Clock::now();
    const auto outliers_s = outlier_series_serial(spectra_s, op);
    const double out_serial = seconds_since(t0);
    t0 = Clock::now();
    const auto outliers_p = outlier_series(spectra_p, op);
    report("mode-test outliers", out_serial, seconds_since(t0));

    const IndicatorSeries ind = build_indicators(panel, epochs, params);
    std::vector<double> lambda_min(ind.size());
    for (std::size_t i = 0; i < ind.size(); ++i) lambda_min[i] = *ind.lambda_min[i];
    t0 = Clock::now();
    const auto reg_s = rolling_t_series_serial(ind.dates, ind.mu, lambda_min, 3, 126);
    const double reg_serial = seconds_since(t0);
    t0 = Clock::now();
    const auto reg_p = rolling_t_series(ind.dates, ind.mu, lambda_min, 3, 126);
    report("rolling regression", reg_serial, seconds_since(t0));

    // The point of the serial twins: identical output, not just close.
    bool same = spectra_s.size() == spectra_p.size() &&
                outliers_s.results.size() == outliers_p.results.size() &&
                reg_s.results.size() == reg_p.results.size();
    for (std::size_t i = 0; same && i < spectra_s.size(); ++i) {
        same = spectra_s[i].all_eigenvalues == spectra_p[i].all_eigenvalues;
    }
    for (std::size_t i = 0; same && i < outliers_s.results.size(); ++i) {
        same = outliers_s.results[i].p_value == outliers_p.results[i].p_value;
    }
    for (std::size_t i = 0; same && i < reg_s.results.size(); ++i) {
        same = reg_s.results[i].t_beta1 == reg_p.results[i].t_beta1;
    }
    std::printf("serial/parallel outputs %s\n", same ? "identical" : "DIFFER");
    return same ? 0 : 1;
}
