// Acceptance suite: one line per criterion, nonzero exit iff a required
// criterion fails. Criterion 12 needs external data and never fails the run.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "emspec/correlation.hpp"
#include "emspec/csv.hpp"
#include "emspec/eigen_symmetric.hpp"
#include "emspec/errors.hpp"
#include "emspec/garch.hpp"
#include "emspec/indicators.hpp"
#include "emspec/mode_test.hpp"
#include "emspec/panel.hpp"
#include "emspec/parallel.hpp"
#include "emspec/pipeline.hpp"
#include "emspec/regression.hpp"
#include "emspec/rng.hpp"
#include "emspec/spectrum.hpp"
#include "emspec/synthetic.hpp"
#include "oracles.hpp"

using namespace emspec;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kPanelSeeds[] = {1, 7, 42, 2026};
constexpr std::size_t kPanelDates = 1019;  // 1000 epochs at M=20, shift 1
constexpr std::size_t kPanelWidth = 50;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

int g_failures = 0;

void report(int id, const char* status, const std::string& text) {
    std::printf("[%2d] %-4s %s\n", id, status, text.c_str());
    std::fflush(stdout);
}

void run_criterion(int id, const std::string& name, const std::function<bool(std::string&)>& fn) {
    std::string detail;
    bool pass = false;
    try {
        pass = fn(detail);
    } catch (const std::exception& e) {
        detail = std::string("unexpected error: ") + e.what();
    }
    if (!pass) ++g_failures;
    report(id, pass ? "PASS" : "FAIL", name + ": " + detail);
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

std::vector<EpochCorrelation> acceptance_epochs(std::uint64_t seed) {
    const ReturnPanel panel = sector_panel(kPanelDates, kPanelWidth, 5, 0.2, 0.4, seed);
    return rolling_correlations(panel, EpochSpec{20, 1});
}

// ---- criterion 1: rank/degeneracy law --------------------------------------
bool criterion_rank_law(std::string& detail) {
    Timer timer;
    std::size_t epochs_total = 0, epochs_good = 0;
    for (const auto seed : kPanelSeeds) {
        const auto epochs = acceptance_epochs(seed);
        std::vector<char> good(epochs.size(), 0);
        parallel_for(epochs.size(), [&](std::size_t k) {
            const auto vals = eig_symmetric_values(epochs[k].corr);
            std::size_t zeros = 0;
            for (double v : vals) zeros += std::abs(v) < 1e-8;
            good[k] = zeros == kPanelWidth - 20 + 1;
        });
        epochs_total += epochs.size();
        for (char g : good) epochs_good += g;
    }
    const double secs = timer.seconds();
    detail = fmt("%zu/%zu epochs with exactly 31 eigenvalues |lambda| < 1e-8 (%.1fs)",
                 epochs_good, epochs_total, secs);
    return epochs_good == epochs_total && epochs_total == 4000 && secs < 10.0;
}

// ---- criteria 2 and 3: power-map distortion --------------------------------
void criteria_power_map() {
    Timer timer;
    std::size_t total = 0, distinct_and_negative = 0, trace_ok = 0;
    double worst_trace = 0.0;
    double min_gap_seen = 1e300;
    for (const auto seed : kPanelSeeds) {
        const auto epochs = acceptance_epochs(seed);
        const auto splits = rolling_spectra(epochs, PowerMapParams{0.01});
        for (const auto& split : splits) {
            ++total;
            bool ok = split.emerging.size() == 31;
            double gap = 1e300;
            for (std::size_t i = 1; i < split.emerging.size(); ++i) {
                gap = std::min(gap, split.emerging[i] - split.emerging[i - 1]);
            }
            min_gap_seen = std::min(min_gap_seen, gap);
            ok = ok && gap > 0.0 && !split.emerging.empty() && split.emerging.front() < 0.0;
            distinct_and_negative += ok;

            long double sum = 0.0L;
            for (double v : split.all_eigenvalues) sum += v;
            const double dev = std::abs(static_cast<double>(sum) - double(kPanelWidth));
            worst_trace = std::max(worst_trace, dev);
            trace_ok += dev <= 1e-8 * kPanelWidth;
        }
    }
    const double secs = timer.seconds();

    const double frac = double(distinct_and_negative) / double(total);
    const bool pass2 = total == 4000 && frac >= 0.99;
    if (!pass2) ++g_failures;
    report(2, pass2 ? "PASS" : "FAIL",
           fmt("power-map degeneracy breaking: distinct emerging values with >=1 negative in "
               "%.1f%% of %zu epochs, min pairwise gap %.2e (%.1fs)",
               100.0 * frac, total, min_gap_seen, secs));

    const bool pass3 = trace_ok == total;
    if (!pass3) ++g_failures;
    report(3, pass3 ? "PASS" : "FAIL",
           fmt("trace conservation: %zu/%zu distorted epochs sum to N within 1e-8*N, worst "
               "deviation %.2e",
               trace_ok, total, worst_trace));
}

// ---- criterion 4: eigensolver oracle ---------------------------------------
bool criterion_eigen_oracle(std::string& detail) {
    std::mt19937_64 eng(4242);
    double worst_value = 0.0, worst_residual = 0.0;
    std::size_t checked = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 2 + eng() % 11;  // 2..12
        Matrix a(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                const double v = 2.0 * uniform01(eng) - 1.0;
                a(i, j) = v;
                a(j, i) = v;
            }
        }
        const EigenDecomposition dec = eig_symmetric(a);
        const std::vector<double> ref = oracle::eig_bisect(a);
        for (std::size_t k = 0; k < n; ++k) {
            worst_value = std::max(worst_value, std::abs(dec.eigenvalues[k] - ref[k]));
        }
        // residual max|Q L Q^T - A|
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                long double s = 0.0L;
                for (std::size_t k = 0; k < n; ++k) {
                    s += (long double)dec.eigenvectors(i, k) * dec.eigenvalues[k] *
                         dec.eigenvectors(j, k);
                }
                worst_residual =
                    std::max(worst_residual, std::abs(static_cast<double>(s) - a(i, j)));
            }
        }
        ++checked;
    }
    detail = fmt("%zu random symmetric matrices; max eigenvalue deviation %.2e (tol 1e-10), "
                 "max reconstruction residual %.2e (tol 1e-9)",
                 checked, worst_value, worst_residual);
    return checked == 500 && worst_value <= 1e-10 && worst_residual <= 1e-9;
}

// ---- criterion 5: equicorrelation closed form ------------------------------
bool criterion_equicorrelation(std::string& detail) {
    double worst = 0.0;
    bool mu_exact = true;
    for (const double rho : {0.1, 0.5, 0.9}) {
        for (const std::size_t n : {std::size_t(4), std::size_t(50)}) {
            Matrix a(n, n, rho);
            for (std::size_t i = 0; i < n; ++i) a(i, i) = 1.0;
            const auto vals = eig_symmetric_values(a);
            worst = std::max(worst, std::abs(vals.back() - (1.0 + (double(n) - 1.0) * rho)));
            for (std::size_t k = 0; k + 1 < n; ++k) {
                worst = std::max(worst, std::abs(vals[k] - (1.0 - rho)));
            }

            EpochCorrelation epoch;
            epoch.end_date = Date{2020, 1, 6};
            for (std::size_t i = 0; i < n; ++i) epoch.columns.push_back(i);
            epoch.corr = a;
            mu_exact = mu_exact && mean_market_correlation(epoch) == rho;
        }
    }
    detail = fmt("all 6 (rho, N) combinations: max spectrum deviation %.2e (tol 1e-10), "
                 "mu == rho exactly: %s",
                 worst, mu_exact ? "yes" : "NO");
    return worst <= 1e-10 && mu_exact;
}

// ---- criterion 6: Silverman calibration ------------------------------------
bool criterion_silverman(std::string& detail) {
    Timer timer;
    constexpr std::size_t kReps = 50;
    std::vector<char> uni_reject(kReps, 0), bi_reject(kReps, 0);
    parallel_for(kReps, [&](std::size_t rep) {
        NormalSampler normal(std::mt19937_64(9000 + rep));
        std::vector<double> sample(200);
        for (auto& v : sample) v = normal();
        uni_reject[rep] = silverman_test(sample, 500, 1234 + rep, 0.001).reject;
    });
    parallel_for(kReps, [&](std::size_t rep) {
        NormalSampler normal(std::mt19937_64(77000 + rep));
        std::vector<double> sample(200);
        for (auto& v : sample) {
            if (uniform01(normal.engine()) < 0.9) {
                v = normal();
            } else {
                v = 8.0 + 0.01 * normal();
            }
        }
        bi_reject[rep] = silverman_test(sample, 500, 4321 + rep, 0.001).reject;
    });
    std::size_t uni = 0, bi = 0;
    for (char c : uni_reject) uni += c;
    for (char c : bi_reject) bi += c;
    const double secs = timer.seconds();
    detail = fmt("B=500: unimodal rejects %zu/50 (allow <=1), bimodal mixture rejects %zu/50 "
                 "(need >=48) (%.1fs)",
                 uni, bi, secs);
    return uni <= 1 && bi >= 48 && secs < 120.0;
}

// ---- criterion 7: OLS oracle ------------------------------------------------
bool criterion_ols_oracle(std::string& detail) {
    std::mt19937_64 eng(71);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 15 + eng() % 60;
        const std::size_t k = 2 + eng() % 4;
        Matrix x(n, k);
        std::vector<double> y(n);
        std::mt19937_64 draw_eng(eng());
        NormalSampler normal(draw_eng);
        for (std::size_t i = 0; i < n; ++i) {
            x(i, 0) = 1.0;
            for (std::size_t j = 1; j < k; ++j) x(i, j) = normal();
            y[i] = normal();
        }
        const OlsFit fit = ols_fit(y, x);
        const oracle::OlsOracle ref = oracle::ols_normal_equations(y, x);
        for (std::size_t j = 0; j < k; ++j) {
            worst = std::max(worst, std::abs(fit.beta[j] - ref.beta[j]));
            worst = std::max(worst, std::abs(fit.se[j] - ref.se[j]));
        }
    }

    // the significance marker is literally |t| > 2 on every rolling window
    bool marker_ok = true;
    NormalSampler normal(std::mt19937_64(72));
    std::vector<Date> dates;
    std::vector<double> mu, lam;
    const auto cal = weekday_calendar(Date{2014, 1, 6}, 220);
    for (std::size_t i = 0; i < 220; ++i) {
        dates.push_back(cal[i]);
        mu.push_back(normal() + (i % 3 == 0 ? 0.4 * (i > 0 ? lam.back() : 0.0) : 0.0));
        lam.push_back(normal());
    }
    const RollingRegression rolling = rolling_t_series(dates, mu, lam, 2, 40);
    for (const auto& res : rolling.results) {
        marker_ok = marker_ok && res.significant == (std::abs(res.t_beta1) > 2.0);
    }
    detail = fmt("100 random regressions: max |coef/se - oracle| %.2e (tol 1e-8); |t|>2 marker "
                 "exact on %zu windows: %s",
                 worst, rolling.results.size(), marker_ok ? "yes" : "NO");
    return worst <= 1e-8 && marker_ok;
}

// ---- criterion 8: planted signal and permuted null --------------------------
bool criterion_planted_signal(std::string& detail) {
    constexpr std::size_t kLen = 1500;
    NormalSampler lam_noise(std::mt19937_64(881));
    NormalSampler mu_noise(std::mt19937_64(882));
    const auto cal = weekday_calendar(Date{2008, 1, 2}, kLen);
    std::vector<Date> dates(cal.begin(), cal.end());
    std::vector<double> lam(kLen), mu(kLen);
    for (std::size_t t = 0; t < kLen; ++t) {
        lam[t] = 0.1 * lam_noise();
        mu[t] = 0.5 + 0.8 * (t > 0 ? lam[t - 1] : 0.0) + 0.01 * mu_noise();
    }

    const RollingRegression planted = rolling_t_series(dates, mu, lam, 3, 126);
    std::size_t significant = 0;
    for (const auto& res : planted.results) significant += res.significant;
    const bool all_significant = significant == planted.results.size();

    // permuted-regressor null, pooled over independent permutations
    constexpr int kPerms = 40;
    std::mt19937_64 perm_eng(417);
    std::size_t null_hits = 0, null_windows = 0;
    for (int p = 0; p < kPerms; ++p) {
        std::vector<double> shuffled = lam;
        for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
            const std::size_t j = perm_eng() % (i + 1);
            std::swap(shuffled[i], shuffled[j]);
        }
        const RollingRegression null_run = rolling_t_series(dates, mu, shuffled, 3, 126);
        for (const auto& res : null_run.results) null_hits += res.significant;
        null_windows += null_run.results.size();
    }
    const double null_frac = double(null_hits) / double(null_windows);
    const bool null_ok = null_frac >= 0.02 && null_frac <= 0.08;
    detail = fmt("|t|>2 in %zu/%zu planted windows; permuted null %.2f%% of windows over %d "
                 "permutations (need 5%% +- 3%%)",
                 significant, planted.results.size(), 100.0 * null_frac, kPerms);
    return all_significant && null_ok;
}

// ---- criterion 9: GARCH recovery --------------------------------------------
bool criterion_garch_recovery(std::string& detail) {
    Timer timer;
    const GarchParams truth{0.1, {0.1}, {0.8}};
    constexpr std::size_t kSeeds = 20;
    std::vector<char> a0_ok(kSeeds, 0), a1_ok(kSeeds, 0), b1_ok(kSeeds, 0), ll_ok(kSeeds, 0);
    std::vector<double> ll_err(kSeeds, 0.0);
    parallel_for(kSeeds, [&](std::size_t s) {
        const auto x = garch_simulate(truth, 5000, s + 1);
        const GarchFit fit = garch11_fit(x);
        a0_ok[s] = std::abs(fit.params.alpha0 - 0.1) <= 0.05;
        a1_ok[s] = std::abs(fit.params.alpha[0] - 0.1) <= 0.05;
        b1_ok[s] = std::abs(fit.params.beta[0] - 0.8) <= 0.05;
        const auto sigma2 = garch_filter(x, fit.params, fit.sigma2_init);
        long double acc = 0.0L;
        for (std::size_t t = 0; t < x.size(); ++t) {
            acc += std::log(2.0L * M_PI * (long double)sigma2[t]) +
                   (long double)x[t] * x[t] / sigma2[t];
        }
        const double direct = static_cast<double>(-0.5L * acc);
        ll_err[s] = std::abs(direct - fit.log_likelihood);
        ll_ok[s] = ll_err[s] <= 1e-8;
    });
    std::size_t a0 = 0, a1 = 0, b1 = 0, ll = 0;
    double worst_ll = 0.0;
    for (std::size_t s = 0; s < kSeeds; ++s) {
        a0 += a0_ok[s];
        a1 += a1_ok[s];
        b1 += b1_ok[s];
        ll += ll_ok[s];
        worst_ll = std::max(worst_ll, ll_err[s]);
    }
    detail = fmt("20 seeds at T=5000: alpha0 within +-0.05 in %zu, alpha1 in %zu, beta1 in %zu "
                 "(each needs >=18); likelihood recomputation max |diff| %.2e (%.1fs)",
                 a0, a1, b1, worst_ll, timer.seconds());
    return a0 >= 18 && a1 >= 18 && b1 >= 18 && ll == kSeeds;
}

// ---- criterion 10: regime sensitivity ---------------------------------------
bool criterion_two_regime(std::string& detail) {
    Timer timer;
    const TwoRegimeSpec spec;  // bundled fixture settings
    const ReturnPanel panel = two_regime_panel(spec);
    const PricePanel prices = prices_from_returns(panel);
    fs::remove_all("acc_c10_out");
    write_file_atomic("acc_c10_panel.csv", price_panel_to_csv(prices));

    PipelineConfig config;
    config.prices_path = "acc_c10_panel.csv";
    config.output_dir = "acc_c10_out";
    config.epoch_len = 20;
    config.shift = 20;
    config.bootstrap = 2000;
    config.level = 0.001;
    config.seed = 17;
    config.alignment = "intersect";
    run_ingest(config);
    run_indicators(config);
    run_outliers(config);

    const IndicatorSeries ind =
        indicators_from_csv(read_text_file(indicators_path(config)), "indicators");
    if (ind.size() != 31) {
        detail = fmt("expected 31 epochs, got %zu", ind.size());
        return false;
    }
    // epochs 0..14 end before the row-310 midpoint, 15..30 after
    double mu_first = 0.0, mu_second = 0.0, lmax_first = 0.0, lmax_second = 0.0;
    for (std::size_t i = 0; i < 15; ++i) {
        mu_first += ind.mu[i] / 15.0;
        lmax_first += ind.lambda_max[i] / 15.0;
    }
    for (std::size_t i = 15; i < 31; ++i) {
        mu_second += ind.mu[i] / 16.0;
        lmax_second += ind.lambda_max[i] / 16.0;
    }

    const OutlierSeries outliers =
        outliers_from_csv(read_text_file(outliers_path(config)), "outliers");
    const Date burst_end = panel.dates[spec.burst_start + spec.burst_len - 1];
    std::size_t rejects = 0;
    bool burst_rejected = false;
    for (const auto& res : outliers.results) {
        if (res.p_value < 0.001) {
            ++rejects;
            burst_rejected = burst_rejected || res.end_date == burst_end;
        }
    }
    detail = fmt("mu %.3f -> %.3f (delta %.3f, need > 0.3); lambda_max %.1f -> %.1f; %zu/31 "
                 "epochs with p < 0.001, burst epoch %s flagged (%.1fs)",
                 mu_first, mu_second, mu_second - mu_first, lmax_first, lmax_second, rejects,
                 burst_rejected ? "uniquely" : "NOT", timer.seconds());
    return mu_second - mu_first > 0.3 && lmax_second > 2.0 * lmax_first &&
           outliers.results.size() == 31 && rejects == 1 && burst_rejected;
}

// ---- criterion 11: determinism ----------------------------------------------
bool criterion_determinism(std::string& detail) {
    Timer timer;
    const ReturnPanel panel = sector_panel(240, 40, 5, 0.2, 0.3, 9);
    write_file_atomic("acc_c11_panel.csv", price_panel_to_csv(prices_from_returns(panel)));

    auto run_into = [&](const std::string& dir, const char* threads) {
        fs::remove_all(dir);
        ::setenv("EMSPEC_THREADS", threads, 1);
        PipelineConfig config;
        config.prices_path = "acc_c11_panel.csv";
        config.output_dir = dir;
        config.bootstrap = 200;
        config.seed = 101;
        config.alignment = "intersect";
        run_all(config);
        return config;
    };
    const PipelineConfig one_a = run_into("acc_c11_t1a", "1");
    const PipelineConfig one_b = run_into("acc_c11_t1b", "1");
    const PipelineConfig four = run_into("acc_c11_t4", "4");
    ::unsetenv("EMSPEC_THREADS");

    std::size_t mismatches = 0, files = 0;
    for (auto path_of : {returns_cache_path, indicators_path, spectra_path, emerging_cache_path,
                         outliers_path, regression_path, garch_path, garch_paths_path}) {
        const std::string base = read_text_file(path_of(one_a));
        ++files;
        if (base != read_text_file(path_of(one_b))) ++mismatches;
        if (base != read_text_file(path_of(four))) ++mismatches;
    }
    detail = fmt("3 full runs (EMSPEC_THREADS=1,1,4): %zu byte-level mismatches across %zu "
                 "stage CSVs (%.1fs)",
                 mismatches, files, timer.seconds());
    return mismatches == 0;
}

// ---- criterion 12: optional S&P panel check ---------------------------------
void criterion_sp500() {
    const char* path = std::getenv("EMSPEC_SP500_CSV");
    if (path == nullptr || *path == '\0') {
        report(12, "SKIP",
               "S&P panel check (optional): set EMSPEC_SP500_CSV to a wide-format constituent "
               "price CSV to run it");
        return;
    }
    try {
        const PricePanel raw = load_prices(path, PriceFormat::wide_csv);
        const PricePanel aligned = align(raw, AlignPolicy::forward_fill(5));
        const ReturnPanel returns = to_returns(aligned);
        const auto epochs = rolling_correlations(returns, EpochSpec{20, 1});
        const Date target{2008, 9, 15};
        std::size_t best = 0;
        std::int64_t best_dist = std::int64_t(1) << 60;
        for (std::size_t k = 0; k < epochs.size(); ++k) {
            const std::int64_t dist = std::abs(epochs[k].end_date.ordinal() - target.ordinal());
            if (dist < best_dist) {
                best_dist = dist;
                best = k;
            }
        }
        const SpectrumSplit split = epoch_spectrum(epochs[best], PowerMapParams{0.01});
        const double lmax = split.lambda_max;
        const double lmin = split.lambda_min_emerging.value_or(0.0);
        const bool lmax_ok = std::abs(lmax - 94.49) <= 0.10 * 94.49;
        const bool lmin_ok = lmin <= -0.014 / 2.0 && lmin >= -0.014 * 2.0;
        report(12, "INFO",
               fmt("S&P panel (informational, never fails the suite): epoch ending %s: "
                   "lambda_max %.2f (%s 94.49 +- 10%%), emerging lambda_min %.4f (%s factor-2 "
                   "band of -0.014)",
                   epochs[best].end_date.to_string().c_str(), lmax,
                   lmax_ok ? "within" : "OUTSIDE", lmin, lmin_ok ? "within" : "OUTSIDE"));
    } catch (const std::exception& e) {
        report(12, "SKIP", fmt("S&P panel check not run: %s", e.what()));
    }
}

}  // namespace

int main() {
    std::printf("emspec acceptance suite\n");
    run_criterion(1, "rank/degeneracy law", criterion_rank_law);
    criteria_power_map();  // criteria 2 and 3 share the spectral pass
    run_criterion(4, "eigensolver oracle", criterion_eigen_oracle);
    run_criterion(5, "equicorrelation closed form", criterion_equicorrelation);
    run_criterion(6, "Silverman calibration", criterion_silverman);
    run_criterion(7, "OLS oracle", criterion_ols_oracle);
    run_criterion(8, "planted-signal detection", criterion_planted_signal);
    run_criterion(9, "GARCH parameter recovery", criterion_garch_recovery);
    run_criterion(10, "regime sensitivity", criterion_two_regime);
    run_criterion(11, "determinism", criterion_determinism);
    criterion_sp500();
    if (g_failures == 0) {
        std::printf("ACCEPTANCE: PASS (11/11 required criteria)\n");
        return 0;
    }
    std::printf("ACCEPTANCE: FAIL (%d required criteria failed)\n", g_failures);
    return 1;
}
