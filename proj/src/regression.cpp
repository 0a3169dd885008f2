#include "emspec/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "emspec/csv.hpp"
#include "emspec/errors.hpp"
#include "emspec/parallel.hpp"

namespace emspec {

namespace {

std::string column_label(std::size_t j, const std::vector<std::string>* names) {
    if (names != nullptr && j < names->size()) return (*names)[j];
    return "column " + std::to_string(j);
}

}  // namespace

OlsFit ols_fit(const std::vector<double>& y, const Matrix& x,
               const std::vector<std::string>* column_names) {
    const std::size_t n = x.rows();
    const std::size_t k = x.cols();
    if (y.size() != n) {
        throw InputError("OLS: y has " + std::to_string(y.size()) + " rows, X has " +
                         std::to_string(n));
    }
    if (k == 0 || n < k + 1) {
        throw InputError("OLS needs more observations (" + std::to_string(n) +
                         ") than parameters (" + std::to_string(k) + ")");
    }

    // Householder QR of X, applying the same reflections to y.
    Matrix r = x;
    std::vector<double> qty = y;
    std::vector<double> col_scale(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x(i, j) * x(i, j);
        col_scale[j] = std::sqrt(s);
    }

    for (std::size_t j = 0; j < k; ++j) {
        double norm = 0.0;
        for (std::size_t i = j; i < n; ++i) norm = std::hypot(norm, r(i, j));
        if (norm <= 1e-10 * std::max(col_scale[j], 1e-30)) {
            throw InputError("OLS design is rank deficient: " + column_label(j, column_names) +
                             " is collinear with the preceding columns");
        }
        if (r(j, j) > 0.0) norm = -norm;
        for (std::size_t i = j; i < n; ++i) r(i, j) /= norm;
        r(j, j) -= 1.0;  // Householder vector now lives in column j, rows j..n-1

        for (std::size_t c = j + 1; c < k; ++c) {
            double s = 0.0;
            for (std::size_t i = j; i < n; ++i) s += r(i, j) * r(i, c);
            s /= r(j, j);
            for (std::size_t i = j; i < n; ++i) r(i, c) += s * r(i, j);
        }
        double s = 0.0;
        for (std::size_t i = j; i < n; ++i) s += r(i, j) * qty[i];
        s /= r(j, j);
        for (std::size_t i = j; i < n; ++i) qty[i] += s * r(i, j);
        r(j, j) = norm;  // diagonal of R (reflector overwritten)
    }

    OlsFit fit;
    fit.n_obs = n;
    fit.beta.assign(k, 0.0);
    for (std::size_t j = k; j-- > 0;) {
        double s = qty[j];
        for (std::size_t c = j + 1; c < k; ++c) s -= r(j, c) * fit.beta[c];
        fit.beta[j] = s / r(j, j);
    }

    std::vector<double> residual(n);
    CompensatedSum rss;
    for (std::size_t i = 0; i < n; ++i) {
        CompensatedSum pred;
        for (std::size_t j = 0; j < k; ++j) pred.add(x(i, j) * fit.beta[j]);
        residual[i] = y[i] - pred.value();
        rss.add(residual[i] * residual[i]);
    }
    fit.rss = rss.value();

    CompensatedSum ysum;
    for (double v : y) ysum.add(v);
    const double ybar = ysum.value() / static_cast<double>(n);
    CompensatedSum tss;
    for (double v : y) tss.add((v - ybar) * (v - ybar));
    fit.tss = tss.value();

    fit.perfect_fit = fit.rss <= 1e-24 * std::max(fit.tss, 1e-300) || fit.rss == 0.0;
    if (fit.perfect_fit) fit.rss = 0.0;
    fit.sigma2_hat = fit.rss / static_cast<double>(n - k);
    if (fit.tss > 0.0) {
        fit.r_squared = 1.0 - fit.rss / fit.tss;
    } else {
        fit.r_squared = fit.perfect_fit ? 1.0 : 0.0;
    }

    // (X'X)^-1 = R^-1 R^-T, so its diagonal needs the rows of R^-1. Invert R
    // column by column (back substitution), then take squared row sums.
    Matrix rinv(k, k, 0.0);
    for (std::size_t m = 0; m < k; ++m) {
        rinv(m, m) = 1.0 / r(m, m);
        for (std::size_t row = m; row-- > 0;) {
            double s = 0.0;
            for (std::size_t c = row + 1; c <= m; ++c) s -= r(row, c) * rinv(c, m);
            rinv(row, m) = s / r(row, row);
        }
    }
    fit.se.assign(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        double diag = 0.0;
        for (std::size_t m = j; m < k; ++m) diag += rinv(j, m) * rinv(j, m);
        fit.se[j] = std::sqrt(fit.sigma2_hat * diag);
    }

    if (k > 1) {
        if (fit.se[1] > 0.0) {
            fit.t_beta1 = fit.beta[1] / fit.se[1];
        } else {
            // Perfect fit: infinite t when the slope is real, 0 when the fit
            // is carried by the other columns and the slope is numerical dust.
            double coef_scale = 0.0;
            for (double b : fit.beta) coef_scale = std::max(coef_scale, std::abs(b));
            if (std::abs(fit.beta[1]) <= 1e-10 * std::max(coef_scale, 1e-300)) {
                fit.t_beta1 = 0.0;
            } else {
                fit.t_beta1 = std::copysign(std::numeric_limits<double>::infinity(), fit.beta[1]);
            }
        }
    }
    return fit;
}

LaggedDesign lagged_design(const std::vector<Date>& dates, const std::vector<double>& mu,
                           const std::vector<double>& lambda_min, std::size_t lags) {
    if (dates.size() != mu.size() || dates.size() != lambda_min.size()) {
        throw InputError("lagged design needs matching date axes (dates " +
                         std::to_string(dates.size()) + ", mu " + std::to_string(mu.size()) +
                         ", lambda_min " + std::to_string(lambda_min.size()) + ")");
    }
    if (lags < 1) throw InputError("lag count must be at least 1");
    if (dates.size() <= lags) {
        throw InputError("series of length " + std::to_string(dates.size()) +
                         " too short for " + std::to_string(lags) + " lags");
    }

    LaggedDesign out;
    const std::size_t rows = dates.size() - lags;
    out.dates.assign(dates.begin() + static_cast<std::ptrdiff_t>(lags), dates.end());
    out.y.assign(mu.begin() + static_cast<std::ptrdiff_t>(lags), mu.end());
    out.x = Matrix(rows, lags + 1);
    out.column_names.push_back("intercept");
    for (std::size_t l = 1; l <= lags; ++l) out.column_names.push_back("lag" + std::to_string(l));
    for (std::size_t t = 0; t < rows; ++t) {
        out.x(t, 0) = 1.0;
        for (std::size_t l = 1; l <= lags; ++l) {
            out.x(t, l) = lambda_min[t + lags - l];
        }
    }
    return out;
}

namespace {

RollingRegression rolling_impl(const std::vector<Date>& dates, const std::vector<double>& mu,
                               const std::vector<double>& lambda_min, std::size_t lags,
                               std::size_t window, bool parallel) {
    if (window < lags + 10) {
        throw InputError("regression window " + std::to_string(window) +
                         " too small for " + std::to_string(lags) + " lags (need >= " +
                         std::to_string(lags + 10) + ")");
    }
    const LaggedDesign design = lagged_design(dates, mu, lambda_min, lags);
    const std::size_t rows = design.y.size();
    if (rows < window) {
        throw InputError("only " + std::to_string(rows) + " aligned rows for window " +
                         std::to_string(window));
    }

    const std::size_t count = rows - window + 1;
    struct Slot {
        bool ran = false;
        RegressionResult result;
        std::string reason;
    };
    std::vector<Slot> slots(count);
    const auto run_one = [&](std::size_t w) {
        const std::size_t first = w;  // window covers aligned rows [first, first+window)
        Slot& slot = slots[w];
        std::vector<double> y(design.y.begin() + static_cast<std::ptrdiff_t>(first),
                              design.y.begin() + static_cast<std::ptrdiff_t>(first + window));
        Matrix x(window, lags + 1);
        for (std::size_t i = 0; i < window; ++i) {
            for (std::size_t j = 0; j <= lags; ++j) x(i, j) = design.x(first + i, j);
        }
        const Date end = design.dates[first + window - 1];
        try {
            OlsFit fit = ols_fit(y, x, &design.column_names);
            RegressionResult res;
            res.window_end = end;
            res.beta = std::move(fit.beta);
            res.se = std::move(fit.se);
            res.t_beta1 = fit.t_beta1;
            res.r_squared = fit.r_squared;
            res.significant = std::abs(fit.t_beta1) > 2.0;
            res.perfect_fit = fit.perfect_fit;
            res.n_obs = fit.n_obs;
            slot.result = std::move(res);
            slot.ran = true;
        } catch (const std::exception& e) {
            slot.result.window_end = end;
            slot.reason = e.what();
        }
    };

    if (parallel) {
        parallel_for(count, run_one);
    } else {
        for (std::size_t w = 0; w < count; ++w) run_one(w);
    }

    RollingRegression out;
    out.lags = lags;
    for (auto& slot : slots) {
        if (slot.ran) {
            out.results.push_back(std::move(slot.result));
        } else {
            out.skipped.push_back({slot.result.window_end, std::move(slot.reason)});
        }
    }
    return out;
}

}  // namespace

RollingRegression rolling_t_series(const std::vector<Date>& dates, const std::vector<double>& mu,
                                   const std::vector<double>& lambda_min, std::size_t lags,
                                   std::size_t window) {
    return rolling_impl(dates, mu, lambda_min, lags, window, true);
}

RollingRegression rolling_t_series_serial(const std::vector<Date>& dates,
                                          const std::vector<double>& mu,
                                          const std::vector<double>& lambda_min,
                                          std::size_t lags, std::size_t window) {
    return rolling_impl(dates, mu, lambda_min, lags, window, false);
}

namespace {

std::string format_maybe_infinite(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    return format_double(value);
}

double parse_maybe_infinite(const std::string& text, const std::string& context) {
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    return parse_double(text, context);
}

}  // namespace

std::string regression_to_csv(const RollingRegression& rolling) {
    std::string header = "window_end";
    for (std::size_t j = 0; j <= rolling.lags; ++j) header += ",beta" + std::to_string(j);
    header += ",se1,t_beta1,significant,r_squared,n_obs\n";
    std::string out = header;
    for (const auto& r : rolling.results) {
        out += r.window_end.to_string();
        for (double b : r.beta) {
            out += ',';
            out += format_double(b);
        }
        out += ',';
        out += format_double(r.se.size() > 1 ? r.se[1] : 0.0);
        out += ',';
        out += format_maybe_infinite(r.t_beta1);
        out += ',';
        out += r.significant ? '1' : '0';
        out += ',';
        out += format_double(r.r_squared);
        out += ',';
        out += std::to_string(r.n_obs);
        out += '\n';
    }
    return out;
}

RollingRegression regression_from_csv(const std::string& csv_text, const std::string& origin) {
    RollingRegression rolling;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool saw_header = false;
    std::size_t beta_count = 0;
    while (pos < csv_text.size()) {
        std::size_t eol = csv_text.find('\n', pos);
        if (eol == std::string::npos) eol = csv_text.size();
        const std::string line = csv_text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (!saw_header) {
            if (fields.size() < 7 || fields[0] != "window_end" || fields[1] != "beta0") {
                throw InputError(origin + ": unexpected regression header '" + line + "'");
            }
            beta_count = fields.size() - 6;  // window_end + betas + 5 trailing columns
            for (std::size_t j = 0; j < beta_count; ++j) {
                if (fields[1 + j] != "beta" + std::to_string(j)) {
                    throw InputError(origin + ": unexpected regression header '" + line + "'");
                }
            }
            rolling.lags = beta_count - 1;
            saw_header = true;
            continue;
        }
        const std::string where = origin + ":row " + std::to_string(line_no);
        if (fields.size() != beta_count + 6) {
            throw InputError(where + ": expected " + std::to_string(beta_count + 6) + " fields");
        }
        RegressionResult r;
        r.window_end = Date::parse(fields[0]);
        for (std::size_t j = 0; j < beta_count; ++j) {
            r.beta.push_back(parse_double(fields[1 + j], where + " (beta" + std::to_string(j) + ")"));
        }
        r.se.assign(beta_count, 0.0);
        r.se[1] = parse_double(fields[beta_count + 1], where + " (se1)");
        r.t_beta1 = parse_maybe_infinite(fields[beta_count + 2], where + " (t_beta1)");
        const std::string& sig = fields[beta_count + 3];
        if (sig != "0" && sig != "1") {
            throw InputError(where + ": significant must be 0 or 1");
        }
        r.significant = sig == "1";
        r.r_squared = parse_double(fields[beta_count + 4], where + " (r_squared)");
        r.n_obs = static_cast<std::size_t>(parse_double(fields[beta_count + 5], where + " (n_obs)"));
        r.perfect_fit = std::isinf(r.t_beta1);
        rolling.results.push_back(std::move(r));
    }
    if (!saw_header) throw InputError(origin + ": empty regression file");
    return rolling;
}

}  // namespace emspec
