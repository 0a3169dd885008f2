#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "emspec/dates.hpp"
#include "emspec/matrix.hpp"

namespace emspec {

struct OlsFit {
    std::vector<double> beta;
    std::vector<double> se;
    double rss = 0.0;
    double tss = 0.0;
    double sigma2_hat = 0.0;
    double r_squared = 0.0;
    double t_beta1 = 0.0;  // signed infinity under a perfect fit with signal
    bool perfect_fit = false;
    std::size_t n_obs = 0;
};

// Least squares via Householder QR (never normal equations), classical
// homoskedastic standard errors from sigma2_hat * (X'X)^-1 with
// sigma2_hat = RSS/(n-k). A rank-deficient design is an error naming the
// offending column. Requires n >= k+1 so sigma2_hat exists.
OlsFit ols_fit(const std::vector<double>& y, const Matrix& x,
               const std::vector<std::string>* column_names = nullptr);

// Aligned regression data: row t carries y = mu(t) and regressors
// lambda_min(t-1..t-p) plus an intercept; the first p dates drop out.
struct LaggedDesign {
    std::vector<Date> dates;
    std::vector<double> y;
    Matrix x;
    std::vector<std::string> column_names;  // intercept, lag1, ..., lagp
};

LaggedDesign lagged_design(const std::vector<Date>& dates, const std::vector<double>& mu,
                           const std::vector<double>& lambda_min, std::size_t lags);

struct RegressionResult {
    Date window_end;
    std::vector<double> beta;
    std::vector<double> se;
    double t_beta1 = 0.0;
    double r_squared = 0.0;
    bool significant = false;  // |t| > 2, the paper's marker
    bool perfect_fit = false;
    std::size_t n_obs = 0;
};

struct SkippedWindow {
    Date window_end;
    std::string reason;
};

struct RollingRegression {
    std::size_t lags = 0;
    std::vector<RegressionResult> results;
    std::vector<SkippedWindow> skipped;  // rank-deficient windows, non-fatal
};

// One fit per window of the last `window` aligned rows. Requires
// window >= lags + 10. Parallel variant bit-identical to the serial loop.
RollingRegression rolling_t_series(const std::vector<Date>& dates,
                                   const std::vector<double>& mu,
                                   const std::vector<double>& lambda_min, std::size_t lags,
                                   std::size_t window);
RollingRegression rolling_t_series_serial(const std::vector<Date>& dates,
                                          const std::vector<double>& mu,
                                          const std::vector<double>& lambda_min,
                                          std::size_t lags, std::size_t window);

// CSV round-trip: window_end,beta0..betap,se1,t_beta1,significant,r_squared,
// n_obs. Infinite t serializes as inf/-inf.
std::string regression_to_csv(const RollingRegression& rolling);
RollingRegression regression_from_csv(const std::string& csv_text,
                                      const std::string& origin = "<memory>");

}  // namespace emspec
