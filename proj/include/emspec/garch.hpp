#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "emspec/dates.hpp"

namespace emspec {

// GARCH(p,q) parameter set: sigma2_t = alpha0 + sum_i alpha[i] x^2_{t-1-i}
//                                              + sum_j beta[j] sigma2_{t-1-j}.
struct GarchParams {
    double alpha0 = 0.0;
    std::vector<double> alpha;  // ARCH coefficients (order q)
    std::vector<double> beta;   // GARCH coefficients (order p)

    double persistence() const;         // sum of all alpha and beta
    double unconditional_variance() const;
    void validate() const;  // alpha0 > 0, coefficients >= 0, persistence < 1
};

// Conditional-variance recursion applied exactly; pre-sample x^2 and sigma2
// terms are set to sigma2_init.
std::vector<double> garch_filter(const std::vector<double>& x, const GarchParams& params,
                                 double sigma2_init);

// Gaussian log-likelihood -1/2 sum(ln 2*pi*sigma2_t + x_t^2/sigma2_t) with
// the filter above.
double garch_log_likelihood(const std::vector<double>& x, const GarchParams& params,
                            double sigma2_init);

// x_t = eta_t * sigma_t with standard-normal eta from the seeded sub-stream;
// a 500-sample burn-in is discarded, so the returned series starts near the
// stationary distribution.
std::vector<double> garch_simulate(const GarchParams& params, std::size_t length,
                                   std::uint64_t seed);

struct GarchFitConfig {
    std::size_t max_iter = 500;
    double tol = 1e-7;  // simplex spread, in transformed-parameter units
};

struct GarchFit {
    GarchParams params;
    std::vector<double> sigma2_path;
    double sigma2_init = 0.0;
    double log_likelihood = 0.0;
    bool converged = false;
    bool boundary = false;  // alpha1 + beta1 > 0.999
    std::size_t iterations = 0;
};

// GARCH(1,1) MLE on a demeaned series: Nelder-Mead over (ln alpha0,
// logit persistence, logit beta-share), which maps exactly onto the
// stationarity region. sigma2_init is the sample variance.
GarchFit garch11_fit(const std::vector<double>& x, const GarchFitConfig& config = {});

// One fitted indicator series: name, the dates the sigma path aligns to, and
// the fit itself.
struct IndicatorVolatility {
    std::string series_name;
    std::vector<Date> dates;
    GarchFit fit;
};

// Demeans the series (after optional first-differencing, which drops the
// first date) and fits GARCH(1,1).
IndicatorVolatility fit_indicator_volatility(const std::vector<Date>& dates,
                                             const std::vector<double>& series,
                                             const std::string& name,
                                             bool first_difference = false,
                                             const GarchFitConfig& config = {});

// garch.csv: series_name,alpha0,alpha1,beta1,log_likelihood,converged
// garch_paths.csv: date,series_name,sigma
std::string garch_fits_to_csv(const std::vector<IndicatorVolatility>& fits);
std::string garch_paths_to_csv(const std::vector<IndicatorVolatility>& fits);

}  // namespace emspec
