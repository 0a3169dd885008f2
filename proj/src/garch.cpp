#include "emspec/garch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "emspec/csv.hpp"
#include "emspec/errors.hpp"
#include "emspec/matrix.hpp"
#include "emspec/rng.hpp"
#include "emspec/simplex.hpp"

namespace emspec {

double GarchParams::persistence() const {
    double s = 0.0;
    for (double a : alpha) s += a;
    for (double b : beta) s += b;
    return s;
}

double GarchParams::unconditional_variance() const {
    return alpha0 / (1.0 - persistence());
}

void GarchParams::validate() const {
    if (!(alpha0 > 0.0)) {
        throw InputError("GARCH alpha0 must be positive, got " + format_double(alpha0));
    }
    for (double a : alpha) {
        if (!(a >= 0.0)) throw InputError("GARCH alpha coefficients must be non-negative");
    }
    for (double b : beta) {
        if (!(b >= 0.0)) throw InputError("GARCH beta coefficients must be non-negative");
    }
    if (!(persistence() < 1.0)) {
        throw InputError("GARCH persistence must be below 1 for stationarity, got " +
                         format_double(persistence()));
    }
}

std::vector<double> garch_filter(const std::vector<double>& x, const GarchParams& params,
                                 double sigma2_init) {
    params.validate();
    if (!(sigma2_init > 0.0)) {
        throw InputError("sigma2_init must be positive, got " + format_double(sigma2_init));
    }
    const std::size_t q = params.alpha.size();
    const std::size_t p = params.beta.size();
    if (x.size() < std::max(p, q) + 1) {
        throw InputError("series of length " + std::to_string(x.size()) +
                         " too short for GARCH(" + std::to_string(p) + "," +
                         std::to_string(q) + ")");
    }

    std::vector<double> sigma2(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) {
        double s = params.alpha0;
        for (std::size_t i = 0; i < q; ++i) {
            const double x2 = t >= i + 1 ? x[t - i - 1] * x[t - i - 1] : sigma2_init;
            s += params.alpha[i] * x2;
        }
        for (std::size_t j = 0; j < p; ++j) {
            const double s2 = t >= j + 1 ? sigma2[t - j - 1] : sigma2_init;
            s += params.beta[j] * s2;
        }
        sigma2[t] = s;
    }
    return sigma2;
}

double garch_log_likelihood(const std::vector<double>& x, const GarchParams& params,
                            double sigma2_init) {
    const auto sigma2 = garch_filter(x, params, sigma2_init);
    constexpr double ln_2pi = 1.8378770664093454836;  // ln(2*pi)
    CompensatedSum acc;
    for (std::size_t t = 0; t < x.size(); ++t) {
        acc.add(ln_2pi + std::log(sigma2[t]) + x[t] * x[t] / sigma2[t]);
    }
    return -0.5 * acc.value();
}

std::vector<double> garch_simulate(const GarchParams& params, std::size_t length,
                                   std::uint64_t seed) {
    params.validate();
    if (length < 1) throw InputError("simulation length must be at least 1");
    constexpr std::size_t kBurnIn = 500;
    const std::size_t q = params.alpha.size();
    const std::size_t p = params.beta.size();
    const double init = params.unconditional_variance();

    NormalSampler normal(substream_engine(seed, "garch-sim"));
    const std::size_t total = kBurnIn + length;
    std::vector<double> x(total), sigma2(total);
    for (std::size_t t = 0; t < total; ++t) {
        double s = params.alpha0;
        for (std::size_t i = 0; i < q; ++i) {
            const double x2 = t >= i + 1 ? x[t - i - 1] * x[t - i - 1] : init;
            s += params.alpha[i] * x2;
        }
        for (std::size_t j = 0; j < p; ++j) {
            const double s2 = t >= j + 1 ? sigma2[t - j - 1] : init;
            s += params.beta[j] * s2;
        }
        sigma2[t] = s;
        x[t] = normal() * std::sqrt(s);
    }
    return {x.begin() + kBurnIn, x.end()};
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }
double logit(double u) { return std::log(u / (1.0 - u)); }

// Transformed coordinates: theta = (ln alpha0, logit u, logit w) with
// u = alpha1 + beta1 (persistence) and w = beta1 / u (its GARCH share).
// The map covers exactly the interior of the stationarity region.
GarchParams params_from_theta(const std::vector<double>& theta) {
    const double u = sigmoid(theta[1]);
    const double w = sigmoid(theta[2]);
    GarchParams params;
    params.alpha0 = std::exp(theta[0]);
    params.alpha = {u * (1.0 - w)};
    params.beta = {u * w};
    return params;
}

}  // namespace

GarchFit garch11_fit(const std::vector<double>& x, const GarchFitConfig& config) {
    if (x.size() < 100) {
        throw InputError("GARCH fit needs at least 100 observations, got " +
                         std::to_string(x.size()));
    }
    CompensatedSum mean_acc;
    for (double v : x) mean_acc.add(v);
    const double mean = mean_acc.value() / static_cast<double>(x.size());
    CompensatedSum var_acc;
    for (double v : x) var_acc.add((v - mean) * (v - mean));
    const double s2 = var_acc.value() / static_cast<double>(x.size() - 1);
    if (!(s2 > 0.0)) throw InputError("GARCH fit on a zero-variance series");

    const auto objective = [&](const std::vector<double>& theta) {
        return -garch_log_likelihood(x, params_from_theta(theta), s2);
    };

    const std::vector<double> start = {std::log(0.1 * s2), logit(0.9), logit(8.0 / 9.0)};
    SimplexResult best = nelder_mead(objective, start, 0.25, config.tol, config.max_iter);
    // One polish restart from the incumbent: a fresh, smaller simplex escapes
    // premature shrinkage at negligible cost for a 3-parameter problem.
    if (best.iterations < config.max_iter) {
        SimplexResult polish = nelder_mead(objective, best.x, 0.05, config.tol,
                                           config.max_iter - best.iterations);
        polish.iterations += best.iterations;
        if (polish.fx <= best.fx) {
            polish.converged = polish.converged && best.converged;
            best = std::move(polish);
        }
    }

    GarchFit fit;
    fit.params = params_from_theta(best.x);
    fit.sigma2_init = s2;
    fit.sigma2_path = garch_filter(x, fit.params, s2);
    fit.log_likelihood = -best.fx;
    fit.converged = best.converged;
    fit.iterations = best.iterations;
    fit.boundary = fit.params.persistence() > 0.999;
    return fit;
}

IndicatorVolatility fit_indicator_volatility(const std::vector<Date>& dates,
                                             const std::vector<double>& series,
                                             const std::string& name, bool first_difference,
                                             const GarchFitConfig& config) {
    if (dates.size() != series.size()) {
        throw InputError("indicator series '" + name + "': " + std::to_string(series.size()) +
                         " values vs " + std::to_string(dates.size()) + " dates");
    }
    IndicatorVolatility out;
    out.series_name = name;
    std::vector<double> work;
    if (first_difference) {
        if (series.size() < 2) throw InputError("cannot difference a series of length < 2");
        work.reserve(series.size() - 1);
        for (std::size_t t = 1; t < series.size(); ++t) work.push_back(series[t] - series[t - 1]);
        out.dates.assign(dates.begin() + 1, dates.end());
    } else {
        work = series;
        out.dates = dates;
    }

    CompensatedSum acc;
    for (double v : work) acc.add(v);
    const double mean = acc.value() / static_cast<double>(work.size());
    for (double& v : work) v -= mean;

    out.fit = garch11_fit(work, config);
    return out;
}

std::string garch_fits_to_csv(const std::vector<IndicatorVolatility>& fits) {
    std::string out = "series_name,alpha0,alpha1,beta1,log_likelihood,converged\n";
    for (const auto& f : fits) {
        out += f.series_name;
        out += ',';
        out += format_double(f.fit.params.alpha0);
        out += ',';
        out += format_double(f.fit.params.alpha.at(0));
        out += ',';
        out += format_double(f.fit.params.beta.at(0));
        out += ',';
        out += format_double(f.fit.log_likelihood);
        out += ',';
        out += f.fit.converged ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::string garch_paths_to_csv(const std::vector<IndicatorVolatility>& fits) {
    std::string out = "date,series_name,sigma\n";
    for (const auto& f : fits) {
        for (std::size_t t = 0; t < f.fit.sigma2_path.size(); ++t) {
            out += f.dates.at(t).to_string();
            out += ',';
            out += f.series_name;
            out += ',';
            out += format_double(std::sqrt(f.fit.sigma2_path[t]));
            out += '\n';
        }
    }
    return out;
}

}  // namespace emspec
