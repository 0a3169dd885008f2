#pragma once

#include <optional>
#include <string>
#include <vector>

#include "emspec/correlation.hpp"
#include "emspec/panel.hpp"
#include "emspec/spectrum.hpp"

namespace emspec {

// One row per epoch end date: market return, mean market correlation, and
// the spectral indicators of the distorted epoch matrix.
struct IndicatorSeries {
    std::vector<Date> dates;
    std::vector<double> r;
    std::vector<double> mu;
    std::vector<std::optional<double>> lambda_min;  // absent when M >= N
    std::vector<double> lambda_max;
    std::vector<std::optional<double>> separation_gap;
    std::vector<std::string> flags;  // ';'-joined markers, may be empty
    bool r_from_index = false;       // true when an index file backed r(t)

    std::size_t size() const { return dates.size(); }
};

// Mean of the N(N-1) signed off-diagonal entries.
double mean_market_correlation(const EpochCorrelation& epoch);

// Market return per panel date: the index log-return when an index panel is
// supplied (its dates must cover every panel date), otherwise the
// equal-weighted mean of constituent returns.
std::vector<double> market_return(const ReturnPanel& returns,
                                  const PricePanel* index_prices = nullptr);

// splits_out, when given, receives the per-epoch spectrum splits so callers
// that also cache spectra do not pay for a second spectral pass.
IndicatorSeries build_indicators(const ReturnPanel& returns, const EpochSpec& spec,
                                 const PowerMapParams& params,
                                 DegeneratePolicy policy = DegeneratePolicy::error,
                                 const PricePanel* index_prices = nullptr,
                                 std::vector<SpectrumSplit>* splits_out = nullptr);

// CSV round-trip: date,r,mu,lambda_min,lambda_max,separation_gap,flags.
// Optional columns serialize as empty cells.
std::string indicators_to_csv(const IndicatorSeries& series);
IndicatorSeries indicators_from_csv(const std::string& csv_text,
                                    const std::string& origin = "<memory>");

}  // namespace emspec
