#include "emspec/indicators.hpp"

#include <algorithm>
#include <map>

#include "emspec/csv.hpp"
#include "emspec/errors.hpp"

namespace emspec {

double mean_market_correlation(const EpochCorrelation& epoch) {
    const std::size_t n = epoch.size();
    if (n < 2) throw InputError("mean market correlation needs at least 2 instruments");
    // Extended-precision accumulation keeps the mean of an equicorrelated
    // matrix exactly equal to its off-diagonal value.
    long double upper = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) upper += epoch.corr(i, j);
    }
    const long double pairs = static_cast<long double>(n) * (n - 1) / 2.0L;
    return static_cast<double>(upper / pairs);
}

std::vector<double> market_return(const ReturnPanel& returns, const PricePanel* index_prices) {
    const std::size_t t_count = returns.num_dates();
    std::vector<double> out(t_count);
    if (index_prices == nullptr) {
        const std::size_t n = returns.num_instruments();
        for (std::size_t t = 0; t < t_count; ++t) {
            CompensatedSum acc;
            for (std::size_t j = 0; j < n; ++j) acc.add(returns.returns(t, j));
            out[t] = acc.value() / static_cast<double>(n);
        }
        return out;
    }

    const ReturnPanel index = to_returns(*index_prices);
    if (index.num_instruments() != 1) {
        throw InputError("index price file must contain exactly one instrument, got " +
                         std::to_string(index.num_instruments()));
    }
    std::map<std::int64_t, double> by_date;
    for (std::size_t t = 0; t < index.num_dates(); ++t) {
        by_date[index.dates[t].ordinal()] = index.returns(t, 0);
    }
    std::vector<std::string> gaps;
    for (std::size_t t = 0; t < t_count; ++t) {
        const auto it = by_date.find(returns.dates[t].ordinal());
        if (it == by_date.end()) {
            gaps.push_back(returns.dates[t].to_string());
        } else {
            out[t] = it->second;
        }
    }
    if (!gaps.empty()) {
        std::string msg = "index series missing " + std::to_string(gaps.size()) +
                          " panel dates:";
        for (std::size_t i = 0; i < gaps.size() && i < 5; ++i) msg += " " + gaps[i];
        if (gaps.size() > 5) msg += " ...";
        throw InputError(msg);
    }
    return out;
}

IndicatorSeries build_indicators(const ReturnPanel& returns, const EpochSpec& spec,
                                 const PowerMapParams& params, DegeneratePolicy policy,
                                 const PricePanel* index_prices,
                                 std::vector<SpectrumSplit>* splits_out) {
    const auto epochs = rolling_correlations(returns, spec, policy);
    auto spectra = rolling_spectra(epochs, params);
    const auto market = market_return(returns, index_prices);

    IndicatorSeries out;
    out.r_from_index = index_prices != nullptr;
    out.dates.reserve(epochs.size());
    for (std::size_t i = 0; i < epochs.size(); ++i) {
        const auto& ep = epochs[i];
        const auto& sp = spectra[i];
        out.dates.push_back(ep.end_date);
        out.r.push_back(market[ep.end_index]);
        out.mu.push_back(mean_market_correlation(ep));
        out.lambda_min.push_back(sp.lambda_min_emerging);
        out.lambda_max.push_back(sp.lambda_max);
        out.separation_gap.push_back(sp.separation_gap);

        std::string flag;
        if (ep.size() < returns.num_instruments()) flag = "degenerate_dropped";
        if (sp.gap_nonpositive) {
            if (!flag.empty()) flag += ';';
            flag += "gap_nonpositive";
        }
        out.flags.push_back(std::move(flag));
    }
    if (splits_out != nullptr) *splits_out = std::move(spectra);
    return out;
}

std::string indicators_to_csv(const IndicatorSeries& series) {
    std::string out = "date,r,mu,lambda_min,lambda_max,separation_gap,flags\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out += series.dates[i].to_string();
        out += ',';
        out += format_double(series.r[i]);
        out += ',';
        out += format_double(series.mu[i]);
        out += ',';
        if (series.lambda_min[i]) out += format_double(*series.lambda_min[i]);
        out += ',';
        out += format_double(series.lambda_max[i]);
        out += ',';
        if (series.separation_gap[i]) out += format_double(*series.separation_gap[i]);
        out += ',';
        out += series.flags[i];
        out += '\n';
    }
    return out;
}

IndicatorSeries indicators_from_csv(const std::string& csv_text, const std::string& origin) {
    IndicatorSeries series;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (pos < csv_text.size()) {
        std::size_t eol = csv_text.find('\n', pos);
        if (eol == std::string::npos) eol = csv_text.size();
        const std::string line = csv_text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (!saw_header) {
            if (join_csv(fields) != "date,r,mu,lambda_min,lambda_max,separation_gap,flags") {
                throw InputError(origin + ": unexpected indicators header '" + line + "'");
            }
            saw_header = true;
            continue;
        }
        const std::string where = origin + ":row " + std::to_string(line_no);
        if (fields.size() != 7) {
            throw InputError(where + ": expected 7 fields, got " + std::to_string(fields.size()));
        }
        series.dates.push_back(Date::parse(fields[0]));
        series.r.push_back(parse_double(fields[1], where + " (r)"));
        series.mu.push_back(parse_double(fields[2], where + " (mu)"));
        series.lambda_min.push_back(
            fields[3].empty() ? std::optional<double>{}
                              : std::optional<double>{parse_double(fields[3], where + " (lambda_min)")});
        series.lambda_max.push_back(parse_double(fields[4], where + " (lambda_max)"));
        series.separation_gap.push_back(
            fields[5].empty()
                ? std::optional<double>{}
                : std::optional<double>{parse_double(fields[5], where + " (separation_gap)")});
        series.flags.push_back(fields[6]);
    }
    if (!saw_header) throw InputError(origin + ": empty indicators file");
    for (std::size_t i = 1; i < series.dates.size(); ++i) {
        if (!(series.dates[i - 1] < series.dates[i])) {
            throw InputError(origin + ": indicator dates not strictly increasing");
        }
    }
    return series;
}

}  // namespace emspec
