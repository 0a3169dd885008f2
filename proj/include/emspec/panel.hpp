#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "emspec/dates.hpp"
#include "emspec/matrix.hpp"

namespace emspec {

// Date-aligned matrix of adjusted close prices, one column per instrument.
// Cells may be absent (NaN) until align() has run; every other invariant
// (strictly increasing dates, positive finite prices) holds from load time.
struct PricePanel {
    std::vector<Date> dates;            // T rows, strictly increasing
    std::vector<std::string> tickers;   // N columns
    Matrix prices;                      // T x N, NaN = absent cell
    std::map<std::string, std::string> sectors;  // optional display metadata

    std::size_t num_dates() const { return dates.size(); }
    std::size_t num_instruments() const { return tickers.size(); }
    bool has_missing() const;
};

// Log-return panel derived from an aligned price panel. Row t carries the
// return from dates[t] to dates[t+1] of the source and is stamped with the
// later date.
struct ReturnPanel {
    std::vector<Date> dates;            // T-1 rows
    std::vector<std::string> tickers;
    Matrix returns;                     // (T-1) x N

    std::size_t num_dates() const { return dates.size(); }
    std::size_t num_instruments() const { return tickers.size(); }
};

enum class PriceFormat {
    wide_csv,  // header: date,TICKER1,...  one row per date
    long_csv,  // header: date,ticker,adj_close  one row per observation
};

struct AlignPolicy {
    enum class Kind { intersect_dates, forward_fill };
    Kind kind = Kind::intersect_dates;
    int max_gap = 0;  // forward_fill only: longest run of missing rows to carry over

    static AlignPolicy intersect_dates() { return {Kind::intersect_dates, 0}; }
    static AlignPolicy forward_fill(int max_gap) { return {Kind::forward_fill, max_gap}; }
};

struct AlignmentReport {
    std::vector<std::string> dropped_tickers;
    std::int64_t filled_cells = 0;
    std::int64_t dropped_dates = 0;

    std::string to_json() const;
};

// Parses a price file in one of the two accepted layouts. Rows are sorted by
// date; missing cells stay absent until align() resolves them. Malformed
// dates, non-positive prices and duplicate (date,ticker) pairs are errors
// naming the offending cell.
PricePanel load_prices(const std::string& path, PriceFormat format);

// Same parse applied to an in-memory CSV body (used by tests and fixtures).
PricePanel parse_prices(const std::string& csv_text, PriceFormat format,
                        const std::string& origin = "<memory>");

// Resolves absent cells. intersect_dates drops every date with at least one
// missing value; forward_fill carries the last seen price over runs of up to
// max_gap missing rows and drops instruments it cannot repair. Instruments
// without a single valid observation are always dropped. Fewer than two
// surviving instruments is an error.
PricePanel align(const PricePanel& panel, const AlignPolicy& policy,
                 AlignmentReport* report = nullptr);

// Log-return panel: returns[t][i] = ln(prices[t+1][i]) - ln(prices[t][i]).
// Requires an aligned panel with at least two dates.
ReturnPanel to_returns(const PricePanel& panel);

// Wide-CSV serialization. Absent price cells serialize as empty fields.
std::string price_panel_to_csv(const PricePanel& panel);

// Wide-CSV serialization of a return panel (header date,TICKER1,...), the
// interchange format between the ingest stage and downstream stages.
std::string return_panel_to_csv(const ReturnPanel& panel);
ReturnPanel return_panel_from_csv(const std::string& csv_text,
                                  const std::string& origin = "<memory>");

}  // namespace emspec
