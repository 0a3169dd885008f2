#include "emspec/panel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "emspec/csv.hpp"
#include "emspec/errors.hpp"

namespace emspec {

namespace {

constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();

bool is_absent(double v) { return std::isnan(v); }

void check_positive_price(double value, const std::string& context) {
    if (!(value > 0.0)) {
        throw InputError("non-positive price " + format_double(value) + " at " + context);
    }
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

PricePanel parse_wide(const std::vector<std::string>& lines, const std::string& origin) {
    if (lines.empty()) throw InputError(origin + ": empty price file");
    const auto header = split_csv_line(lines[0]);
    if (header.size() < 2 || header[0] != "date") {
        throw InputError(origin + ": wide CSV header must start with 'date,TICKER1,...'");
    }

    PricePanel panel;
    panel.tickers.assign(header.begin() + 1, header.end());
    std::set<std::string> seen_tickers;
    for (const auto& t : panel.tickers) {
        if (t.empty()) throw InputError(origin + ": empty ticker name in header");
        if (!seen_tickers.insert(t).second) {
            throw InputError(origin + ": duplicate ticker '" + t + "' in header");
        }
    }

    const std::size_t n = panel.tickers.size();
    struct Row {
        Date date;
        std::vector<double> cells;
    };
    std::vector<Row> rows;
    std::set<Date> seen_dates;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const auto fields = split_csv_line(lines[li]);
        const std::string where = origin + ":row " + std::to_string(li + 1);
        if (fields.size() != n + 1) {
            throw InputError(where + ": expected " + std::to_string(n + 1) + " fields, got " +
                             std::to_string(fields.size()));
        }
        Row row;
        row.date = Date::parse(fields[0]);
        if (!seen_dates.insert(row.date).second) {
            throw InputError(where + ": duplicate date " + row.date.to_string());
        }
        row.cells.resize(n, kAbsent);
        for (std::size_t j = 0; j < n; ++j) {
            if (fields[j + 1].empty()) continue;  // absent cell, resolved by align
            const std::string cell = where + ", column '" + panel.tickers[j] + "'";
            row.cells[j] = parse_double(fields[j + 1], cell);
            check_positive_price(row.cells[j], cell);
        }
        rows.push_back(std::move(row));
    }

    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
    panel.prices = Matrix(rows.size(), n, kAbsent);
    panel.dates.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        panel.dates[i] = rows[i].date;
        for (std::size_t j = 0; j < n; ++j) panel.prices(i, j) = rows[i].cells[j];
    }
    return panel;
}

PricePanel parse_long(const std::vector<std::string>& lines, const std::string& origin) {
    if (lines.empty()) throw InputError(origin + ": empty price file");
    const auto header = split_csv_line(lines[0]);
    if (header.size() != 3 || header[0] != "date" || header[1] != "ticker" ||
        header[2] != "adj_close") {
        throw InputError(origin + ": long CSV header must be 'date,ticker,adj_close'");
    }

    struct Obs {
        Date date;
        std::string ticker;
        double price;
    };
    std::vector<Obs> observations;
    std::set<std::pair<std::int64_t, std::string>> seen;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const auto fields = split_csv_line(lines[li]);
        const std::string where = origin + ":row " + std::to_string(li + 1);
        if (fields.size() != 3) {
            throw InputError(where + ": expected 3 fields, got " + std::to_string(fields.size()));
        }
        Obs obs;
        obs.date = Date::parse(fields[0]);
        obs.ticker = fields[1];
        if (obs.ticker.empty()) throw InputError(where + ": empty ticker");
        const std::string cell = where + ", ticker '" + obs.ticker + "'";
        obs.price = parse_double(fields[2], cell);
        check_positive_price(obs.price, cell);
        if (!seen.insert({obs.date.ordinal(), obs.ticker}).second) {
            throw InputError(where + ": duplicate observation for (" + obs.date.to_string() +
                             ", " + obs.ticker + ")");
        }
        observations.push_back(std::move(obs));
    }

    // Ticker order is lexicographic so the panel does not depend on row order.
    std::set<std::string> ticker_set;
    std::set<Date> date_set;
    for (const auto& obs : observations) {
        ticker_set.insert(obs.ticker);
        date_set.insert(obs.date);
    }

    PricePanel panel;
    panel.tickers.assign(ticker_set.begin(), ticker_set.end());
    panel.dates.assign(date_set.begin(), date_set.end());
    std::map<std::string, std::size_t> ticker_index;
    std::map<std::int64_t, std::size_t> date_index;
    for (std::size_t j = 0; j < panel.tickers.size(); ++j) ticker_index[panel.tickers[j]] = j;
    for (std::size_t i = 0; i < panel.dates.size(); ++i) date_index[panel.dates[i].ordinal()] = i;

    panel.prices = Matrix(panel.dates.size(), panel.tickers.size(), kAbsent);
    for (const auto& obs : observations) {
        panel.prices(date_index[obs.date.ordinal()], ticker_index[obs.ticker]) = obs.price;
    }
    return panel;
}

}  // namespace

bool PricePanel::has_missing() const {
    for (std::size_t i = 0; i < num_dates(); ++i)
        for (std::size_t j = 0; j < num_instruments(); ++j)
            if (is_absent(prices(i, j))) return true;
    return false;
}

std::string AlignmentReport::to_json() const {
    nlohmann::json j;
    j["dropped_tickers"] = dropped_tickers;
    j["filled_cells"] = filled_cells;
    j["dropped_dates"] = dropped_dates;
    return j.dump(2) + "\n";
}

PricePanel parse_prices(const std::string& csv_text, PriceFormat format,
                        const std::string& origin) {
    const auto lines = split_lines(csv_text);
    return format == PriceFormat::wide_csv ? parse_wide(lines, origin)
                                           : parse_long(lines, origin);
}

PricePanel load_prices(const std::string& path, PriceFormat format) {
    return parse_prices(read_text_file(path), format, path);
}

PricePanel align(const PricePanel& panel, const AlignPolicy& policy, AlignmentReport* report) {
    AlignmentReport local;
    AlignmentReport& rep = report ? *report : local;
    rep = AlignmentReport{};

    const std::size_t t_count = panel.num_dates();
    const std::size_t n_count = panel.num_instruments();

    // Working copy of column data with per-instrument fill/drop decisions.
    std::vector<bool> keep_ticker(n_count, true);
    Matrix work = panel.prices;

    for (std::size_t j = 0; j < n_count; ++j) {
        bool any = false;
        for (std::size_t i = 0; i < t_count; ++i) any = any || !is_absent(work(i, j));
        if (!any) {
            keep_ticker[j] = false;
            rep.dropped_tickers.push_back(panel.tickers[j]);
        }
    }

    if (policy.kind == AlignPolicy::Kind::forward_fill) {
        for (std::size_t j = 0; j < n_count; ++j) {
            if (!keep_ticker[j]) continue;
            double last = kAbsent;
            int run = 0;
            bool ok = true;
            std::int64_t filled_here = 0;
            for (std::size_t i = 0; i < t_count && ok; ++i) {
                if (!is_absent(work(i, j))) {
                    last = work(i, j);
                    run = 0;
                } else if (is_absent(last)) {
                    ok = false;  // leading gap, nothing to carry
                } else if (++run > policy.max_gap) {
                    ok = false;
                } else {
                    work(i, j) = last;
                    ++filled_here;
                }
            }
            if (ok) {
                rep.filled_cells += filled_here;
            } else {
                keep_ticker[j] = false;
                rep.dropped_tickers.push_back(panel.tickers[j]);
            }
        }
    }

    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < n_count; ++j)
        if (keep_ticker[j]) cols.push_back(j);
    if (cols.size() < 2) {
        throw InputError("alignment left fewer than 2 instruments (" +
                         std::to_string(cols.size()) + ")");
    }

    std::vector<std::size_t> rows;
    if (policy.kind == AlignPolicy::Kind::intersect_dates) {
        for (std::size_t i = 0; i < t_count; ++i) {
            bool complete = true;
            for (std::size_t j : cols) complete = complete && !is_absent(work(i, j));
            if (complete) rows.push_back(i);
        }
        rep.dropped_dates = static_cast<std::int64_t>(t_count - rows.size());
    } else {
        rows.resize(t_count);
        for (std::size_t i = 0; i < t_count; ++i) rows[i] = i;
    }

    PricePanel out;
    out.sectors = panel.sectors;
    for (std::size_t j : cols) out.tickers.push_back(panel.tickers[j]);
    out.dates.reserve(rows.size());
    for (std::size_t i : rows) out.dates.push_back(panel.dates[i]);
    out.prices = Matrix(rows.size(), cols.size());
    for (std::size_t ri = 0; ri < rows.size(); ++ri)
        for (std::size_t cj = 0; cj < cols.size(); ++cj)
            out.prices(ri, cj) = work(rows[ri], cols[cj]);

    if (out.has_missing()) {
        throw InputError("alignment left unresolved cells; use intersect_dates or a larger max_gap");
    }
    if (out.num_dates() < 2) {
        throw InputError("alignment left fewer than 2 dates");
    }
    return out;
}

ReturnPanel to_returns(const PricePanel& panel) {
    if (panel.has_missing()) {
        throw InputError("to_returns requires an aligned panel (absent cells present)");
    }
    if (panel.num_dates() < 2) {
        throw InputError("to_returns requires at least 2 dates, got " +
                         std::to_string(panel.num_dates()));
    }
    ReturnPanel out;
    out.tickers = panel.tickers;
    const std::size_t t_count = panel.num_dates();
    const std::size_t n_count = panel.num_instruments();
    out.dates.assign(panel.dates.begin() + 1, panel.dates.end());
    out.returns = Matrix(t_count - 1, n_count);
    for (std::size_t i = 0; i + 1 < t_count; ++i)
        for (std::size_t j = 0; j < n_count; ++j)
            out.returns(i, j) = std::log(panel.prices(i + 1, j)) - std::log(panel.prices(i, j));
    return out;
}

std::string price_panel_to_csv(const PricePanel& panel) {
    std::string out = "date";
    for (const auto& t : panel.tickers) out += "," + t;
    out += "\n";
    for (std::size_t i = 0; i < panel.num_dates(); ++i) {
        out += panel.dates[i].to_string();
        for (std::size_t j = 0; j < panel.num_instruments(); ++j) {
            const double p = panel.prices(i, j);
            out += ",";
            if (!std::isnan(p)) out += format_double(p);
        }
        out += "\n";
    }
    return out;
}

std::string return_panel_to_csv(const ReturnPanel& panel) {
    std::string out = "date";
    for (const auto& t : panel.tickers) out += "," + t;
    out += "\n";
    for (std::size_t i = 0; i < panel.num_dates(); ++i) {
        out += panel.dates[i].to_string();
        for (std::size_t j = 0; j < panel.num_instruments(); ++j)
            out += "," + format_double(panel.returns(i, j));
        out += "\n";
    }
    return out;
}

ReturnPanel return_panel_from_csv(const std::string& csv_text, const std::string& origin) {
    const auto lines = split_lines(csv_text);
    if (lines.empty()) throw InputError(origin + ": empty return file");
    const auto header = split_csv_line(lines[0]);
    if (header.size() < 2 || header[0] != "date") {
        throw InputError(origin + ": return CSV header must start with 'date,...'");
    }
    ReturnPanel panel;
    panel.tickers.assign(header.begin() + 1, header.end());
    const std::size_t n = panel.tickers.size();
    std::vector<std::vector<double>> rows;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const auto fields = split_csv_line(lines[li]);
        const std::string where = origin + ":row " + std::to_string(li + 1);
        if (fields.size() != n + 1) {
            throw InputError(where + ": expected " + std::to_string(n + 1) + " fields");
        }
        panel.dates.push_back(Date::parse(fields[0]));
        std::vector<double> row(n);
        for (std::size_t j = 0; j < n; ++j) {
            row[j] = parse_double(fields[j + 1], where + ", column '" + panel.tickers[j] + "'");
        }
        rows.push_back(std::move(row));
    }
    for (std::size_t i = 1; i < panel.dates.size(); ++i) {
        if (!(panel.dates[i - 1] < panel.dates[i])) {
            throw InputError(origin + ": return dates not strictly increasing");
        }
    }
    panel.returns = Matrix(rows.size(), n);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < n; ++j) panel.returns(i, j) = rows[i][j];
    return panel;
}

}  // namespace emspec
