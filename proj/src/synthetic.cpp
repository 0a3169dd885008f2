#include "emspec/synthetic.hpp"

#include <cmath>
#include <cstdio>

#include "emspec/errors.hpp"
#include "emspec/rng.hpp"

namespace emspec {

namespace {

Date next_day(Date d) {
    if (++d.day > Date::days_in_month(d.year, d.month)) {
        d.day = 1;
        if (++d.month > 12) {
            d.month = 1;
            ++d.year;
        }
    }
    return d;
}

// 0 = Sunday ... 6 = Saturday (civil-days algorithm, Gregorian).
int day_of_week(const Date& d) {
    int y = d.year;
    int m = d.month;
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const int yoe = y - era * 400;
    const int doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d.day - 1;
    const int doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    const long long days = static_cast<long long>(era) * 146097 + doe - 719468;
    return static_cast<int>(((days % 7) + 11) % 7);  // 1970-01-01 was a Thursday
}

std::string ticker_name(std::size_t index) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "S%03zu", index);
    return std::string(buf);
}

}  // namespace

std::vector<Date> weekday_calendar(Date start, std::size_t count) {
    std::vector<Date> out;
    out.reserve(count);
    Date d = start;
    while (out.size() < count) {
        const int wd = day_of_week(d);
        if (wd != 0 && wd != 6) out.push_back(d);
        d = next_day(d);
    }
    return out;
}

ReturnPanel factor_panel(std::size_t num_dates, std::size_t num_instruments, double rho,
                         std::uint64_t seed, double vol) {
    if (!(rho >= 0.0 && rho < 1.0)) {
        throw InputError("factor correlation must lie in [0,1)");
    }
    if (num_instruments < 2) throw InputError("panel needs at least 2 instruments");
    ReturnPanel panel;
    panel.dates = weekday_calendar(Date{2000, 1, 3}, num_dates);
    for (std::size_t j = 0; j < num_instruments; ++j) panel.tickers.push_back(ticker_name(j));
    panel.returns = Matrix(num_dates, num_instruments);

    NormalSampler normal(substream_engine(seed, "factor-panel"));
    const double load = std::sqrt(rho);
    const double resid = std::sqrt(1.0 - rho);
    for (std::size_t t = 0; t < num_dates; ++t) {
        const double f = normal();
        for (std::size_t j = 0; j < num_instruments; ++j) {
            panel.returns(t, j) = vol * (load * f + resid * normal());
        }
    }
    return panel;
}

ReturnPanel gaussian_panel(std::size_t num_dates, std::size_t num_instruments,
                           std::uint64_t seed, double vol) {
    return factor_panel(num_dates, num_instruments, 0.0, seed, vol);
}

ReturnPanel sector_panel(std::size_t num_dates, std::size_t num_instruments,
                         std::size_t num_sectors, double mkt_weight, double sector_weight,
                         std::uint64_t seed, double vol) {
    if (num_instruments < 2) throw InputError("panel needs at least 2 instruments");
    if (num_sectors < 1 || num_sectors > num_instruments) {
        throw InputError("sector count must lie in [1, instruments]");
    }
    if (!(mkt_weight >= 0.0) || !(sector_weight >= 0.0) || !(mkt_weight + sector_weight < 1.0)) {
        throw InputError("factor variance shares must be nonnegative with sum < 1");
    }
    ReturnPanel panel;
    panel.dates = weekday_calendar(Date{2000, 1, 3}, num_dates);
    for (std::size_t j = 0; j < num_instruments; ++j) panel.tickers.push_back(ticker_name(j));
    panel.returns = Matrix(num_dates, num_instruments);

    const std::size_t block = (num_instruments + num_sectors - 1) / num_sectors;
    NormalSampler normal(substream_engine(seed, "sector-panel"));
    const double mkt_load = std::sqrt(mkt_weight);
    const double sec_load = std::sqrt(sector_weight);
    const double resid = std::sqrt(1.0 - mkt_weight - sector_weight);
    std::vector<double> sector_shock(num_sectors);
    for (std::size_t t = 0; t < num_dates; ++t) {
        const double f = normal();
        for (std::size_t s = 0; s < num_sectors; ++s) sector_shock[s] = normal();
        for (std::size_t j = 0; j < num_instruments; ++j) {
            const double g = sector_shock[j / block];
            panel.returns(t, j) = vol * (mkt_load * f + sec_load * g + resid * normal());
        }
    }
    return panel;
}

ReturnPanel two_regime_panel(const TwoRegimeSpec& spec) {
    if (spec.burst_start + spec.burst_len > spec.num_dates) {
        throw InputError("burst window extends past the end of the panel");
    }
    if (spec.num_instruments < 4) throw InputError("two-regime panel needs at least 4 instruments");
    if (2 * spec.duplicate_pairs > spec.num_instruments) {
        throw InputError("duplicate pairs exceed the instrument count");
    }

    ReturnPanel panel;
    panel.dates = weekday_calendar(Date{2000, 1, 3}, spec.num_dates);
    for (std::size_t j = 0; j < spec.num_instruments; ++j) {
        panel.tickers.push_back(ticker_name(j));
    }
    panel.returns = Matrix(spec.num_dates, spec.num_instruments);

    NormalSampler normal(substream_engine(spec.seed, "two-regime"));
    const std::size_t midpoint = spec.num_dates / 2;
    for (std::size_t t = 0; t < spec.num_dates; ++t) {
        const bool in_burst = t >= spec.burst_start && t < spec.burst_start + spec.burst_len;
        const double rho = in_burst ? spec.burst_rho
                                    : (t < midpoint ? spec.rho_first : spec.rho_second);
        const double load = std::sqrt(rho);
        const double resid = std::sqrt(1.0 - rho);
        const double f = normal();
        for (std::size_t j = 0; j < spec.num_instruments; ++j) {
            panel.returns(t, j) = spec.vol * (load * f + resid * normal());
        }
        if (in_burst) {
            for (std::size_t k = 0; k < spec.duplicate_pairs; ++k) {
                panel.returns(t, 2 * k + 1) =
                    panel.returns(t, 2 * k) + spec.vol * spec.duplicate_noise * normal();
            }
        }
    }
    return panel;
}

PricePanel prices_from_returns(const ReturnPanel& returns, double initial) {
    if (!(initial > 0.0)) throw InputError("initial price must be positive");
    PricePanel panel;
    panel.tickers = returns.tickers;
    const std::size_t t_count = returns.num_dates();
    const std::size_t n = returns.num_instruments();

    // One extra leading date so that to_returns() reproduces the input.
    std::vector<Date> dates = returns.dates;
    Date first = returns.dates.front();
    const auto calendar = weekday_calendar(Date{first.year - 1, 12, 1}, 25);
    Date lead = calendar.front();
    for (const Date& d : calendar) {
        if (d < first) lead = d;
    }
    panel.dates.push_back(lead);
    panel.dates.insert(panel.dates.end(), dates.begin(), dates.end());

    panel.prices = Matrix(t_count + 1, n);
    for (std::size_t j = 0; j < n; ++j) {
        double log_price = std::log(initial);
        panel.prices(0, j) = initial;
        for (std::size_t t = 0; t < t_count; ++t) {
            log_price += returns.returns(t, j);
            panel.prices(t + 1, j) = std::exp(log_price);
        }
    }
    return panel;
}

}  // namespace emspec
