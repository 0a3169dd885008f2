#include <doctest.h>

#include <cmath>

#include "emspec/errors.hpp"
#include "emspec/synthetic.hpp"

using namespace emspec;

namespace {

bool same_returns(const ReturnPanel& a, const ReturnPanel& b) {
    if (!a.returns.same_shape(b.returns)) return false;
    const std::size_t count = a.returns.rows() * a.returns.cols();
    for (std::size_t k = 0; k < count; ++k) {
        if (a.returns.data()[k] != b.returns.data()[k]) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("weekday calendar skips weekends and honors the start date") {
    // 2024-01-05 is a Friday; the next weekday is Monday the 8th
    const auto cal = weekday_calendar(Date{2024, 1, 5}, 4);
    REQUIRE(cal.size() == 4);
    CHECK(cal[0] == Date{2024, 1, 5});
    CHECK(cal[1] == Date{2024, 1, 8});
    CHECK(cal[2] == Date{2024, 1, 9});
    CHECK(cal[3] == Date{2024, 1, 10});

    // a Saturday start rolls forward to Monday
    const auto sat = weekday_calendar(Date{2024, 1, 6}, 1);
    CHECK(sat[0] == Date{2024, 1, 8});

    // strictly increasing across a month boundary
    const auto feb = weekday_calendar(Date{2024, 2, 28}, 3);
    CHECK(feb[1] == Date{2024, 2, 29});  // leap day, a Thursday
    CHECK(feb[2] == Date{2024, 3, 1});
}

TEST_CASE("factor panel dimensions and seed determinism") {
    const ReturnPanel a = factor_panel(40, 6, 0.3, 9);
    CHECK(a.num_dates() == 40);
    CHECK(a.num_instruments() == 6);
    CHECK(a.tickers[0] == "S000");
    CHECK(a.tickers[5] == "S005");
    CHECK(same_returns(a, factor_panel(40, 6, 0.3, 9)));
    CHECK_FALSE(same_returns(a, factor_panel(40, 6, 0.3, 10)));

    // rho = 0 matches the iid panel with the same seed
    CHECK(same_returns(factor_panel(40, 6, 0.0, 9), gaussian_panel(40, 6, 9)));

    CHECK_THROWS_AS(factor_panel(40, 6, 1.5, 9), InputError);
    CHECK_THROWS_AS(factor_panel(40, 6, -0.1, 9), InputError);
}

TEST_CASE("sector panel validates its variance decomposition") {
    const ReturnPanel panel = sector_panel(30, 12, 3, 0.2, 0.4, 1);
    CHECK(panel.num_dates() == 30);
    CHECK(panel.num_instruments() == 12);
    CHECK_THROWS_AS(sector_panel(30, 12, 3, 0.7, 0.4, 1), InputError);  // weights sum > 1
    CHECK_THROWS_AS(sector_panel(30, 12, 0, 0.2, 0.4, 1), InputError);
    CHECK_THROWS_AS(sector_panel(30, 12, 13, 0.2, 0.4, 1), InputError);  // more sectors than names
}

TEST_CASE("two-regime panel locks duplicate pairs during the burst only") {
    TwoRegimeSpec spec;
    spec.num_dates = 60;
    spec.num_instruments = 10;
    spec.burst_start = 40;
    spec.burst_len = 8;
    spec.duplicate_pairs = 3;
    spec.seed = 2;
    const ReturnPanel panel = two_regime_panel(spec);
    REQUIRE(panel.num_dates() == 60);
    REQUIRE(panel.num_instruments() == 10);

    for (std::size_t t = spec.burst_start; t < spec.burst_start + spec.burst_len; ++t) {
        CHECK(panel.returns(t, 0) == panel.returns(t, 1));  // zero noise means exact copies
        CHECK(panel.returns(t, 2) == panel.returns(t, 3));
        CHECK(panel.returns(t, 4) == panel.returns(t, 5));
        CHECK(panel.returns(t, 6) != panel.returns(t, 7));  // beyond the configured pair count
    }
    // outside the burst the pairs move apart
    CHECK(panel.returns(0, 0) != panel.returns(0, 1));
    CHECK(panel.returns(59, 2) != panel.returns(59, 3));

    TwoRegimeSpec bad = spec;
    bad.duplicate_pairs = 6;  // 12 instruments needed, only 10 exist
    CHECK_THROWS_AS(two_regime_panel(bad), InputError);
}

TEST_CASE("prices from returns round-trip through the returns computation") {
    const ReturnPanel returns = factor_panel(25, 4, 0.2, 13);
    const PricePanel prices = prices_from_returns(returns, 100.0);
    REQUIRE(prices.dates.size() == 26);  // one lead date for the initial price level
    CHECK(prices.dates.back() == returns.dates.back());
    CHECK(prices.dates.front() < returns.dates.front());
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(prices.prices(0, i) == 100.0);
    }
    const ReturnPanel back = to_returns(prices);
    REQUIRE(back.dates == returns.dates);
    REQUIRE(back.returns.same_shape(returns.returns));
    for (std::size_t t = 0; t < returns.num_dates(); ++t) {
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(back.returns(t, i) == doctest::Approx(returns.returns(t, i)).epsilon(1e-12));
        }
    }
}
