#include <doctest.h>

#include <cmath>

#include "emspec/errors.hpp"
#include "emspec/panel.hpp"

using namespace emspec;

namespace {

const char* kWide4x3 =
    "date,AAA,BBB,CCC\n"
    "2020-01-02,100,50,20\n"
    "2020-01-03,101,51,19\n"
    "2020-01-06,102,49,21\n"
    "2020-01-07,99,52,22\n";

// Same panel, long layout, tickers deliberately interleaved out of order.
const char* kLong4x3 =
    "date,ticker,adj_close\n"
    "2020-01-03,BBB,51\n"
    "2020-01-02,AAA,100\n"
    "2020-01-06,CCC,21\n"
    "2020-01-02,CCC,20\n"
    "2020-01-07,AAA,99\n"
    "2020-01-03,CCC,19\n"
    "2020-01-06,AAA,102\n"
    "2020-01-02,BBB,50\n"
    "2020-01-07,CCC,22\n"
    "2020-01-03,AAA,101\n"
    "2020-01-06,BBB,49\n"
    "2020-01-07,BBB,52\n";

}  // namespace

TEST_CASE("wide and interleaved long CSV parse to the same panel") {
    const PricePanel wide = parse_prices(kWide4x3, PriceFormat::wide_csv, "wide");
    const PricePanel tall = parse_prices(kLong4x3, PriceFormat::long_csv, "long");
    REQUIRE(wide.num_dates() == 4);
    REQUIRE(wide.num_instruments() == 3);
    REQUIRE(tall.num_dates() == 4);
    REQUIRE(tall.num_instruments() == 3);
    CHECK(wide.dates == tall.dates);
    CHECK(wide.tickers == tall.tickers);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 3; ++j) CHECK(wide.prices(i, j) == tall.prices(i, j));
    }
}

TEST_CASE("price parser rejects bad cells") {
    CHECK_THROWS_AS(parse_prices("date,A\n2020-01-02,0\n", PriceFormat::wide_csv, "t"),
                    InputError);
    CHECK_THROWS_AS(parse_prices("date,A\n2020-01-02,-5\n", PriceFormat::wide_csv, "t"),
                    InputError);
    CHECK_THROWS_AS(parse_prices("date,A\n2020-13-02,1\n", PriceFormat::wide_csv, "t"),
                    InputError);
    // duplicate (date, ticker) observation
    CHECK_THROWS_AS(parse_prices("date,ticker,adj_close\n"
                                 "2020-01-02,A,1\n2020-01-02,A,2\n",
                                 PriceFormat::long_csv, "t"),
                    InputError);
    CHECK_THROWS_AS(parse_prices("", PriceFormat::wide_csv, "t"), InputError);
}

TEST_CASE("to_returns matches the scalar log-ratio oracle") {
    const char* csv =
        "date,A,B\n"
        "2020-01-02,100,10\n"
        "2020-01-03,110,9\n"
        "2020-01-06,121,12\n"
        "2020-01-07,100,12\n";
    const PricePanel panel = parse_prices(csv, PriceFormat::wide_csv, "t");
    const ReturnPanel r = to_returns(panel);
    REQUIRE(r.num_dates() == 3);
    REQUIRE(r.num_instruments() == 2);
    CHECK(r.dates.front() == Date{2020, 1, 3});
    CHECK(r.returns(0, 0) == doctest::Approx(std::log(110.0 / 100.0)).epsilon(1e-15));
    CHECK(r.returns(1, 0) == doctest::Approx(std::log(121.0 / 110.0)).epsilon(1e-15));
    CHECK(r.returns(2, 0) == doctest::Approx(std::log(100.0 / 121.0)).epsilon(1e-15));
    CHECK(r.returns(0, 1) == doctest::Approx(std::log(9.0 / 10.0)).epsilon(1e-15));
    CHECK(r.returns(2, 1) == doctest::Approx(0.0));
}

TEST_CASE("intersect alignment drops incomplete dates") {
    const char* csv =
        "date,ticker,adj_close\n"
        "2020-01-02,A,1\n2020-01-02,B,2\n"
        "2020-01-03,A,1.1\n"  // B missing
        "2020-01-06,A,1.2\n2020-01-06,B,2.2\n";
    AlignmentReport report;
    const PricePanel aligned =
        align(parse_prices(csv, PriceFormat::long_csv, "t"), AlignPolicy::intersect_dates(),
              &report);
    CHECK(aligned.num_dates() == 2);
    CHECK(report.dropped_dates == 1);
    CHECK(report.filled_cells == 0);
    CHECK_FALSE(aligned.has_missing());
}

TEST_CASE("forward fill repairs short gaps and drops hopeless instruments") {
    const char* csv =
        "date,ticker,adj_close\n"
        "2020-01-02,A,1\n2020-01-02,B,2\n"
        "2020-01-03,A,1.1\n"          // B gap 1
        "2020-01-06,A,1.2\n"          // B gap 2
        "2020-01-07,A,1.3\n2020-01-07,B,2.3\n"
        "2020-01-08,A,1.4\n2020-01-08,B,2.4\n";
    const PricePanel loaded = parse_prices(csv, PriceFormat::long_csv, "t");

    AlignmentReport ok;
    const PricePanel filled = align(loaded, AlignPolicy::forward_fill(2), &ok);
    CHECK(filled.num_instruments() == 2);
    CHECK(ok.filled_cells == 2);
    CHECK(filled.prices(1, 1) == 2.0);  // carried over
    CHECK(filled.prices(2, 1) == 2.0);

    AlignmentReport tight;
    const PricePanel dropped = align(loaded, AlignPolicy::forward_fill(1), &tight);
    CHECK(dropped.num_instruments() == 1);  // B's 2-row gap exceeds max_gap=1
    REQUIRE(tight.dropped_tickers.size() == 1);
    CHECK(tight.dropped_tickers[0] == "B");
}

TEST_CASE("leading gaps are never filled") {
    const char* csv =
        "date,ticker,adj_close\n"
        "2020-01-02,A,1\n"
        "2020-01-03,A,1.1\n2020-01-03,B,2\n"
        "2020-01-06,A,1.2\n2020-01-06,B,2.1\n";
    AlignmentReport report;
    const PricePanel aligned = align(parse_prices(csv, PriceFormat::long_csv, "t"),
                                     AlignPolicy::forward_fill(5), &report);
    // B has no value on the first date; nothing to carry, so the date goes.
    CHECK(aligned.num_dates() == 2);
    CHECK(aligned.num_instruments() == 2);
    CHECK(report.dropped_dates == 1);
}

TEST_CASE("alignment refuses panels with fewer than two survivors") {
    const char* csv =
        "date,ticker,adj_close\n"
        "2020-01-02,A,1\n"
        "2020-01-03,A,1.1\n";
    CHECK_THROWS_AS(align(parse_prices(csv, PriceFormat::long_csv, "t"),
                          AlignPolicy::intersect_dates()),
                    InputError);
}

TEST_CASE("return panel CSV round-trip is exact") {
    const PricePanel panel = parse_prices(kWide4x3, PriceFormat::wide_csv, "t");
    const ReturnPanel r = to_returns(align(panel, AlignPolicy::intersect_dates()));
    const ReturnPanel back = return_panel_from_csv(return_panel_to_csv(r), "t");
    REQUIRE(back.num_dates() == r.num_dates());
    CHECK(back.dates == r.dates);
    CHECK(back.tickers == r.tickers);
    for (std::size_t i = 0; i < r.num_dates(); ++i) {
        for (std::size_t j = 0; j < r.num_instruments(); ++j) {
            CHECK(back.returns(i, j) == r.returns(i, j));
        }
    }
}

TEST_CASE("price panel serializes absent cells as empty fields") {
    const char* csv =
        "date,ticker,adj_close\n"
        "2020-01-02,A,1\n2020-01-02,B,2\n"
        "2020-01-03,A,1.5\n";
    const PricePanel panel = parse_prices(csv, PriceFormat::long_csv, "t");
    const std::string out = price_panel_to_csv(panel);
    CHECK(out == "date,A,B\n2020-01-02,1,2\n2020-01-03,1.5,\n");
}
