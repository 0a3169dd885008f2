#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "emspec/correlation.hpp"
#include "emspec/csv.hpp"
#include "emspec/errors.hpp"
#include "emspec/synthetic.hpp"

using namespace emspec;

namespace {

ReturnPanel make_panel(std::size_t t_count, std::size_t n,
                       const std::vector<std::vector<double>>& rows) {
    ReturnPanel panel;
    panel.dates = weekday_calendar(Date{2020, 1, 2}, t_count);
    for (std::size_t j = 0; j < n; ++j) panel.tickers.push_back("T" + std::to_string(j));
    panel.returns = Matrix(t_count, n);
    for (std::size_t t = 0; t < t_count; ++t) {
        for (std::size_t j = 0; j < n; ++j) panel.returns(t, j) = rows[t][j];
    }
    return panel;
}

}  // namespace

TEST_CASE("epoch correlation matches the pairwise scalar oracle") {
    // 5 days x 3 instruments; reference values from an independent Pearson
    // computation (normalization cancels, so the 1/M convention is covered
    // by the exact-diagonal and equicorrelation tests).
    const auto panel = make_panel(5, 3,
                                  {{0.010, -0.004, 0.007},
                                   {-0.002, 0.003, -0.001},
                                   {0.005, 0.001, 0.004},
                                   {-0.008, -0.006, -0.009},
                                   {0.003, 0.002, 0.001}});
    const auto epoch = epoch_correlation(panel, 4, EpochSpec{5, 1});
    CHECK(epoch.end_date == panel.dates.back());
    CHECK(epoch.size() == 3);
    CHECK(epoch.corr(0, 1) == doctest::Approx(0.1779759591126211).epsilon(1e-14));
    CHECK(epoch.corr(0, 2) == doctest::Approx(0.98152061684811975).epsilon(1e-14));
    CHECK(epoch.corr(1, 2) == doctest::Approx(0.31826413399318232).epsilon(1e-14));
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(epoch.corr(i, i) == 1.0);
        for (std::size_t j = 0; j < 3; ++j) CHECK(epoch.corr(i, j) == epoch.corr(j, i));
    }
}

TEST_CASE("perfectly collinear instruments give exactly +/-1") {
    const auto panel = make_panel(4, 3,
                                  {{0.01, 0.02, -0.01},
                                   {-0.02, -0.04, 0.02},
                                   {0.015, 0.03, -0.015},
                                   {0.005, 0.01, -0.005}});
    const auto epoch = epoch_correlation(panel, 3, EpochSpec{4, 1});
    CHECK(epoch.corr(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(epoch.corr(0, 2) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(std::fabs(epoch.corr(0, 1)) <= 1.0);  // clamp invariant
    CHECK(std::fabs(epoch.corr(0, 2)) <= 1.0);
}

TEST_CASE("factor panel epochs track the population correlation") {
    const ReturnPanel panel = factor_panel(2000, 20, 0.4, 99);
    const auto epochs = rolling_correlations(panel, EpochSpec{250, 250});
    REQUIRE(epochs.size() == 8);
    for (const auto& epoch : epochs) {
        long double acc = 0.0L;
        std::size_t count = 0;
        for (std::size_t i = 0; i < epoch.size(); ++i) {
            for (std::size_t j = i + 1; j < epoch.size(); ++j) {
                acc += epoch.corr(i, j);
                ++count;
            }
        }
        const double mean = static_cast<double>(acc / count);
        CHECK(mean == doctest::Approx(0.4).epsilon(0.25));  // sampling noise at M=250
    }
}

TEST_CASE("degenerate instruments: error policy names them, drop excises them") {
    auto rows = std::vector<std::vector<double>>{
        {0.01, 0.0, 0.02}, {-0.01, 0.0, 0.01}, {0.02, 0.0, -0.01}};
    const auto panel = make_panel(3, 3, rows);
    CHECK_THROWS_WITH_AS(epoch_correlation(panel, 2, EpochSpec{3, 1}),
                         doctest::Contains("T1"), InputError);
    const auto epoch = epoch_correlation(panel, 2, EpochSpec{3, 1}, DegeneratePolicy::drop);
    CHECK(epoch.size() == 2);
    REQUIRE(epoch.columns.size() == 2);
    CHECK(epoch.columns[0] == 0);
    CHECK(epoch.columns[1] == 2);
}

TEST_CASE("rolling epochs respect length and shift") {
    const ReturnPanel panel = factor_panel(100, 4, 0.0, 3);
    const auto epochs = rolling_correlations(panel, EpochSpec{20, 5});
    REQUIRE(epochs.size() == 17);  // (100 - 20) / 5 + 1
    CHECK(epochs.front().end_index == 19);
    CHECK(epochs.back().end_index == 99);
    CHECK(epochs[1].end_index == 24);
    for (const auto& e : epochs) CHECK(e.end_date == panel.dates[e.end_index]);
}

TEST_CASE("serial and parallel rolling correlations agree bitwise") {
    const ReturnPanel panel = factor_panel(300, 10, 0.3, 7);
    const auto par = rolling_correlations(panel, EpochSpec{20, 3});
    const auto ser = rolling_correlations_serial(panel, EpochSpec{20, 3});
    REQUIRE(par.size() == ser.size());
    for (std::size_t k = 0; k < par.size(); ++k) {
        for (std::size_t i = 0; i < par[k].size(); ++i) {
            for (std::size_t j = 0; j < par[k].size(); ++j) {
                CHECK(par[k].corr(i, j) == ser[k].corr(i, j));
            }
        }
    }
}

TEST_CASE("epoch windows shorter than the panel are rejected") {
    const ReturnPanel panel = factor_panel(10, 3, 0.0, 1);
    CHECK_THROWS_AS(epoch_correlation(panel, 5, EpochSpec{7, 1}), InputError);
    CHECK_THROWS_AS(epoch_correlation(panel, 10, EpochSpec{5, 1}), InputError);
    CHECK_THROWS_AS(rolling_correlations(panel, EpochSpec{11, 1}), InputError);
}

TEST_CASE("binary epoch dump round-trips and rejects foreign files") {
    const ReturnPanel panel = factor_panel(60, 5, 0.2, 19);
    const auto epochs = rolling_correlations(panel, EpochSpec{20, 10});
    REQUIRE(epochs.size() == 5);
    const std::string path = "epoch_dump_test.bin";
    write_epoch_dump(path, epochs);
    const auto records = read_epoch_dump(path);
    REQUIRE(records.size() == epochs.size());
    for (std::size_t k = 0; k < epochs.size(); ++k) {
        CHECK(records[k].end_date == epochs[k].end_date);
        REQUIRE(records[k].corr.rows() == epochs[k].size());
        for (std::size_t i = 0; i < epochs[k].size(); ++i) {
            for (std::size_t j = 0; j < epochs[k].size(); ++j) {
                CHECK(records[k].corr(i, j) == epochs[k].corr(i, j));
            }
        }
    }
    std::remove(path.c_str());

    const std::string bogus = "not_a_dump.bin";
    write_file_atomic(bogus, "date,whatever\n");
    CHECK_THROWS_WITH_AS(read_epoch_dump(bogus), doctest::Contains("bad magic"), InputError);
    std::remove(bogus.c_str());
}
