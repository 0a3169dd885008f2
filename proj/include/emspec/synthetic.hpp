#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "emspec/dates.hpp"
#include "emspec/panel.hpp"

namespace emspec {

// Synthetic trading calendar: `count` consecutive weekdays starting at the
// first weekday on or after `start`.
std::vector<Date> weekday_calendar(Date start, std::size_t count);

// One-factor return panel: r_i(t) = vol * (sqrt(rho) f(t) + sqrt(1-rho) e_i(t))
// with independent standard normals, so the population correlation of every
// pair is exactly rho. rho = 0 gives the i.i.d. Gaussian panel.
ReturnPanel factor_panel(std::size_t num_dates, std::size_t num_instruments, double rho,
                         std::uint64_t seed, double vol = 0.01);
ReturnPanel gaussian_panel(std::size_t num_dates, std::size_t num_instruments,
                           std::uint64_t seed, double vol = 0.01);

// Market-plus-sector Gaussian panel: instruments are split into `num_sectors`
// contiguous blocks and load on one market factor (variance share mkt_weight)
// and one sector factor (sector_weight). Pairwise correlation is
// mkt_weight + sector_weight within a block and mkt_weight across blocks,
// giving the dispersed correlation structure of a real equity panel.
ReturnPanel sector_panel(std::size_t num_dates, std::size_t num_instruments,
                         std::size_t num_sectors, double mkt_weight, double sector_weight,
                         std::uint64_t seed, double vol = 0.01);

// Two-regime crash fixture: factor correlation rho_first for the first half,
// rho_second after the midpoint, plus one burst window of `burst_len` rows
// where the factor correlation spikes to burst_rho and `duplicate_pairs`
// instrument pairs move in near-perfect lockstep. Each locked pair pins one
// eigenvalue at 1-c ~ 0, well below the emerging band of the distorted
// matrix, so the burst epoch's lower half turns bimodal — the displaced
// cluster the mode test is supposed to find. Everything else is null.
struct TwoRegimeSpec {
    std::size_t num_dates = 620;
    std::size_t num_instruments = 120;
    double rho_first = 0.1;
    double rho_second = 0.7;
    std::size_t burst_start = 560;  // row index of the first burst row
    std::size_t burst_len = 20;
    double burst_rho = 0.9;
    std::size_t duplicate_pairs = 49;  // pairs (0,1), (2,3), ... locked during the burst
    double duplicate_noise = 0.0;    // residual noise inside a locked pair, in vol units
    double vol = 0.01;
    std::uint64_t seed = 5;
};

ReturnPanel two_regime_panel(const TwoRegimeSpec& spec);

// Price panel consistent with the given log returns (first price = initial),
// for fixtures that must enter through the ingest stage.
PricePanel prices_from_returns(const ReturnPanel& returns, double initial = 100.0);

}  // namespace emspec
