#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "emspec/dates.hpp"
#include "emspec/matrix.hpp"
#include "emspec/panel.hpp"

namespace emspec {

// Rolling-window geometry: windows of epoch_len return rows, consecutive
// windows shifted by `shift` rows.
struct EpochSpec {
    std::size_t epoch_len = 20;
    std::size_t shift = 1;

    void validate() const;  // epoch_len >= 2, shift >= 1
};

// What to do with an instrument whose return is constant inside a window.
enum class DegeneratePolicy {
    error,  // refuse the epoch, listing the offenders
    drop,   // excise the offenders from this epoch only
};

// Pearson correlation matrix of one window, stamped with the window's last
// trading date. columns[k] is the return-panel instrument behind matrix
// row/column k; it only shrinks under DegeneratePolicy::drop.
struct EpochCorrelation {
    Date end_date;
    std::size_t end_index = 0;
    EpochSpec epoch;
    std::vector<std::size_t> columns;
    Matrix corr;

    std::size_t size() const { return columns.size(); }
};

// Correlation of the window covering return rows [end_index-M+1, end_index],
// population (1/M) moments. Diagonal is exactly 1, off-diagonal entries are
// clamped to [-1, 1], and the matrix is exactly symmetric by construction.
EpochCorrelation epoch_correlation(const ReturnPanel& returns, std::size_t end_index,
                                   const EpochSpec& spec,
                                   DegeneratePolicy policy = DegeneratePolicy::error);

// End rows of every epoch: M-1, M-1+shift, ...; count floor((R-M)/shift)+1.
std::vector<std::size_t> epoch_end_indices(std::size_t num_return_rows,
                                           const EpochSpec& spec);

// One EpochCorrelation per end index, ordered by end date. The parallel
// variant maps epochs across workers; outputs are bit-identical to the serial
// loop regardless of worker count.
std::vector<EpochCorrelation> rolling_correlations(
    const ReturnPanel& returns, const EpochSpec& spec,
    DegeneratePolicy policy = DegeneratePolicy::error);
std::vector<EpochCorrelation> rolling_correlations_serial(
    const ReturnPanel& returns, const EpochSpec& spec,
    DegeneratePolicy policy = DegeneratePolicy::error);

// Binary inspection dump: magic "EMSPECC1", then per epoch
//   int64 end_date (yyyymmdd), uint32 N, N(N+1)/2 float64 row-major lower
//   triangle (diagonal included), all little-endian.
struct EpochMatrixRecord {
    Date end_date;
    Matrix corr;
};
void write_epoch_dump(const std::string& path,
                      const std::vector<EpochCorrelation>& epochs);
std::vector<EpochMatrixRecord> read_epoch_dump(const std::string& path);

}  // namespace emspec
