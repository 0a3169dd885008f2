#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "emspec/correlation.hpp"
#include "emspec/dates.hpp"
#include "emspec/matrix.hpp"

namespace emspec {

struct PowerMapParams {
    double epsilon = 0.01;

    void validate() const;  // epsilon >= 0
};

// Elementwise sign-preserving distortion c -> sign(c)|c|^(1+eps). Keeps the
// diagonal, symmetry and signs; breaks the exact-zero eigenvalue degeneracy
// of rank-deficient correlation matrices.
double power_map(double c, const PowerMapParams& params);
Matrix power_map(const Matrix& corr, const PowerMapParams& params);

// Eigenvalues of one distorted epoch matrix, partitioned into the emerging
// cluster (the N-M+1 of smallest magnitude; those forced to zero by rank
// before distortion) and the normal remainder. Both sublists stay ascending.
struct SpectrumSplit {
    Date end_date;
    std::vector<double> all_eigenvalues;
    std::vector<double> emerging;  // empty when M >= N
    std::vector<double> normal;
    std::optional<double> lambda_min_emerging;  // smallest emerging value
    double lambda_max = 0.0;                    // largest eigenvalue overall
    std::optional<double> separation_gap;       // min|normal| - max|emerging|
    bool gap_nonpositive = false;               // flagged, never an error
};

SpectrumSplit split_spectrum(std::vector<double> eigs_ascending, Date end_date,
                             std::size_t epoch_len);

// Central-moment summary of the emerging eigenvalues plus a fixed-bin
// histogram for plotting. Moments are absent below 4 values; skewness and
// kurtosis are additionally absent for zero variance.
struct ShapeStats {
    std::optional<double> variance;
    std::optional<double> skewness;
    std::optional<double> excess_kurtosis;
    std::vector<std::size_t> histogram;
    double hist_lo = 0.0;
    double hist_hi = 0.0;
};

ShapeStats spectrum_shape_stats(const SpectrumSplit& split, std::size_t bins = 40);

// Moment helpers shared with the shape stats (population moments).
std::optional<double> sample_skewness(const std::vector<double>& xs);
std::optional<double> sample_excess_kurtosis(const std::vector<double>& xs);

// Marchenko-Pastur null model for Q = T/N, variance scale sigma2; plot
// overlay only.
struct MarchenkoPastur {
    double q = 1.0;
    double sigma2 = 1.0;
    double lambda_minus = 0.0;
    double lambda_plus = 0.0;

    double density(double lambda) const;  // 0 outside (lambda_minus, lambda_plus)
};

MarchenkoPastur marchenko_pastur(double q, double sigma2);

// Distort + decompose + split for one epoch, and the rolling map over all
// epochs (parallel variant bit-identical to the serial reference).
SpectrumSplit epoch_spectrum(const EpochCorrelation& epoch, const PowerMapParams& params);
std::vector<SpectrumSplit> rolling_spectra(const std::vector<EpochCorrelation>& epochs,
                                           const PowerMapParams& params);
std::vector<SpectrumSplit> rolling_spectra_serial(const std::vector<EpochCorrelation>& epochs,
                                                  const PowerMapParams& params);

// Per-epoch record: end_date,lambda_max,lambda_min_emerging,separation_gap,
// emerging_kurtosis. Optional fields serialize as empty cells.
std::string spectra_to_csv(const std::vector<SpectrumSplit>& spectra);

// Cache of full emerging spectra (rows: end_date,count,v1,...,vcount) written
// by the indicators stage so the outlier stage can run standalone. The reader
// restores end_date and the emerging list only; the other SpectrumSplit
// fields stay at their empty defaults.
std::string emerging_to_csv(const std::vector<SpectrumSplit>& spectra);
std::vector<SpectrumSplit> emerging_from_csv(const std::string& csv_text,
                                             const std::string& origin = "<memory>");

}  // namespace emspec
