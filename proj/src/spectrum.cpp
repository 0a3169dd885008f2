#include "emspec/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "emspec/csv.hpp"
#include "emspec/eigen_symmetric.hpp"
#include "emspec/errors.hpp"
#include "emspec/parallel.hpp"

namespace emspec {

void PowerMapParams::validate() const {
    if (!(epsilon >= 0.0)) {
        throw InputError("power-map epsilon must be >= 0, got " + format_double(epsilon));
    }
}

double power_map(double c, const PowerMapParams& params) {
    params.validate();
    if (params.epsilon == 0.0 || c == 0.0) return c;
    return std::copysign(std::pow(std::abs(c), 1.0 + params.epsilon), c);
}

Matrix power_map(const Matrix& corr, const PowerMapParams& params) {
    params.validate();
    Matrix out = corr;
    if (params.epsilon == 0.0) return out;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const double mapped = power_map(corr(i, j), params);
            out(i, j) = mapped;
            out(j, i) = mapped;
        }
        // |c|^(1+eps) fixes 1 and -1, so the unit diagonal passes through.
    }
    return out;
}

SpectrumSplit split_spectrum(std::vector<double> eigs_ascending, Date end_date,
                             std::size_t epoch_len) {
    SpectrumSplit out;
    out.end_date = end_date;
    const std::size_t n = eigs_ascending.size();
    out.all_eigenvalues = std::move(eigs_ascending);
    if (n == 0) return out;
    out.lambda_max = out.all_eigenvalues.back();

    const std::size_t emerging_count = n > epoch_len ? n - epoch_len + 1 : 0;
    if (emerging_count == 0) {
        out.normal = out.all_eigenvalues;
        return out;
    }

    // Smallest-|lambda| membership; stable index tie-break keeps the
    // partition deterministic even with exactly tied magnitudes.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(out.all_eigenvalues[a]) < std::abs(out.all_eigenvalues[b]);
    });
    std::vector<bool> is_emerging(n, false);
    for (std::size_t k = 0; k < emerging_count; ++k) is_emerging[order[k]] = true;
    for (std::size_t i = 0; i < n; ++i) {
        (is_emerging[i] ? out.emerging : out.normal).push_back(out.all_eigenvalues[i]);
    }

    out.lambda_min_emerging = out.emerging.front();
    if (!out.normal.empty()) {
        double max_emerging_abs = 0.0;
        for (double v : out.emerging) max_emerging_abs = std::max(max_emerging_abs, std::abs(v));
        double min_normal_abs = std::abs(out.normal.front());
        for (double v : out.normal) min_normal_abs = std::min(min_normal_abs, std::abs(v));
        out.separation_gap = min_normal_abs - max_emerging_abs;
        out.gap_nonpositive = *out.separation_gap <= 0.0;
    }
    return out;
}

namespace {

struct CentralMoments {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
};

CentralMoments central_moments(const std::vector<double>& xs) {
    CentralMoments cm;
    cm.n = xs.size();
    if (cm.n == 0) return cm;
    CompensatedSum s;
    for (double x : xs) s.add(x);
    cm.mean = s.value() / static_cast<double>(cm.n);
    CompensatedSum s2, s3, s4;
    for (double x : xs) {
        const double d = x - cm.mean;
        s2.add(d * d);
        s3.add(d * d * d);
        s4.add(d * d * d * d);
    }
    cm.m2 = s2.value() / static_cast<double>(cm.n);
    cm.m3 = s3.value() / static_cast<double>(cm.n);
    cm.m4 = s4.value() / static_cast<double>(cm.n);
    return cm;
}

}  // namespace

std::optional<double> sample_skewness(const std::vector<double>& xs) {
    const auto cm = central_moments(xs);
    if (cm.n < 4 || cm.m2 <= 0.0) return std::nullopt;
    return cm.m3 / std::pow(cm.m2, 1.5);
}

std::optional<double> sample_excess_kurtosis(const std::vector<double>& xs) {
    const auto cm = central_moments(xs);
    if (cm.n < 4 || cm.m2 <= 0.0) return std::nullopt;
    return cm.m4 / (cm.m2 * cm.m2) - 3.0;
}

ShapeStats spectrum_shape_stats(const SpectrumSplit& split, std::size_t bins) {
    if (split.emerging.empty()) {
        throw InputError("spectrum_shape_stats needs a non-empty emerging spectrum");
    }
    if (bins == 0) throw InputError("histogram needs at least one bin");

    ShapeStats out;
    const auto& xs = split.emerging;
    const auto cm = central_moments(xs);
    if (cm.n >= 4) {
        out.variance = cm.m2;
        if (cm.m2 > 0.0) {
            out.skewness = cm.m3 / std::pow(cm.m2, 1.5);
            out.excess_kurtosis = cm.m4 / (cm.m2 * cm.m2) - 3.0;
        }
    }

    double lo = *std::min_element(xs.begin(), xs.end());
    double hi = *std::max_element(xs.begin(), xs.end());
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    out.hist_lo = lo;
    out.hist_hi = hi;
    out.histogram.assign(bins, 0);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (double x : xs) {
        auto b = static_cast<std::size_t>((x - lo) / width);
        if (b >= bins) b = bins - 1;  // right edge lands in the last bin
        ++out.histogram[b];
    }
    return out;
}

MarchenkoPastur marchenko_pastur(double q, double sigma2) {
    if (!(q > 0.0)) throw InputError("Marchenko-Pastur Q must be positive");
    if (!(sigma2 > 0.0)) throw InputError("Marchenko-Pastur sigma2 must be positive");
    MarchenkoPastur mp;
    mp.q = q;
    mp.sigma2 = sigma2;
    const double root = 1.0 / std::sqrt(q);
    mp.lambda_minus = sigma2 * (1.0 - root) * (1.0 - root);
    mp.lambda_plus = sigma2 * (1.0 + root) * (1.0 + root);
    return mp;
}

double MarchenkoPastur::density(double lambda) const {
    if (lambda <= lambda_minus || lambda >= lambda_plus || lambda <= 0.0) return 0.0;
    const double num = (lambda_plus - lambda) * (lambda - lambda_minus);
    return q / (2.0 * std::numbers::pi * sigma2 * lambda) * std::sqrt(num);
}

SpectrumSplit epoch_spectrum(const EpochCorrelation& epoch, const PowerMapParams& params) {
    const Matrix distorted = power_map(epoch.corr, params);
    return split_spectrum(eig_symmetric_values(distorted), epoch.end_date,
                          epoch.epoch.epoch_len);
}

std::vector<SpectrumSplit> rolling_spectra(const std::vector<EpochCorrelation>& epochs,
                                           const PowerMapParams& params) {
    std::vector<SpectrumSplit> out(epochs.size());
    parallel_for(epochs.size(),
                 [&](std::size_t i) { out[i] = epoch_spectrum(epochs[i], params); });
    return out;
}

std::vector<SpectrumSplit> rolling_spectra_serial(const std::vector<EpochCorrelation>& epochs,
                                                  const PowerMapParams& params) {
    std::vector<SpectrumSplit> out;
    out.reserve(epochs.size());
    for (const auto& ep : epochs) out.push_back(epoch_spectrum(ep, params));
    return out;
}

std::string spectra_to_csv(const std::vector<SpectrumSplit>& spectra) {
    std::string out = "end_date,lambda_max,lambda_min_emerging,separation_gap,emerging_kurtosis\n";
    for (const auto& s : spectra) {
        out += s.end_date.to_string();
        out += ',';
        out += format_double(s.lambda_max);
        out += ',';
        if (s.lambda_min_emerging) out += format_double(*s.lambda_min_emerging);
        out += ',';
        if (s.separation_gap) out += format_double(*s.separation_gap);
        out += ',';
        const auto kurt = sample_excess_kurtosis(s.emerging);
        if (kurt) out += format_double(*kurt);
        out += '\n';
    }
    return out;
}

std::string emerging_to_csv(const std::vector<SpectrumSplit>& spectra) {
    std::string out = "end_date,count,values\n";
    for (const auto& s : spectra) {
        out += s.end_date.to_string();
        out += ',';
        out += std::to_string(s.emerging.size());
        for (double v : s.emerging) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

std::vector<SpectrumSplit> emerging_from_csv(const std::string& csv_text,
                                             const std::string& origin) {
    std::vector<SpectrumSplit> out;
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
            if (fields.size() < 2 || fields[0] != "end_date" || fields[1] != "count") {
                throw InputError(origin + ": unexpected emerging-spectra header '" + line + "'");
            }
            saw_header = true;
            continue;
        }
        const std::string where = origin + ":row " + std::to_string(line_no);
        if (fields.size() < 2) throw InputError(where + ": expected end_date,count,...");
        SpectrumSplit s;
        s.end_date = Date::parse(fields[0]);
        const double count_raw = parse_double(fields[1], where + " (count)");
        const auto count = static_cast<std::size_t>(count_raw);
        if (count_raw != static_cast<double>(count) || fields.size() != count + 2) {
            throw InputError(where + ": value count mismatch");
        }
        s.emerging.reserve(count);
        for (std::size_t k = 0; k < count; ++k) {
            s.emerging.push_back(parse_double(fields[k + 2], where));
        }
        if (!s.emerging.empty()) s.lambda_min_emerging = s.emerging.front();
        out.push_back(std::move(s));
    }
    if (!saw_header) throw InputError(origin + ": empty emerging-spectra file");
    return out;
}

}  // namespace emspec
