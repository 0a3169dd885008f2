#include "emspec/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "emspec/csv.hpp"
#include "emspec/errors.hpp"
#include "emspec/parallel.hpp"

namespace emspec {

void EpochSpec::validate() const {
    if (epoch_len < 2) {
        throw InputError("epoch length must be at least 2, got " + std::to_string(epoch_len));
    }
    if (shift < 1) {
        throw InputError("epoch shift must be at least 1");
    }
}

EpochCorrelation epoch_correlation(const ReturnPanel& returns, std::size_t end_index,
                                   const EpochSpec& spec, DegeneratePolicy policy) {
    spec.validate();
    const std::size_t m = spec.epoch_len;
    const std::size_t n = returns.num_instruments();
    if (end_index + 1 < m || end_index >= returns.num_dates()) {
        throw InputError("epoch end index " + std::to_string(end_index) +
                         " out of range for window of " + std::to_string(m) + " rows");
    }
    const std::size_t start = end_index + 1 - m;
    const Date end_date = returns.dates[end_index];

    // Two-pass standardization: population mean, then centered second moment.
    std::vector<double> mean(n), sigma(n);
    std::vector<std::size_t> degenerate;
    for (std::size_t j = 0; j < n; ++j) {
        CompensatedSum acc;
        for (std::size_t t = start; t <= end_index; ++t) acc.add(returns.returns(t, j));
        mean[j] = acc.value() / static_cast<double>(m);
        CompensatedSum sq;
        for (std::size_t t = start; t <= end_index; ++t) {
            const double d = returns.returns(t, j) - mean[j];
            sq.add(d * d);
        }
        const double var = sq.value() / static_cast<double>(m);
        sigma[j] = std::sqrt(var);
        if (!(var > 0.0)) degenerate.push_back(j);
    }

    std::vector<std::size_t> keep;
    if (degenerate.empty()) {
        keep.resize(n);
        for (std::size_t j = 0; j < n; ++j) keep[j] = j;
    } else if (policy == DegeneratePolicy::error) {
        std::string names;
        for (std::size_t j : degenerate) {
            if (!names.empty()) names += ", ";
            names += returns.tickers[j];
        }
        throw InputError("zero-variance instruments in epoch ending " + end_date.to_string() +
                         ": " + names + " (use degenerate=drop to excise per epoch)");
    } else {
        for (std::size_t j = 0; j < n; ++j) {
            if (!std::binary_search(degenerate.begin(), degenerate.end(), j)) keep.push_back(j);
        }
        if (keep.size() < 2) {
            throw InputError("epoch ending " + end_date.to_string() +
                             " has fewer than 2 non-degenerate instruments");
        }
    }

    const std::size_t k = keep.size();
    Matrix z(k, m);
    for (std::size_t a = 0; a < k; ++a) {
        const std::size_t j = keep[a];
        for (std::size_t t = 0; t < m; ++t) {
            z(a, t) = (returns.returns(start + t, j) - mean[j]) / sigma[j];
        }
    }

    EpochCorrelation out;
    out.end_date = end_date;
    out.end_index = end_index;
    out.epoch = spec;
    out.columns = std::move(keep);
    out.corr = Matrix(k, k);
    for (std::size_t a = 0; a < k; ++a) {
        out.corr(a, a) = 1.0;
        for (std::size_t b = 0; b < a; ++b) {
            CompensatedSum dot;
            for (std::size_t t = 0; t < m; ++t) dot.add(z(a, t) * z(b, t));
            double c = dot.value() / static_cast<double>(m);
            c = std::clamp(c, -1.0, 1.0);
            out.corr(a, b) = c;
            out.corr(b, a) = c;
        }
    }
    return out;
}

std::vector<std::size_t> epoch_end_indices(std::size_t num_return_rows, const EpochSpec& spec) {
    spec.validate();
    if (num_return_rows < spec.epoch_len) {
        throw InputError("need at least " + std::to_string(spec.epoch_len) +
                         " return rows for one epoch, got " + std::to_string(num_return_rows));
    }
    std::vector<std::size_t> ends;
    for (std::size_t e = spec.epoch_len - 1; e < num_return_rows; e += spec.shift) {
        ends.push_back(e);
    }
    return ends;
}

std::vector<EpochCorrelation> rolling_correlations(const ReturnPanel& returns,
                                                   const EpochSpec& spec,
                                                   DegeneratePolicy policy) {
    const auto ends = epoch_end_indices(returns.num_dates(), spec);
    std::vector<EpochCorrelation> out(ends.size());
    parallel_for(ends.size(),
                 [&](std::size_t i) { out[i] = epoch_correlation(returns, ends[i], spec, policy); });
    return out;
}

std::vector<EpochCorrelation> rolling_correlations_serial(const ReturnPanel& returns,
                                                          const EpochSpec& spec,
                                                          DegeneratePolicy policy) {
    const auto ends = epoch_end_indices(returns.num_dates(), spec);
    std::vector<EpochCorrelation> out;
    out.reserve(ends.size());
    for (std::size_t e : ends) out.push_back(epoch_correlation(returns, e, spec, policy));
    return out;
}

namespace {

constexpr char kDumpMagic[8] = {'E', 'M', 'S', 'P', 'E', 'C', 'C', '1'};

template <class T>
void put_le(std::string& out, T value) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(const std::string& buf, std::size_t& pos, const std::string& path) {
    if (pos + sizeof(T) > buf.size()) {
        throw InputError(path + ": truncated epoch dump");
    }
    T value;
    std::memcpy(&value, buf.data() + pos, sizeof(T));
    pos += sizeof(T);
    return value;
}

}  // namespace

void write_epoch_dump(const std::string& path, const std::vector<EpochCorrelation>& epochs) {
    std::string out(kDumpMagic, sizeof(kDumpMagic));
    for (const auto& ep : epochs) {
        put_le(out, static_cast<std::int64_t>(ep.end_date.ordinal()));
        put_le(out, static_cast<std::uint32_t>(ep.size()));
        for (std::size_t i = 0; i < ep.size(); ++i) {
            for (std::size_t j = 0; j <= i; ++j) put_le(out, ep.corr(i, j));
        }
    }
    write_file_atomic(path, out);
}

std::vector<EpochMatrixRecord> read_epoch_dump(const std::string& path) {
    const std::string buf = read_text_file(path);
    if (buf.size() < sizeof(kDumpMagic) ||
        std::memcmp(buf.data(), kDumpMagic, sizeof(kDumpMagic)) != 0) {
        throw InputError(path + ": not an epoch dump (bad magic)");
    }
    std::vector<EpochMatrixRecord> records;
    std::size_t pos = sizeof(kDumpMagic);
    while (pos < buf.size()) {
        EpochMatrixRecord rec;
        rec.end_date = Date::from_ordinal(get_le<std::int64_t>(buf, pos, path));
        const auto n = get_le<std::uint32_t>(buf, pos, path);
        rec.corr = Matrix(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                const double v = get_le<double>(buf, pos, path);
                rec.corr(i, j) = v;
                rec.corr(j, i) = v;
            }
        }
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace emspec
