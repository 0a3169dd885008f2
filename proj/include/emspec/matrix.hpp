#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace emspec {

// Dense row-major matrix of doubles. Just enough surface for the spectral
// pipeline; anything fancier belongs in the routines that use it.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < rows_ && i < cols_; ++i) t += (*this)(i, i);
        return t;
    }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Compensated (Neumaier) accumulator. Fixed summation order plus compensation
// keeps reductions reproducible and accurate for long windows.
class CompensatedSum {
public:
    void add(double value) {
        const double t = sum_ + value;
        if (std::abs(sum_) >= std::abs(value)) {
            comp_ += (sum_ - t) + value;
        } else {
            comp_ += (value - t) + sum_;
        }
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace emspec
