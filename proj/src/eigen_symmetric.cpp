#include "emspec/eigen_symmetric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "emspec/csv.hpp"
#include "emspec/errors.hpp"

namespace emspec {

namespace {

constexpr int kMaxIterationsPerEigenvalue = 30;

void check_symmetric(const Matrix& a) {
    if (a.rows() != a.cols()) {
        throw InputError("eig_symmetric requires a square matrix, got " +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = i + 1; j < a.cols(); ++j) {
            worst = std::max(worst, std::abs(a(i, j) - a(j, i)));
        }
    }
    if (worst > 1e-12) {
        throw InputError("matrix not symmetric: max |a_ij - a_ji| = " + format_double(worst));
    }
}

// Householder reduction of the symmetric matrix held in v to tridiagonal
// form; d receives the diagonal, e the subdiagonal (e[0] = 0). When
// want_vectors is set, v is replaced by the accumulated orthogonal transform.
void householder_tridiagonalize(Matrix& v, std::vector<double>& d, std::vector<double>& e,
                                bool want_vectors) {
    const std::size_t n = v.rows();
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) d[j] = v(n - 1, j);

    for (std::size_t i = n - 1; i > 0; --i) {
        double scale = 0.0;
        double h = 0.0;
        for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
        if (scale == 0.0) {
            e[i] = d[i - 1];
            for (std::size_t j = 0; j < i; ++j) {
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
                v(j, i) = 0.0;
            }
        } else {
            for (std::size_t k = 0; k < i; ++k) {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = std::sqrt(h);
            if (f > 0.0) g = -g;
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                v(j, i) = f;
                g = e[j] + v(j, j) * f;
                for (std::size_t k = j + 1; k < i; ++k) {
                    g += v(k, j) * d[k];
                    e[k] += v(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (std::size_t j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            const double hh = f / (h + h);
            for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (std::size_t k = j; k < i; ++k) {
                    v(k, j) -= f * e[k] + g * d[k];
                }
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
            }
        }
        d[i] = h;
    }

    if (want_vectors) {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            v(n - 1, i) = v(i, i);
            v(i, i) = 1.0;
            const double h = d[i + 1];
            if (h != 0.0) {
                for (std::size_t k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
                for (std::size_t j = 0; j <= i; ++j) {
                    double g = 0.0;
                    for (std::size_t k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
                    for (std::size_t k = 0; k <= i; ++k) v(k, j) -= g * d[k];
                }
            }
            for (std::size_t k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
        }
        for (std::size_t j = 0; j < n; ++j) {
            d[j] = v(n - 1, j);
            v(n - 1, j) = 0.0;
        }
        v(n - 1, n - 1) = 1.0;
    } else {
        // The reduction leaves the tridiagonal diagonal on the matrix
        // diagonal; d currently holds Householder norms, so recover it.
        for (std::size_t j = 0; j < n; ++j) d[j] = v(j, j);
    }
    e[0] = 0.0;
}

// Implicit-shift QL on the tridiagonal (d, e). Eigenvalues land in d sorted
// ascending; when v is non-null its columns are rotated alongside.
void ql_implicit_shift(std::vector<double>& d, std::vector<double>& e, Matrix* v) {
    const std::size_t n = d.size();
    if (n == 0) return;
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    double f = 0.0;
    double tst1 = 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        std::size_t m = l;
        while (m < n && std::abs(e[m]) > eps * tst1) ++m;

        if (m > l) {
            int iter = 0;
            do {
                if (++iter > kMaxIterationsPerEigenvalue) {
                    throw NumericalError(
                        "eigensolver failed to converge for eigenvalue " + std::to_string(l) +
                        " after " + std::to_string(kMaxIterationsPerEigenvalue) +
                        " iterations (residual " + format_double(std::abs(e[l])) +
                        ", threshold " + format_double(eps * tst1) + ")");
                }
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0.0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
                f += h;

                p = d[m];
                double c = 1.0;
                double c2 = c;
                double c3 = c;
                const double el1 = e[l + 1];
                double s = 0.0;
                double s2 = 0.0;
                for (std::size_t i = m; i-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = std::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if (v != nullptr) {
                        for (std::size_t k = 0; k < n; ++k) {
                            h = (*v)(k, i + 1);
                            (*v)(k, i + 1) = s * (*v)(k, i) + c * h;
                            (*v)(k, i) = c * (*v)(k, i) - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // Ascending selection sort, dragging eigenvector columns along.
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::size_t k = i;
        double p = d[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            if (d[j] < p) {
                k = j;
                p = d[j];
            }
        }
        if (k != i) {
            d[k] = d[i];
            d[i] = p;
            if (v != nullptr) {
                for (std::size_t row = 0; row < n; ++row) {
                    std::swap((*v)(row, i), (*v)(row, k));
                }
            }
        }
    }
}

}  // namespace

EigenDecomposition eig_symmetric(const Matrix& a) {
    check_symmetric(a);
    const std::size_t n = a.rows();
    EigenDecomposition out;
    if (n == 0) return out;

    Matrix v = a;
    std::vector<double> d, e;
    householder_tridiagonalize(v, d, e, /*want_vectors=*/true);
    ql_implicit_shift(d, e, &v);
    out.eigenvalues = std::move(d);
    out.eigenvectors = std::move(v);
    return out;
}

std::vector<double> eig_symmetric_values(const Matrix& a) {
    check_symmetric(a);
    const std::size_t n = a.rows();
    if (n == 0) return {};

    Matrix v = a;
    std::vector<double> d, e;
    householder_tridiagonalize(v, d, e, /*want_vectors=*/false);
    ql_implicit_shift(d, e, nullptr);
    return d;
}

}  // namespace emspec
