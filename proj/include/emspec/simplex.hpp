#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <vector>

namespace emspec {

struct SimplexResult {
    std::vector<double> x;
    double fx = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

// Derivative-free Nelder-Mead minimization with the textbook coefficients
// (reflect 1, expand 2, contract 1/2, shrink 1/2). Deterministic. Converged
// when every vertex sits within `tol` (infinity norm) of the best one.
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                 const std::vector<double>& start, double initial_step,
                                 double tol, std::size_t max_iter) {
    const std::size_t dim = start.size();
    std::vector<std::vector<double>> verts(dim + 1, start);
    for (std::size_t i = 0; i < dim; ++i) verts[i + 1][i] += initial_step;
    std::vector<double> fv(dim + 1);
    for (std::size_t v = 0; v <= dim; ++v) fv[v] = f(verts[v]);

    const auto order = [&] {
        std::vector<std::size_t> idx(dim + 1);
        for (std::size_t i = 0; i <= dim; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> nv(dim + 1);
        std::vector<double> nf(dim + 1);
        for (std::size_t i = 0; i <= dim; ++i) {
            nv[i] = std::move(verts[idx[i]]);
            nf[i] = fv[idx[i]];
        }
        verts = std::move(nv);
        fv = std::move(nf);
    };

    const auto spread = [&] {
        double worst = 0.0;
        for (std::size_t v = 1; v <= dim; ++v) {
            for (std::size_t i = 0; i < dim; ++i) {
                worst = std::max(worst, std::abs(verts[v][i] - verts[0][i]));
            }
        }
        return worst;
    };

    SimplexResult out;
    for (out.iterations = 0; out.iterations < max_iter; ++out.iterations) {
        order();
        if (spread() < tol) {
            out.converged = true;
            break;
        }

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t v = 0; v < dim; ++v) {
            for (std::size_t i = 0; i < dim; ++i) centroid[i] += verts[v][i];
        }
        for (double& c : centroid) c /= static_cast<double>(dim);

        const auto blend = [&](double coeff) {
            std::vector<double> p(dim);
            for (std::size_t i = 0; i < dim; ++i) {
                p[i] = centroid[i] + coeff * (verts[dim][i] - centroid[i]);
            }
            return p;
        };

        auto reflected = blend(-1.0);
        const double fr = f(reflected);
        if (fr < fv[0]) {
            auto expanded = blend(-2.0);
            const double fe = f(expanded);
            if (fe < fr) {
                verts[dim] = std::move(expanded);
                fv[dim] = fe;
            } else {
                verts[dim] = std::move(reflected);
                fv[dim] = fr;
            }
        } else if (fr < fv[dim - 1]) {
            verts[dim] = std::move(reflected);
            fv[dim] = fr;
        } else {
            const bool outside = fr < fv[dim];
            auto contracted = blend(outside ? -0.5 : 0.5);
            const double fc = f(contracted);
            if (fc < std::min(fr, fv[dim])) {
                verts[dim] = std::move(contracted);
                fv[dim] = fc;
            } else {
                for (std::size_t v = 1; v <= dim; ++v) {
                    for (std::size_t i = 0; i < dim; ++i) {
                        verts[v][i] = verts[0][i] + 0.5 * (verts[v][i] - verts[0][i]);
                    }
                    fv[v] = f(verts[v]);
                }
            }
        }
    }

    order();
    out.x = verts[0];
    out.fx = fv[0];
    return out;
}

}  // namespace emspec
