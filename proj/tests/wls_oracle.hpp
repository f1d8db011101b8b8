#pragma once

// Test-only weighted-least-squares reference: explicit normal equations in
// the unscaled parameterization (design row (1, X_j - x)), solved by
// full-pivot Gaussian elimination. Deliberately shares no code with the
// library's fit path.

#include "llr/kernels.hpp"
#include "llr/lattice.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdlib>
#include <vector>

namespace llr_test {

struct WlsSolution {
    bool ok = false;
    double intercept = 0.0;
    Eigen::VectorXd slope;
};

// Solves M t = r with full pivoting; returns false on a zero pivot.
inline bool full_pivot_solve(std::vector<std::vector<double>> m, std::vector<double> r,
                             std::vector<double>& t) {
    const int n = static_cast<int>(r.size());
    std::vector<int> col_of(n);
    for (int i = 0; i < n; ++i) {
        col_of[i] = i;
    }
    for (int step = 0; step < n; ++step) {
        int pr = step;
        int pc = step;
        double best = 0.0;
        for (int i = step; i < n; ++i) {
            for (int j = step; j < n; ++j) {
                if (std::abs(m[i][j]) > best) {
                    best = std::abs(m[i][j]);
                    pr = i;
                    pc = j;
                }
            }
        }
        if (best == 0.0) {
            return false;
        }
        std::swap(m[step], m[pr]);
        std::swap(r[step], r[pr]);
        for (int i = 0; i < n; ++i) {
            std::swap(m[i][step], m[i][pc]);
        }
        std::swap(col_of[step], col_of[pc]);
        for (int i = step + 1; i < n; ++i) {
            const double factor = m[i][step] / m[step][step];
            for (int j = step; j < n; ++j) {
                m[i][j] -= factor * m[step][j];
            }
            r[i] -= factor * r[step];
        }
    }
    std::vector<double> permuted(n);
    for (int i = n - 1; i >= 0; --i) {
        double acc = r[i];
        for (int j = i + 1; j < n; ++j) {
            acc -= m[i][j] * permuted[j];
        }
        permuted[i] = acc / m[i][i];
    }
    t.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        t[col_of[i]] = permuted[i];
    }
    return true;
}

inline WlsSolution wls_oracle(const llr::LatticeField& field, const Eigen::VectorXd& x,
                              double bandwidth, const llr::KernelSpec& kernel) {
    const int d = field.covariate_dim();
    const int p = d + 1;
    std::vector<std::vector<double>> m(p, std::vector<double>(p, 0.0));
    std::vector<double> r(p, 0.0);
    std::vector<double> row(p, 0.0);
    for (std::int64_t j = 0; j < field.size(); ++j) {
        double w = 1.0;
        for (int k = 0; k < d; ++k) {
            w *= llr::eval_kernel1(kernel.family(), (field.xs()(j, k) - x(k)) / bandwidth);
        }
        if (w == 0.0) {
            continue;
        }
        row[0] = 1.0;
        for (int k = 0; k < d; ++k) {
            row[k + 1] = field.xs()(j, k) - x(k);
        }
        for (int a = 0; a < p; ++a) {
            for (int b = 0; b < p; ++b) {
                m[a][b] += w * row[a] * row[b];
            }
            r[a] += w * row[a] * field.y(j);
        }
    }
    WlsSolution sol;
    std::vector<double> t;
    if (!full_pivot_solve(std::move(m), std::move(r), t)) {
        return sol;
    }
    sol.ok = true;
    sol.intercept = t[0];
    sol.slope.resize(d);
    for (int k = 0; k < d; ++k) {
        sol.slope(k) = t[k + 1];
    }
    return sol;
}

} // namespace llr_test
