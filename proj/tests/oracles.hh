#pragma once

// Independent reference computations used by the tests.

#include <dwr/sparse.hh>

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense to_dense(const dwr::SparseMatrix& A)
{
    Dense d(A.n_rows(), std::vector<double>(A.n_cols(), 0.0));
    for (std::size_t i = 0; i < A.n_rows(); ++i)
        for (std::size_t j = 0; j < A.n_cols(); ++j)
            d[i][j] = A(i, j);
    return d;
}

/// Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(Dense A, std::vector<double> b)
{
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(A[i][k]) > std::abs(A[p][k]))
                p = i;
        if (A[p][k] == 0.0)
            throw std::runtime_error("singular");
        std::swap(A[p], A[k]);
        std::swap(b[p], b[k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = A[i][k] / A[k][k];
            for (std::size_t j = k; j < n; ++j)
                A[i][j] -= f * A[k][j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < n; ++j)
            s -= A[k][j] * x[j];
        x[k] = s / A[k][k];
    }
    return x;
}

inline std::vector<double> dense_mv(const Dense& A, const std::vector<double>& x)
{
    std::vector<double> y(A.size(), 0.0);
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j)
            y[i] += A[i][j] * x[j];
    return y;
}

/// Composite midpoint-free rule: m x m cells, each with a 5-point Gauss rule
/// written out from its closed-form nodes.
inline double integrate_square(const std::function<double(double, double)>& f, double x0, double x1, double y0,
                               double y1, int m = 8)
{
    const double r = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
    const double R = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
    const double wr = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
    const double wR = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
    const double nodes[5] = {-R, -r, 0.0, r, R};
    const double weights[5] = {wR, wr, 128.0 / 225.0, wr, wR};
    const double hx = (x1 - x0) / m;
    const double hy = (y1 - y0) / m;
    double s = 0.0;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j) {
                    const double x = x0 + hx * (a + 0.5 * (1.0 + nodes[i]));
                    const double y = y0 + hy * (b + 0.5 * (1.0 + nodes[j]));
                    s += 0.25 * hx * hy * weights[i] * weights[j] * f(x, y);
                }
    return s;
}

inline std::mt19937_64 rng(std::uint64_t seed = 20240917) { return std::mt19937_64(seed); }

} // namespace oracle
