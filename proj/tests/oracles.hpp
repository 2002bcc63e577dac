#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

// Independent least-squares oracle: explicit normal equations solved by
// Gaussian elimination. Kept free of the library's fitting path on purpose.
namespace oracle {

// X: columns of the design matrix; returns coefficients minimizing |y - Xa|.
inline std::vector<double> normal_equations(const std::vector<std::vector<double>>& X,
                                            const std::vector<double>& y) {
    const std::size_t p = X.size();
    const std::size_t n = y.size();
    std::vector<std::vector<double>> A(p, std::vector<double>(p + 1, 0.0));
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t t = 0; t < n; ++t) A[i][j] += X[i][t] * X[j][t];
        for (std::size_t t = 0; t < n; ++t) A[i][p] += X[i][t] * y[t];
    }
    // Gaussian elimination with partial pivoting
    for (std::size_t col = 0; col < p; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < p; ++r)
            if (std::abs(A[r][col]) > std::abs(A[pivot][col])) pivot = r;
        std::swap(A[col], A[pivot]);
        if (std::abs(A[col][col]) < 1e-12) throw std::runtime_error("oracle: singular system");
        for (std::size_t r = 0; r < p; ++r) {
            if (r == col) continue;
            const double factor = A[r][col] / A[col][col];
            for (std::size_t c = col; c <= p; ++c) A[r][c] -= factor * A[col][c];
        }
    }
    std::vector<double> a(p);
    for (std::size_t i = 0; i < p; ++i) a[i] = A[i][p] / A[i][i];
    return a;
}

inline double residual_ssr(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                           const std::vector<double>& a) {
    double ssr = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        double fit = 0.0;
        for (std::size_t i = 0; i < X.size(); ++i) fit += a[i] * X[i][t];
        const double r = y[t] - fit;
        ssr += r * r;
    }
    return ssr;
}

}  // namespace oracle
