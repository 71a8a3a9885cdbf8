#include "fedprune/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fedprune/errors.hpp"

namespace fedprune {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw ShapeError("matrix data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(rows_) + "x" +
                         std::to_string(cols_));
    }
}

Matrix matmul_nn(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul_nn: inner dimensions " + std::to_string(a.cols()) +
                         " vs " + std::to_string(b.rows()));
    }
    Matrix c(a.rows(), b.cols());
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    for (std::size_t i = 0; i < n; ++i) {
        double* ci = c.data() + i * m;
        const double* ai = a.data() + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = ai[p];
            if (av == 0.0) continue;
            const double* bp = b.data() + p * m;
            for (std::size_t j = 0; j < m; ++j) ci[j] += av * bp[j];
        }
    }
    return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw ShapeError("matmul_nt: inner dimensions " + std::to_string(a.cols()) +
                         " vs " + std::to_string(b.cols()));
    }
    Matrix c(a.rows(), b.rows());
    const std::size_t n = a.rows(), k = a.cols(), m = b.rows();
    for (std::size_t i = 0; i < n; ++i) {
        const double* ai = a.data() + i * k;
        double* ci = c.data() + i * m;
        for (std::size_t j = 0; j < m; ++j) {
            const double* bj = b.data() + j * k;
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) acc += ai[p] * bj[p];
            ci[j] = acc;
        }
    }
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw ShapeError("matmul_tn: inner dimensions " + std::to_string(a.rows()) +
                         " vs " + std::to_string(b.rows()));
    }
    Matrix c(a.cols(), b.cols());
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    for (std::size_t t = 0; t < n; ++t) {
        const double* at = a.data() + t * k;
        const double* bt = b.data() + t * m;
        for (std::size_t i = 0; i < k; ++i) {
            const double av = at[i];
            if (av == 0.0) continue;
            double* ci = c.data() + i * m;
            for (std::size_t j = 0; j < m; ++j) ci[j] += av * bt[j];
        }
    }
    return c;
}

void ensure_finite(const Matrix& m, const char* what) {
    for (double v : m.values()) {
        if (!std::isfinite(v)) {
            throw NumericalError(std::string(what) + ": non-finite value encountered");
        }
    }
}

Matrix cholesky(const Matrix& a) {
    if (a.rows() != a.cols()) throw ShapeError("cholesky: matrix not square");
    const std::size_t n = a.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t p = 0; p < j; ++p) diag -= l(j, p) * l(j, p);
        if (!(diag > 0.0)) {
            throw NumericalError("cholesky: non-positive pivot at index " +
                                 std::to_string(j) + " (value " + std::to_string(diag) +
                                 "); matrix not positive definite despite damping");
        }
        const double ljj = std::sqrt(diag);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double acc = a(i, j);
            for (std::size_t p = 0; p < j; ++p) acc -= l(i, p) * l(j, p);
            l(i, j) = acc / ljj;
        }
    }
    return l;
}

std::vector<double> inverse_diagonal_spd(const Matrix& a) {
    const std::size_t n = a.rows();
    const Matrix l = cholesky(a);
    std::vector<double> diag(n, 0.0);
    std::vector<double> y(n), x(n);
    for (std::size_t j = 0; j < n; ++j) {
        // forward solve L y = e_j
        for (std::size_t i = 0; i < n; ++i) {
            double acc = (i == j) ? 1.0 : 0.0;
            for (std::size_t p = 0; p < i; ++p) acc -= l(i, p) * y[p];
            y[i] = acc / l(i, i);
        }
        // back solve Lᵀ x = y
        for (std::size_t ii = n; ii-- > 0;) {
            double acc = y[ii];
            for (std::size_t p = ii + 1; p < n; ++p) acc -= l(p, ii) * x[p];
            x[ii] = acc / l(ii, ii);
        }
        diag[j] = x[j];
    }
    return diag;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw ShapeError("max_abs_diff: shape mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
    }
    return worst;
}

double frobenius_sq(const Matrix& m) {
    double acc = 0.0;
    for (double v : m.values()) acc += v * v;
    return acc;
}

}  // namespace fedprune
