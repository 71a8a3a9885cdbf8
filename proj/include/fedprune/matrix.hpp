#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fedprune {

/// Dense row-major matrix of doubles. The only numeric container in the
/// engine; every weight, activation and score lives in one of these.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    const std::vector<double>& values() const { return data_; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// a (n×k) times b (k×m).
Matrix matmul_nn(const Matrix& a, const Matrix& b);

/// a (n×k) times transpose of b (m×k); the layer forward x·Wᵀ.
Matrix matmul_nt(const Matrix& a, const Matrix& b);

/// transpose of a (n×k) times b (n×m); gradient and Gram-matrix shape.
Matrix matmul_tn(const Matrix& a, const Matrix& b);

/// Throws NumericalError naming `what` if any entry is NaN or infinite.
void ensure_finite(const Matrix& m, const char* what);

/// Cholesky factor L of a symmetric positive definite matrix (a = L·Lᵀ).
/// Throws NumericalError with the failing pivot index otherwise.
Matrix cholesky(const Matrix& a);

/// Diagonal of a⁻¹ for SPD a, via Cholesky solves.
std::vector<double> inverse_diagonal_spd(const Matrix& a);

double max_abs_diff(const Matrix& a, const Matrix& b);
double frobenius_sq(const Matrix& m);

}  // namespace fedprune
