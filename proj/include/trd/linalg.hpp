#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace trd {

/// Dense row-major matrix for the small (m <= 64) systems used here.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::span<const double> data() const { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix multiply(const Matrix& lhs, const Matrix& rhs);
std::vector<double> multiply(const Matrix& lhs, std::span<const double> x);
Matrix transpose(const Matrix& a);
Matrix leading_block(const Matrix& a, std::size_t k);

double max_abs(std::span<const double> x);
double max_abs_diff(const Matrix& a, const Matrix& b);

/// Determinant by Gaussian elimination with partial pivoting.
double determinant(Matrix a);

/// LU factorization with partial pivoting, reused for repeated solves.
class LuFactor {
public:
    explicit LuFactor(Matrix a);

    void solve_in_place(std::span<double> rhs) const;
    Matrix solve(const Matrix& rhs) const;

private:
    Matrix lu_;
    std::vector<std::size_t> perm_;
};

/// Tridiagonal system with sub-diagonal `lower` (lower[0] unused), diagonal
/// `diag`, super-diagonal `upper` (upper[n-1] unused). The Thomas factorization
/// is computed once and applied to any number of right-hand sides.
class TridiagonalSolver {
public:
    TridiagonalSolver(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper);

    std::size_t size() const { return inv_pivot_.size(); }
    void solve_in_place(std::span<double> rhs) const;

private:
    std::vector<double> lower_;
    std::vector<double> inv_pivot_;
    std::vector<double> upper_mod_;
};

}  // namespace trd
