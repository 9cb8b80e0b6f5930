#include "trd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace trd {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n) {
    Matrix id(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        id(i, i) = 1.0;
    }
    return id;
}

Matrix multiply(const Matrix& lhs, const Matrix& rhs) {
    if (lhs.cols() != rhs.rows()) {
        throw std::invalid_argument("matrix product: inner dimensions differ");
    }
    Matrix out(lhs.rows(), rhs.cols());
    for (std::size_t i = 0; i < lhs.rows(); ++i) {
        for (std::size_t k = 0; k < lhs.cols(); ++k) {
            const double lik = lhs(i, k);
            for (std::size_t j = 0; j < rhs.cols(); ++j) {
                out(i, j) += lik * rhs(k, j);
            }
        }
    }
    return out;
}

std::vector<double> multiply(const Matrix& lhs, std::span<const double> x) {
    if (lhs.cols() != x.size()) {
        throw std::invalid_argument("matrix-vector product: dimension mismatch");
    }
    std::vector<double> y(lhs.rows(), 0.0);
    for (std::size_t i = 0; i < lhs.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < lhs.cols(); ++k) {
            acc += lhs(i, k) * x[k];
        }
        y[i] = acc;
    }
    return y;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            t(j, i) = a(i, j);
        }
    }
    return t;
}

Matrix leading_block(const Matrix& a, std::size_t k) {
    Matrix b(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            b(i, j) = a(i, j);
        }
    }
    return b;
}

double max_abs(std::span<const double> x) {
    double worst = 0.0;
    for (double v : x) {
        worst = std::max(worst, std::abs(v));
    }
    return worst;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("max_abs_diff: shape mismatch");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    }
    return worst;
}

double determinant(Matrix a) {
    const std::size_t n = a.rows();
    if (n != a.cols()) {
        throw std::invalid_argument("determinant: matrix not square");
    }
    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) {
                pivot = r;
            }
        }
        if (a(pivot, col) == 0.0) {
            return 0.0;
        }
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(pivot, j), a(col, j));
            }
            det = -det;
        }
        det *= a(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double factor = a(r, col) / a(col, col);
            for (std::size_t j = col; j < n; ++j) {
                a(r, j) -= factor * a(col, j);
            }
        }
    }
    return det;
}

LuFactor::LuFactor(Matrix a) : lu_(std::move(a)), perm_(lu_.rows()) {
    const std::size_t n = lu_.rows();
    if (n != lu_.cols()) {
        throw std::invalid_argument("LU: matrix not square");
    }
    for (std::size_t i = 0; i < n; ++i) {
        perm_[i] = i;
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(lu_(r, col)) > std::abs(lu_(pivot, col))) {
                pivot = r;
            }
        }
        if (lu_(pivot, col) == 0.0) {
            throw std::runtime_error("LU: singular matrix");
        }
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(lu_(pivot, j), lu_(col, j));
            }
            std::swap(perm_[pivot], perm_[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            lu_(r, col) /= lu_(col, col);
            const double factor = lu_(r, col);
            for (std::size_t j = col + 1; j < n; ++j) {
                lu_(r, j) -= factor * lu_(col, j);
            }
        }
    }
}

void LuFactor::solve_in_place(std::span<double> rhs) const {
    const std::size_t n = lu_.rows();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = rhs[perm_[i]];
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            x[i] -= lu_(i, j) * x[j];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j < n; ++j) {
            x[i] -= lu_(i, j) * x[j];
        }
        x[i] /= lu_(i, i);
    }
    std::copy(x.begin(), x.end(), rhs.begin());
}

Matrix LuFactor::solve(const Matrix& rhs) const {
    Matrix out(rhs.rows(), rhs.cols());
    std::vector<double> column(rhs.rows());
    for (std::size_t j = 0; j < rhs.cols(); ++j) {
        for (std::size_t i = 0; i < rhs.rows(); ++i) {
            column[i] = rhs(i, j);
        }
        solve_in_place(column);
        for (std::size_t i = 0; i < rhs.rows(); ++i) {
            out(i, j) = column[i];
        }
    }
    return out;
}

TridiagonalSolver::TridiagonalSolver(std::vector<double> lower, std::vector<double> diag,
                                     std::vector<double> upper)
    : lower_(std::move(lower)), inv_pivot_(diag.size()), upper_mod_(diag.size(), 0.0) {
    const std::size_t n = diag.size();
    if (n == 0 || lower_.size() != n || upper.size() != n) {
        throw std::invalid_argument("tridiagonal: band lengths must match");
    }
    double pivot = diag[0];
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            pivot = diag[i] - lower_[i] * upper_mod_[i - 1];
        }
        // Diagonally dominant systems never reach this.
        if (pivot == 0.0 || !std::isfinite(pivot)) {
            throw std::runtime_error("tridiagonal: zero pivot");
        }
        inv_pivot_[i] = 1.0 / pivot;
        if (i + 1 < n) {
            upper_mod_[i] = upper[i] * inv_pivot_[i];
        }
    }
}

void TridiagonalSolver::solve_in_place(std::span<double> rhs) const {
    const std::size_t n = size();
    if (rhs.size() != n) {
        throw std::invalid_argument("tridiagonal: rhs length mismatch");
    }
    rhs[0] *= inv_pivot_[0];
    for (std::size_t i = 1; i < n; ++i) {
        rhs[i] = (rhs[i] - lower_[i] * rhs[i - 1]) * inv_pivot_[i];
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        rhs[i] -= upper_mod_[i] * rhs[i + 1];
    }
}

}  // namespace trd
