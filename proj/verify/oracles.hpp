#pragma once

// Independent reference computations for the test and acceptance suites.
// Nothing here is used by the library itself.

#include "trd/linalg.hpp"
#include "trd/lyapunov.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace trd::oracle {

inline Eigen::MatrixXd to_eigen(const Matrix& a) {
    Eigen::MatrixXd e(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(i, j);
        }
    }
    return e;
}

/// Ascending eigenvalues of a symmetric matrix from a dense solver.
inline std::vector<double> dense_eigenvalues(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(a), Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

inline double smallest_eigenvalue(const Matrix& a) { return dense_eigenvalues(a).front(); }

/// Laplace expansion along the first row.
inline double cofactor_determinant(const Matrix& a) {
    const std::size_t n = a.rows();
    if (n == 1) {
        return a(0, 0);
    }
    if (n == 2) {
        return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    }
    double det = 0.0;
    double sign = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        Matrix minor(n - 1, n - 1);
        for (std::size_t i = 1; i < n; ++i) {
            std::size_t cj = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == col) {
                    continue;
                }
                minor(i - 1, cj++) = a(i, j);
            }
        }
        det += sign * a(0, col) * cofactor_determinant(minor);
        sign = -sign;
    }
    return det;
}

inline Matrix submatrix(const Matrix& a, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
    Matrix s(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            s(i, j) = a(rows[i], cols[j]);
        }
    }
    return s;
}

/// det[k] for k = 1..n by cofactor expansion.
inline std::vector<double> cofactor_minors(const Matrix& a) {
    std::vector<double> out;
    for (std::size_t k = 1; k <= a.rows(); ++k) {
        out.push_back(cofactor_determinant(leading_block(a, k)));
    }
    return out;
}

/// prod_{k=1}^{r-2} det[k]^{2^{r-k-2}}.
inline double minor_power_product(const std::vector<double>& minors, std::size_t r) {
    double p = 1.0;
    for (std::size_t k = 1; k + 2 <= r; ++k) {
        p *= std::pow(minors[k - 1], std::pow(2.0, static_cast<double>(r - k - 2)));
    }
    return p;
}

/// det[l] * prod_{k=1}^{l-2} det[k]^{2^{l-k-2}} (1-based l).
inline double closed_form_K(const Matrix& a, std::size_t l) {
    const auto minors = cofactor_minors(a);
    return minors[l - 1] * minor_power_product(minors, l);
}

/// The r x r determinant with rows 1..r and columns 1..r-1, l of the leading
/// l x l block, times the minor power product (1-based l, r).
inline double closed_form_H(const Matrix& a, std::size_t l, std::size_t r) {
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < r; ++i) {
        rows.push_back(i);
    }
    for (std::size_t j = 0; j + 1 < r; ++j) {
        cols.push_back(j);
    }
    cols.push_back(l - 1);
    return cofactor_determinant(submatrix(a, rows, cols)) * minor_power_product(cofactor_minors(a), r);
}

inline double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) {
        f *= i;
    }
    return f;
}

inline double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

/// Direct enumeration of every (p_1 <= ... <= p_{m-1} <= p_m) term.
inline double brute_force_H(const LyapunovConfig& cfg, std::span<const double> w) {
    const std::size_t m = w.size();
    std::vector<int> p(m);
    p[m - 1] = cfg.degree;
    double total = 0.0;
    std::function<void(std::size_t)> descend = [&](std::size_t k) {
        // k indexes the next free exponent, counting down from m-2.
        if (k == static_cast<std::size_t>(-1)) {
            double term = 1.0;
            for (std::size_t j = 0; j + 1 < m; ++j) {
                term *= binomial(p[j + 1], p[j]) * std::pow(cfg.thetas[j], p[j] * p[j]);
            }
            term *= std::pow(w[0], p[0]);
            for (std::size_t j = 1; j < m; ++j) {
                term *= std::pow(w[j], p[j] - p[j - 1]);
            }
            total += term;
            return;
        }
        for (int v = 0; v <= p[k + 1]; ++v) {
            p[k] = v;
            descend(k - 1);
        }
    };
    descend(m - 2);
    return total;
}

/// Central differences of a scalar field.
inline std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> x, double step) {
    std::vector<double> g(x.size());
    std::vector<double> probe(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + step;
        const double up = f(probe);
        probe[i] = x[i] - step;
        const double down = f(probe);
        probe[i] = x[i];
        g[i] = (up - down) / (2.0 * step);
    }
    return g;
}

/// Second-order central differences of a scalar field.
inline Matrix fd_hessian(const std::function<double(std::span<const double>)>& f, std::span<const double> x,
                         double step) {
    const std::size_t n = x.size();
    Matrix hess(n, n);
    std::vector<double> p(x.begin(), x.end());
    const double center = f(p);
    for (std::size_t i = 0; i < n; ++i) {
        p[i] = x[i] + step;
        const double up = f(p);
        p[i] = x[i] - step;
        const double down = f(p);
        p[i] = x[i];
        hess(i, i) = (up - 2.0 * center + down) / (step * step);
        for (std::size_t j = i + 1; j < n; ++j) {
            double acc = 0.0;
            for (int si : {1, -1}) {
                for (int sj : {1, -1}) {
                    p[i] = x[i] + si * step;
                    p[j] = x[j] + sj * step;
                    acc += si * sj * f(p);
                }
            }
            p[i] = x[i];
            p[j] = x[j];
            hess(i, j) = acc / (4.0 * step * step);
            hess(j, i) = hess(i, j);
        }
    }
    return hess;
}

/// Central differences of a vector field's components (Jacobian of `grad`).
inline Matrix fd_jacobian(const std::function<std::vector<double>(std::span<const double>)>& grad,
                          std::span<const double> x, double step) {
    const std::size_t n = x.size();
    Matrix jac(n, n);
    std::vector<double> probe(x.begin(), x.end());
    for (std::size_t j = 0; j < n; ++j) {
        probe[j] = x[j] + step;
        const auto up = grad(probe);
        probe[j] = x[j] - step;
        const auto down = grad(probe);
        probe[j] = x[j];
        for (std::size_t i = 0; i < n; ++i) {
            jac(i, j) = (up[i] - down[i]) / (2.0 * step);
        }
    }
    return jac;
}

}  // namespace trd::oracle
