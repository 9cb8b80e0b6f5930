#pragma once

#include "trd/linalg.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace trd {

/// Diffusion matrix with `a` on the diagonal and `b` on both off-diagonals.
struct ToeplitzSystem {
    int m = 2;
    double a = 1.0;
    double b = 1.0;
};

/// Throws std::invalid_argument unless m >= 2, a > 0 and b > 0.
void validate(const ToeplitzSystem& sys);

/// 2b cos(pi/(m+1)) < a, strictly. Equivalent to positive definiteness.
bool parabolicity_check(const ToeplitzSystem& sys);

Matrix diffusion_matrix(const ToeplitzSystem& sys);

/// Closed-form eigen-structure of the Toeplitz diffusion matrix.
///
/// Indices are 0-based. Natural order: lambdas()[i] = a + 2b cos((i+1) pi/(m+1)),
/// strictly decreasing. Ascending order: lambdas_bar()[i] = lambdas()[m-1-i].
/// Row i of transform() is the eigenvector carrying lambdas_bar()[i], so
/// w = transform() * u decouples the diffusion into scalar heat equations.
class SpectralDecomposition {
public:
    explicit SpectralDecomposition(const ToeplitzSystem& sys);

    const ToeplitzSystem& system() const { return sys_; }
    std::size_t size() const { return static_cast<std::size_t>(sys_.m); }

    std::span<const double> lambdas() const { return lambdas_; }
    std::span<const double> lambdas_bar() const { return lambdas_bar_; }

    /// Ascending index <-> natural index. The map is an involution.
    std::size_t natural_index(std::size_t ascending) const { return size() - 1 - ascending; }
    std::size_t ascending_index(std::size_t natural) const { return size() - 1 - natural; }

    const Matrix& transform() const { return transform_; }
    const Matrix& inverse() const { return inverse_; }
    double inv_scale() const { return inv_scale_; }

    /// Eigenvector v_i (natural order) with entries sin((i+1)(k+1) pi/(m+1)).
    std::vector<double> eigenvector(std::size_t natural) const;

private:
    ToeplitzSystem sys_;
    std::vector<double> lambdas_;
    std::vector<double> lambdas_bar_;
    Matrix transform_;
    Matrix inverse_;
    double inv_scale_;
};

SpectralDecomposition decompose(const ToeplitzSystem& sys);

/// w_l = sum_k u_k sin((m+1-l) k pi/(m+1)).
std::vector<double> to_w(const SpectralDecomposition& dec, std::span<const double> u);

/// Inverse of to_w through V^{-1} = (2/(m+1)) V^T.
std::vector<double> to_u(const SpectralDecomposition& dec, std::span<const double> w);

}  // namespace trd
