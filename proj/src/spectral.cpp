#include "trd/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace trd {

void validate(const ToeplitzSystem& sys) {
    if (sys.m < 2) {
        throw std::invalid_argument("component count m must be >= 2, got " + std::to_string(sys.m));
    }
    if (!(sys.a > 0.0) || !std::isfinite(sys.a)) {
        throw std::invalid_argument("diagonal coefficient a must be positive");
    }
    if (!(sys.b > 0.0) || !std::isfinite(sys.b)) {
        throw std::invalid_argument("off-diagonal coefficient b must be positive");
    }
}

bool parabolicity_check(const ToeplitzSystem& sys) {
    validate(sys);
    const double angle = std::numbers::pi / static_cast<double>(sys.m + 1);
    return 2.0 * sys.b * std::cos(angle) < sys.a;
}

Matrix diffusion_matrix(const ToeplitzSystem& sys) {
    validate(sys);
    const auto m = static_cast<std::size_t>(sys.m);
    Matrix a(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        a(i, i) = sys.a;
        if (i + 1 < m) {
            a(i, i + 1) = sys.b;
            a(i + 1, i) = sys.b;
        }
    }
    return a;
}

SpectralDecomposition::SpectralDecomposition(const ToeplitzSystem& sys) : sys_(sys) {
    validate(sys_);
    const auto m = static_cast<std::size_t>(sys_.m);
    const double step = std::numbers::pi / static_cast<double>(m + 1);

    lambdas_.resize(m);
    lambdas_bar_.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        lambdas_[i] = sys_.a + 2.0 * sys_.b * std::cos(static_cast<double>(i + 1) * step);
    }
    for (std::size_t i = 0; i < m; ++i) {
        lambdas_bar_[i] = lambdas_[natural_index(i)];
    }

    transform_ = Matrix(m, m);
    for (std::size_t row = 0; row < m; ++row) {
        const auto freq = static_cast<double>(m - row);  // (m+1) - (row+1)
        for (std::size_t k = 0; k < m; ++k) {
            transform_(row, k) = std::sin(freq * static_cast<double>(k + 1) * step);
        }
    }
    inv_scale_ = 2.0 / static_cast<double>(m + 1);
    inverse_ = transpose(transform_);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            inverse_(i, j) *= inv_scale_;
        }
    }
}

std::vector<double> SpectralDecomposition::eigenvector(std::size_t natural) const {
    if (natural >= size()) {
        throw std::out_of_range("eigenvector index out of range");
    }
    return std::vector<double>(transform_.row(ascending_index(natural)).begin(),
                               transform_.row(ascending_index(natural)).end());
}

SpectralDecomposition decompose(const ToeplitzSystem& sys) { return SpectralDecomposition(sys); }

std::vector<double> to_w(const SpectralDecomposition& dec, std::span<const double> u) {
    if (u.size() != dec.size()) {
        throw std::invalid_argument("to_w: expected " + std::to_string(dec.size()) + " components, got " +
                                    std::to_string(u.size()));
    }
    return multiply(dec.transform(), u);
}

std::vector<double> to_u(const SpectralDecomposition& dec, std::span<const double> w) {
    if (w.size() != dec.size()) {
        throw std::invalid_argument("to_u: expected " + std::to_string(dec.size()) + " components, got " +
                                    std::to_string(w.size()));
    }
    return multiply(dec.inverse(), w);
}

}  // namespace trd
