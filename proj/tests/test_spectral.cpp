#include "trd/spectral.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

using namespace trd;

namespace {

const double kSqrt3Half = std::sqrt(3.0) / 2.0;

}  // namespace

TEST_CASE("decompose m=2 a=3 b=1") {
    const auto dec = decompose({2, 3.0, 1.0});
    CHECK(dec.lambdas()[0] == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(dec.lambdas()[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(dec.lambdas_bar()[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(dec.lambdas_bar()[1] == doctest::Approx(4.0).epsilon(1e-14));

    const auto dense = oracle::dense_eigenvalues(diffusion_matrix({2, 3.0, 1.0}));
    CHECK(dense[0] == doctest::Approx(dec.lambdas_bar()[0]).epsilon(1e-12));
    CHECK(dense[1] == doctest::Approx(dec.lambdas_bar()[1]).epsilon(1e-12));
}

TEST_CASE("decompose m=3 a=2 b=0.5 matches the dense oracle") {
    const ToeplitzSystem sys{3, 2.0, 0.5};
    const auto dec = decompose(sys);
    const double r = std::sqrt(2.0) / 2.0;
    CHECK(dec.lambdas()[0] == doctest::Approx(2.0 + r).epsilon(1e-14));
    CHECK(dec.lambdas()[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(dec.lambdas()[2] == doctest::Approx(2.0 - r).epsilon(1e-14));
    const auto dense = oracle::dense_eigenvalues(diffusion_matrix(sys));
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(dense[i] == doctest::Approx(dec.lambdas_bar()[i]).epsilon(1e-12));
    }
}

TEST_CASE("odd m has the middle eigenvalue equal to a") {
    for (int m : {3, 5, 7, 21}) {
        const auto dec = decompose({m, 1.7, 0.4});
        CHECK(dec.lambdas()[static_cast<std::size_t>((m + 1) / 2 - 1)] == doctest::Approx(1.7).epsilon(1e-14));
    }
}

TEST_CASE("decompose rejects invalid systems") {
    CHECK_THROWS_AS(decompose({1, 3.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(decompose({2, 0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(decompose({2, 3.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(decompose({2, 3.0, -1.0}), std::invalid_argument);
}

TEST_CASE("parabolicity check") {
    CHECK(parabolicity_check({2, 3.0, 1.0}));
    CHECK_FALSE(parabolicity_check({9, 1.0, 1.0}));
    CHECK(parabolicity_check({2, 1.0, 0.5}));
    // Equality is not parabolic: m=2 gives 2b cos(pi/3) = b.
    CHECK_FALSE(parabolicity_check({2, 1.0, 1.0}));
}

TEST_CASE("to_w and to_u on hand-evaluated vectors") {
    const auto dec = decompose({2, 3.0, 1.0});
    const std::vector<double> u{2.0, 1.0};
    const auto w = to_w(dec, u);
    CHECK(w[0] == doctest::Approx(kSqrt3Half).epsilon(1e-14));
    CHECK(w[1] == doctest::Approx(3.0 * kSqrt3Half).epsilon(1e-14));

    const auto zero = to_w(dec, std::vector<double>{0.0, 0.0});
    CHECK(zero[0] == 0.0);
    CHECK(zero[1] == 0.0);

    const auto outside = to_w(dec, std::vector<double>{1.0, 2.0});
    CHECK(outside[0] == doctest::Approx(-kSqrt3Half).epsilon(1e-14));

    const auto back = to_u(dec, std::vector<double>{kSqrt3Half, 3.0 * kSqrt3Half});
    CHECK(back[0] == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(back[1] == doctest::Approx(1.0).epsilon(1e-13));

    CHECK_THROWS_AS(to_w(dec, std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(to_u(dec, std::vector<double>{1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("unit rows of W map to eigenvectors") {
    const auto dec = decompose({5, 2.5, 1.0});
    const std::size_t m = dec.size();
    for (std::size_t l = 0; l < m; ++l) {
        std::vector<double> e(m, 0.0);
        e[l] = 1.0;
        const auto u = to_u(dec, e);
        const auto v = dec.eigenvector(dec.natural_index(l));
        // u = (2/(m+1)) v_{m+1-l}
        for (std::size_t k = 0; k < m; ++k) {
            CHECK(u[k] == doctest::Approx(dec.inv_scale() * v[k]).epsilon(1e-13));
        }
    }
}

TEST_CASE("round trip on the ones vector") {
    for (int m = 2; m <= 64; m += 7) {
        const auto dec = decompose({m, 3.0, 1.0});
        const std::vector<double> ones(static_cast<std::size_t>(m), 1.0);
        const auto again = to_w(dec, to_u(dec, ones));
        for (double x : again) {
            CHECK(std::abs(x - 1.0) <= 1e-10);
        }
    }
}

TEST_CASE("eigen structure holds for random systems") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coef(1e-3, 10.0);
    std::uniform_int_distribution<int> size(2, 64);
    for (int trial = 0; trial < 60; ++trial) {
        const ToeplitzSystem sys{size(rng), coef(rng), coef(rng)};
        const auto dec = decompose(sys);
        const std::size_t m = dec.size();
        const Matrix a = diffusion_matrix(sys);

        // V A = diag(lambda_bar) V and the eigen residual of every row.
        const Matrix va = multiply(dec.transform(), a);
        for (std::size_t l = 0; l < m; ++l) {
            const auto row = dec.transform().row(l);
            const double scale = max_abs(row);
            for (std::size_t k = 0; k < m; ++k) {
                CHECK(std::abs(va(l, k) - dec.lambdas_bar()[l] * row[k]) <= 1e-10 * scale);
            }
        }
        // V V^T = (m+1)/2 I and V V^{-1} = I.
        Matrix expected = Matrix::identity(m);
        for (std::size_t i = 0; i < m; ++i) {
            expected(i, i) = 0.5 * static_cast<double>(m + 1);
        }
        CHECK(max_abs_diff(multiply(dec.transform(), transpose(dec.transform())), expected) <= 1e-10);
        CHECK(max_abs_diff(multiply(dec.transform(), dec.inverse()), Matrix::identity(m)) <= 1e-10);

        for (std::size_t l = 0; l + 1 < m; ++l) {
            CHECK(dec.lambdas_bar()[l] < dec.lambdas_bar()[l + 1]);
            CHECK(dec.lambdas()[l + 1] < dec.lambdas()[l]);
        }
        if (parabolicity_check(sys)) {
            CHECK(dec.lambdas_bar()[0] > 0.0);
            CHECK(oracle::smallest_eigenvalue(a) == doctest::Approx(dec.lambdas_bar()[0]).epsilon(1e-9));
        } else {
            CHECK(dec.lambdas_bar()[0] <= 0.0);
        }
    }
}
