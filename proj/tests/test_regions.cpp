#include "trd/regions.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

using namespace trd;

TEST_CASE("enumerate_regions m=2 order") {
    const auto regions = enumerate_regions(2);
    REQUIRE(regions.size() == 4);
    CHECK(regions[0] == RegionSpec(2, {0, 1}, {}));
    CHECK(regions[1] == RegionSpec(2, {0}, {1}));
    CHECK(regions[2] == RegionSpec(2, {1}, {0}));
    CHECK(regions[3] == RegionSpec(2, {}, {0, 1}));
    CHECK(regions[1].describe() == "L={1} Z={2}");
}

TEST_CASE("enumerate_regions returns 2^m distinct partitions") {
    for (int m = 2; m <= 10; ++m) {
        const auto regions = enumerate_regions(m);
        CHECK(regions.size() == (std::size_t{1} << m));
        std::set<std::vector<std::size_t>> seen;
        for (const auto& r : regions) {
            CHECK(r.L().size() + r.Z().size() == static_cast<std::size_t>(m));
            seen.insert(r.Z());
        }
        CHECK(seen.size() == regions.size());
    }
    CHECK_THROWS_AS(enumerate_regions(1), std::invalid_argument);
}

TEST_CASE("region spec rejects non-partitions") {
    CHECK_THROWS_AS(RegionSpec(3, {0, 1}, {1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(RegionSpec(3, {0}, {2}), std::invalid_argument);
    CHECK_THROWS_AS(RegionSpec(2, {0, 5}, {}), std::invalid_argument);
}

TEST_CASE("membership on hand-evaluated data") {
    const auto dec = decompose({2, 3.0, 1.0});
    const auto all_l = RegionSpec::positive(2);

    const auto in = membership(all_l, dec, std::vector<double>{2.0, 1.0});
    CHECK(in.inside);
    CHECK(in.margins[0] == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-14));
    CHECK(in.margins[1] == doctest::Approx(3.0 * std::sqrt(3.0) / 2.0).epsilon(1e-14));

    CHECK_FALSE(membership(all_l, dec, std::vector<double>{1.0, 2.0}).inside);

    for (const auto& r : enumerate_regions(2)) {
        const auto zero = membership(r, dec, std::vector<double>{0.0, 0.0});
        CHECK(zero.inside);
        CHECK(zero.margins[0] == 0.0);
    }
    CHECK_THROWS_AS(membership(all_l, dec, std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(membership(all_l, dec, std::vector<double>{1.0, 1.0}, -1.0), std::invalid_argument);
}

TEST_CASE("boundary compatibility") {
    const auto dec = decompose({2, 3.0, 1.0});
    const auto all_l = RegionSpec::positive(2);
    for (const auto& r : enumerate_regions(2)) {
        CHECK(boundary_compat(r, dec, std::vector<double>{0.0, 0.0}).inside);
    }
    const auto ok = boundary_compat(all_l, dec, std::vector<double>{1.0, 0.0});
    CHECK(ok.inside);
    CHECK(ok.margins[0] == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-14));
    CHECK(ok.margins[1] == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-14));
    const auto bad = boundary_compat(all_l, dec, std::vector<double>{0.0, 1.0});
    CHECK_FALSE(bad.inside);
    CHECK(bad.margins[0] == doctest::Approx(-std::sqrt(3.0) / 2.0).epsilon(1e-14));
    // The sign-flipped form accepts the same data in ({2}, {1}).
    CHECK(boundary_compat(RegionSpec(2, {1}, {0}), dec, std::vector<double>{0.0, 1.0}).inside);
}

TEST_CASE("cone properties on random data") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    for (int m : {2, 3, 5, 8}) {
        const auto dec = decompose({m, 4.0, 1.0});
        const auto regions = enumerate_regions(m);
        std::vector<double> u(static_cast<std::size_t>(m));
        for (int trial = 0; trial < 200; ++trial) {
            for (double& x : u) {
                x = gauss(rng);
            }
            int accepted = 0;
            for (const auto& r : regions) {
                const bool in = membership(r, dec, u, 0.0).inside;
                accepted += in ? 1 : 0;

                std::vector<double> neg(u), scaled(u);
                const double s = scale(rng);
                for (std::size_t k = 0; k < u.size(); ++k) {
                    neg[k] = -u[k];
                    scaled[k] = s * u[k];
                }
                CHECK(in == membership(r.flipped(), dec, neg, 0.0).inside);
                CHECK(in == membership(r, dec, scaled, 0.0).inside);
            }
            // Generic data has no zero coordinate, so exactly one cone holds it.
            CHECK(accepted == 1);
        }
    }
}

TEST_CASE("signed transform flips rows on Z") {
    const auto dec = decompose({3, 2.0, 0.5});
    const RegionSpec r(3, {0, 2}, {1});
    const SignedTransform st(dec, r);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(st.entry(0, k) == dec.transform()(0, k));
        CHECK(st.entry(1, k) == -dec.transform()(1, k));
    }
}
