#include "trd/reactions.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

using namespace trd;

TEST_CASE("builtin family m=2 q=1") {
    const auto spec = builtin_family(2, 1);
    CHECK(spec.growth_degree() == 2);
    const auto f = spec.evaluate(std::vector<double>{2.0, 3.0});
    CHECK(f[0] == doctest::Approx(-6.0));
    CHECK(f[1] == doctest::Approx(6.0));
    CHECK(spec.coefficient_mass(0) == 1.0);
    CHECK_THROWS_AS(builtin_family(2, 0), std::invalid_argument);
    CHECK_THROWS_AS(builtin_family(1, 1), std::invalid_argument);
}

TEST_CASE("parse reaction file text") {
    std::istringstream in("# square growth\n1 1.0 2 0\n\n2 -0.5 1 1  # cross\n");
    const auto spec = parse_reaction(in, 2);
    CHECK(spec.growth_degree() == 2);
    const auto f = spec.evaluate(std::vector<double>{3.0, 2.0});
    CHECK(f[0] == doctest::Approx(9.0));
    CHECK(f[1] == doctest::Approx(-3.0));

    std::istringstream bad_comp("3 1.0 1 0\n");
    CHECK_THROWS_AS(parse_reaction(bad_comp, 2), std::invalid_argument);
    std::istringstream bad_count("1 1.0 1\n");
    CHECK_THROWS_AS(parse_reaction(bad_count, 2), std::invalid_argument);
    std::istringstream bad_exp("1 1.0 -1 0\n");
    CHECK_THROWS_AS(parse_reaction(bad_exp, 2), std::invalid_argument);
    CHECK_THROWS_AS(load_reaction_file("/nonexistent/reaction.txt", 2), std::invalid_argument);
}

TEST_CASE("A1 quasipositivity") {
    for (int m = 2; m <= 6; ++m) {
        for (int q = 1; q <= 3; ++q) {
            const auto report = check_A1(as_field(builtin_family(m, q)), m);
            CHECK(report.passed);
            CHECK(report.samples == kDefaultSamples);
        }
    }
    CHECK(check_A1(as_field(ReactionSpec(3)), 3).passed);

    const ReactionSpec constant(2, {{Monomial{-1.0, {0, 0}}}, {}});
    const auto bad = check_A1(as_field(constant), 2);
    CHECK_FALSE(bad.passed);
    CHECK(bad.worst_slack == doctest::Approx(-1.0));
    CHECK(bad.worst_component == 0);
}

TEST_CASE("A2 polynomial growth") {
    for (int m = 2; m <= 4; ++m) {
        CHECK(check_A2(builtin_family(m, 2)).passed);
    }
    std::istringstream in("1 3.0 2 1\n2 -2.0 0 3\n");
    CHECK(check_A2(parse_reaction(in, 2)).passed);
}

TEST_CASE("A3 mass control") {
    const auto field = as_field(builtin_family(3, 1));
    const std::vector<double> two{2.0, 2.0};
    CHECK(check_A3(field, 3, two, 1.0).passed);

    const std::vector<double> half{0.5, 0.5};
    const auto fail = check_A3(field, 3, half, 1.0);
    CHECK_FALSE(fail.passed);
    CHECK(fail.worst_slack < 0.0);

    const std::vector<double> any{0.1, 7.0};
    CHECK(check_A3(as_field(ReactionSpec(3)), 3, any, 0.0).passed);
    CHECK_THROWS_AS(check_A3(field, 3, std::vector<double>{1.0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(check_A3(field, 3, std::vector<double>{1.0, -1.0}, 1.0), std::invalid_argument);
}

TEST_CASE("samplers are reproducible") {
    const std::vector<double> half{0.5};
    const auto field = as_field(builtin_family(2, 1));
    const auto a = check_A3(field, 2, half, 1.0, 500);
    const auto b = check_A3(field, 2, half, 1.0, 500);
    CHECK(a.worst_slack == b.worst_slack);
    CHECK(a.worst_point == b.worst_point);
}

TEST_CASE("pullback hand value m=2 q=1") {
    const auto spec = builtin_family(2, 1);
    const auto dec = decompose({2, 3.0, 1.0});
    const auto f = pullback_to_u(spec, dec)(std::vector<double>{2.0, 1.0});
    CHECK(std::abs(f[0]) <= 1e-14);
    CHECK(f[1] == doctest::Approx(1.5 * std::sqrt(3.0)).epsilon(1e-14));

    const auto zero = pullback_to_u(ReactionSpec(2), dec)(std::vector<double>{2.0, 1.0});
    CHECK(zero[0] == 0.0);
    CHECK(zero[1] == 0.0);

    CHECK_THROWS_AS(pullback_to_u(builtin_family(3, 1), dec), std::invalid_argument);
}

TEST_CASE("pullback and push forward round trip") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> dist(0.0, 3.0);
    for (int m : {2, 3, 5}) {
        const auto dec = decompose({m, 3.0, 1.0});
        const auto spec = builtin_family(m, 2);
        const auto f = pullback_to_u(spec, dec);
        const auto back = push_forward([&f](std::span<const double> u) { return f(u); }, dec);
        std::vector<double> u(static_cast<std::size_t>(m));
        for (int trial = 0; trial < 1000; ++trial) {
            for (double& x : u) {
                x = dist(rng);
            }
            const auto w = to_w(dec, u);
            const auto direct = spec.evaluate(w);
            const auto vf = to_w(dec, f(u));
            const auto pushed = back(w);
            const double scale = std::max(1.0, max_abs(direct));
            for (std::size_t l = 0; l < u.size(); ++l) {
                CHECK(std::abs(vf[l] - direct[l]) <= 1e-10 * scale);
                CHECK(std::abs(pushed[l] - direct[l]) <= 1e-10 * scale);
            }
        }
    }
}
