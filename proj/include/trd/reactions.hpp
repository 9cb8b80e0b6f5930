#pragma once

#include "trd/spectral.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace trd {

struct Monomial {
    double coefficient = 0.0;
    std::vector<int> exponents;  // one nonnegative entry per component

    int total_degree() const;
    double evaluate(std::span<const double> w) const;
};

/// Polynomial reaction map F in transformed coordinates, one monomial list
/// per component.
class ReactionSpec {
public:
    /// The zero map on m components.
    explicit ReactionSpec(int m);
    ReactionSpec(int m, std::vector<std::vector<Monomial>> components);

    int size() const { return m_; }
    const std::vector<std::vector<Monomial>>& components() const { return components_; }

    /// N in |F_l(w)| <= C1 (1 + sum w)^N; the largest total degree (at least 1).
    int growth_degree() const { return growth_degree_; }

    /// Sum of |coefficients| of component l.
    double coefficient_mass(std::size_t l) const;

    void evaluate(std::span<const double> w, std::span<double> out) const;
    std::vector<double> evaluate(std::span<const double> w) const;

private:
    int m_;
    std::vector<std::vector<Monomial>> components_;
    int growth_degree_ = 1;
};

/// F_l = -w_l w_m^q for l < m, F_m = (sum_{l<m} w_l) w_m^q.
ReactionSpec builtin_family(int m, int q);

/// One monomial per line: `component coefficient e1 e2 ... em` with a 1-based
/// component index. Blank lines and `#` comments are skipped.
ReactionSpec parse_reaction(std::istream& in, int m);
ReactionSpec load_reaction_file(const std::string& path, int m);

/// Any reaction map, in whichever coordinates the caller says.
using ReactionField = std::function<std::vector<double>(std::span<const double>)>;

ReactionField as_field(const ReactionSpec& spec);

/// f(U) = V^{-1} F(V U): the u-space reaction whose transform is F.
class PulledBackReaction {
public:
    PulledBackReaction(const ReactionSpec& spec, const SpectralDecomposition& dec);

    void evaluate(std::span<const double> u, std::span<double> out) const;
    std::vector<double> operator()(std::span<const double> u) const;

private:
    const ReactionSpec* spec_;
    const SpectralDecomposition* dec_;
};

PulledBackReaction pullback_to_u(const ReactionSpec& spec, const SpectralDecomposition& dec);

/// F(W) = V f(V^{-1} W) for a user-supplied u-space reaction f.
ReactionField push_forward(ReactionField u_reaction, const SpectralDecomposition& dec);

struct SampleBox {
    double lo = 0.0;
    double hi = 10.0;
};

struct AssumptionReport {
    bool passed = true;
    /// Smallest slack seen; negative means the inequality was violated.
    double worst_slack = 0.0;
    std::vector<double> worst_point;
    std::size_t worst_component = 0;
    std::size_t samples = 0;
};

inline constexpr std::size_t kDefaultSamples = 10000;
inline constexpr std::uint64_t kDefaultSeed = 20240607;

/// Quasipositivity: F_l(w) >= -1e-12 whenever w_l = 0.
AssumptionReport check_A1(const ReactionField& field, int m, std::size_t n_samples = kDefaultSamples,
                          SampleBox box = {}, std::uint64_t seed = kDefaultSeed);

/// Polynomial growth: |F_l(w)| <= C1 (1 + sum w)^N with C1 the largest
/// coefficient mass and N the growth degree of `spec`.
AssumptionReport check_A2(const ReactionSpec& spec, std::size_t n_samples = kDefaultSamples, SampleBox box = {},
                          std::uint64_t seed = kDefaultSeed);

/// sum_{l<m} D_l F_l(w) + F_m(w) <= C2 (1 + sum w).
AssumptionReport check_A3(const ReactionField& field, int m, std::span<const double> D, double C2,
                          std::size_t n_samples = kDefaultSamples, SampleBox box = {},
                          std::uint64_t seed = kDefaultSeed);

}  // namespace trd
