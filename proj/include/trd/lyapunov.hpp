#pragma once

#include "trd/linalg.hpp"
#include "trd/spectral.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trd {

/// Parameters of the weighted homogeneous polynomial
///
///   H(w) = sum_{p_{m-1}=0}^{p_m} ... sum_{p_1=0}^{p_2}
///            C(p_m, p_{m-1}) ... C(p_2, p_1)
///            theta_1^{p_1^2} ... theta_{m-1}^{p_{m-1}^2}
///            w_1^{p_1} w_2^{p_2 - p_1} ... w_m^{p_m - p_{m-1}}
///
/// `thetas` has m-1 entries; thetas[0] is theta_1.
struct LyapunovConfig {
    int degree = 2;  // p_m
    std::vector<double> thetas;
};

/// Throws std::invalid_argument unless degree >= 2 and every theta > 0.
void validate(const LyapunovConfig& cfg);

double eval_H(const LyapunovConfig& cfg, std::span<const double> w);
std::vector<double> grad_H(const LyapunovConfig& cfg, std::span<const double> w);
Matrix hess_H(const LyapunovConfig& cfg, std::span<const double> w);

/// Exponents (p_1, ..., p_{m-1}) with 0 <= p_1 <= ... <= p_{m-1} <= p_m - 2.
using ExponentTuple = std::vector<int>;

/// All admissible tuples, lexicographic in (p_1, ..., p_{m-1}).
std::vector<ExponentTuple> exponent_tuples(int m, int degree);

/// (lb_i + lb_j) / (2 sqrt(lb_i lb_j)); >= 1 with equality iff i == j.
double coupling_ratio(const SpectralDecomposition& dec, std::size_t i, std::size_t j);

struct ConditionMatrix {
    Matrix entries;
    std::vector<double> lambda_bar;
    ExponentTuple exponents;
};

/// Entry (i, j), i <= j, is (lb_i + lb_j)/2 times theta_k^{p_k^2} for k < i,
/// theta_k^{(p_k+1)^2} for i <= k < j and theta_k^{(p_k+2)^2} for k >= j.
ConditionMatrix build_condition_matrix(const SpectralDecomposition& dec, const LyapunovConfig& cfg,
                                       const ExponentTuple& exponents);

/// Bordered-minor recursion seeded with
///   K_l^2 = a_11 a_ll - a_1l^2,   H_l^2 = a_11 a_2l - a_12 a_1l,
/// and advanced by K_l^r = K_{r-1}^{r-1} K_l^{r-1} - (H_l^{r-1})^2.
/// H_l^r for r >= 3 follows the same elimination applied to the off-diagonal
/// border. Indices l, r are 1-based to match the usual statement.
class MinorRecursion {
public:
    explicit MinorRecursion(const Matrix& a);

    std::size_t size() const { return n_; }

    /// K_l^r for 2 <= r <= l <= m.
    double K(std::size_t l, std::size_t r) const;
    /// H_l^r for 2 <= r < l <= m.
    double H(std::size_t l, std::size_t r) const;

    /// K_l^l for l = 2..m (entry l-2).
    const std::vector<double>& diagonal() const { return k_diag_; }

    /// Leading principal minors det[1..m] by pivoted elimination, computed
    /// separately from the recursion (entry k-1 holds det[k]).
    const std::vector<double>& leading_minors() const { return minors_; }

private:
    std::size_t n_;
    // Bordered values indexed [r][i][j], 1-based, valid for i, j >= r.
    std::vector<Matrix> stages_;
    std::vector<double> k_diag_;
    std::vector<double> minors_;
};

MinorRecursion k_recursion(const Matrix& a);
inline MinorRecursion k_recursion(const ConditionMatrix& mat) { return MinorRecursion(mat.entries); }

struct TupleMargin {
    ExponentTuple exponents;
    /// min_l K_l^l of the unit-diagonal rescaled matrix. Same sign pattern as
    /// the raw K_l^l, but comparable across tuples and theta choices.
    double margin = 0.0;
};

struct ConditionReport {
    bool satisfied = false;
    std::optional<ExponentTuple> failing_tuple;
    std::size_t failing_l = 0;  // 1-based l of the first K_l^l <= 0
    std::vector<TupleMargin> margins;
    double min_margin = 0.0;
};

/// Checks K_l^l > 0, l = 2..m, for every exponent tuple in lexicographic
/// order, stopping at the first violation. Requires parabolicity.
ConditionReport check_condition(const SpectralDecomposition& dec, const LyapunovConfig& cfg);

struct ThetaSearchOptions {
    double ratio = 1.05;
    int max_exponent = 200;
    std::size_t budget = 200000;  // candidate theta vectors
};

struct ThetaSearchResult {
    bool found = false;
    LyapunovConfig config;
    std::vector<int> grid_exponents;  // theta_k = ratio^{grid_exponents[k]}
    ConditionReport report;
    double best_margin = 0.0;  // largest min_margin seen when not found
    std::size_t evaluated = 0;
};

/// Geometric grid search theta_k in {ratio^j : j = 0..max_exponent}. Candidates
/// are visited by increasing sum of exponents (smallest theta product first),
/// lexicographically within a sum.
ThetaSearchResult theta_search(const SpectralDecomposition& dec, int degree, const ThetaSearchOptions& opts = {});

/// Plain-text audit block: system, degree, thetas and per-tuple margins.
std::string format_certificate(const SpectralDecomposition& dec, const LyapunovConfig& cfg,
                               const ConditionReport& report);

}  // namespace trd
