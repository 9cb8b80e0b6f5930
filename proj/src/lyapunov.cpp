#include "trd/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace trd {

namespace {

void validate_thetas(const LyapunovConfig& cfg, std::size_t m) {
    if (cfg.thetas.size() + 1 != m) {
        throw std::invalid_argument("lyapunov: expected " + std::to_string(m - 1) + " thetas, got " +
                                    std::to_string(cfg.thetas.size()));
    }
    for (double t : cfg.thetas) {
        if (!(t > 0.0) || !std::isfinite(t)) {
            throw std::invalid_argument("lyapunov: thetas must be positive and finite");
        }
    }
}

void require_nonnegative(std::span<const double> w) {
    for (double x : w) {
        if (!(x >= 0.0)) {
            throw std::invalid_argument("lyapunov: polynomial arguments must be nonnegative");
        }
    }
}

// Nested sum with per-level exponent shifts:
//   G_1(q) = w_1^q
//   G_k(q) = sum_{j=0}^{q} C(q, j) theta_{k-1}^{(j + s_{k-1})^2} G_{k-1}(j) w_k^{q-j}
// and the result is G_m(degree). Zero shifts give H itself; the shift
// patterns of the first and second derivatives reuse the same recursion.
double shifted_sum(std::span<const double> thetas, std::span<const double> w, int degree,
                   std::span<const int> shifts) {
    const std::size_t m = w.size();
    const auto top = static_cast<std::size_t>(degree);

    std::vector<double> prev(top + 1);
    std::vector<double> next(top + 1);
    std::vector<double> wpow(top + 1);

    for (std::size_t q = 0; q <= top; ++q) {
        prev[q] = std::pow(w[0], static_cast<double>(q));
    }
    for (std::size_t k = 1; k < m; ++k) {
        const double log_theta = std::log(thetas[k - 1]);
        const int shift = shifts[k - 1];
        wpow[0] = 1.0;
        for (std::size_t e = 1; e <= top; ++e) {
            wpow[e] = wpow[e - 1] * w[k];
        }
        for (std::size_t q = 0; q <= top; ++q) {
            double acc = 0.0;
            double binom = 1.0;
            for (std::size_t j = 0; j <= q; ++j) {
                const double e = static_cast<double>(static_cast<int>(j) + shift);
                acc += binom * std::exp(e * e * log_theta) * prev[j] * wpow[q - j];
                binom = binom * static_cast<double>(q - j) / static_cast<double>(j + 1);
            }
            next[q] = acc;
        }
        std::swap(prev, next);
    }
    return prev[top];
}

// Shift pattern 0 for k < i, 1 for i <= k < j, 2 for k >= j (0-based, over
// the m-1 thetas). i == j == m leaves every exponent unshifted.
std::vector<int> shift_pattern(std::size_t m, std::size_t i, std::size_t j) {
    std::vector<int> s(m - 1);
    for (std::size_t k = 0; k + 1 < m; ++k) {
        s[k] = k < i ? 0 : (k < j ? 1 : 2);
    }
    return s;
}

void validate_tuple(const ExponentTuple& p, std::size_t m, int degree) {
    if (p.size() + 1 != m) {
        throw std::invalid_argument("exponent tuple must have m-1 entries");
    }
    int last = 0;
    for (int v : p) {
        if (v < last) {
            throw std::invalid_argument("exponent tuple must be nondecreasing and nonnegative");
        }
        last = v;
    }
    if (!p.empty() && p.back() > degree - 2) {
        throw std::invalid_argument("exponent tuple entries must not exceed p_m - 2");
    }
}

// log of the theta-power factor of entry (i, j), i <= j.
double log_theta_factor(const LyapunovConfig& cfg, const ExponentTuple& p, std::size_t i, std::size_t j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const int shift = k < i ? 0 : (k < j ? 1 : 2);
        const double e = static_cast<double>(p[k] + shift);
        acc += e * e * std::log(cfg.thetas[k]);
    }
    return acc;
}

// Unit-diagonal congruence D^{-1/2} M D^{-1/2} assembled in log space so
// large theta powers never overflow.
Matrix normalized_condition_matrix(const SpectralDecomposition& dec, const LyapunovConfig& cfg,
                                   const ExponentTuple& p) {
    const std::size_t m = dec.size();
    const auto lb = dec.lambdas_bar();
    std::vector<double> log_diag(m);
    for (std::size_t i = 0; i < m; ++i) {
        log_diag[i] = std::log(lb[i]) + log_theta_factor(cfg, p, i, i);
    }
    Matrix n(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        n(i, i) = 1.0;
        for (std::size_t j = i + 1; j < m; ++j) {
            const double log_entry = std::log(0.5 * (lb[i] + lb[j])) + log_theta_factor(cfg, p, i, j);
            n(i, j) = std::exp(log_entry - 0.5 * (log_diag[i] + log_diag[j]));
            n(j, i) = n(i, j);
        }
    }
    return n;
}

}  // namespace

void validate(const LyapunovConfig& cfg) {
    if (cfg.degree < 2) {
        throw std::invalid_argument("lyapunov: degree p_m must be >= 2");
    }
    for (double t : cfg.thetas) {
        if (!(t > 0.0) || !std::isfinite(t)) {
            throw std::invalid_argument("lyapunov: thetas must be positive and finite");
        }
    }
}

double eval_H(const LyapunovConfig& cfg, std::span<const double> w) {
    if (cfg.degree < 0) {
        throw std::invalid_argument("eval_H: negative degree");
    }
    validate_thetas(cfg, w.size());
    require_nonnegative(w);
    const std::vector<int> zero(w.size() - 1, 0);
    return shifted_sum(cfg.thetas, w, cfg.degree, zero);
}

std::vector<double> grad_H(const LyapunovConfig& cfg, std::span<const double> w) {
    if (cfg.degree < 1) {
        throw std::invalid_argument("grad_H: degree p_m must be >= 1");
    }
    validate_thetas(cfg, w.size());
    require_nonnegative(w);
    const std::size_t m = w.size();
    std::vector<double> g(m);
    for (std::size_t l = 0; l < m; ++l) {
        // theta_k exponent (p_k+1)^2 for k >= l, p_k^2 below.
        std::vector<int> s(m - 1);
        for (std::size_t k = 0; k + 1 < m; ++k) {
            s[k] = k >= l ? 1 : 0;
        }
        g[l] = cfg.degree * shifted_sum(cfg.thetas, w, cfg.degree - 1, s);
    }
    return g;
}

Matrix hess_H(const LyapunovConfig& cfg, std::span<const double> w) {
    if (cfg.degree < 2) {
        throw std::invalid_argument("hess_H: degree p_m must be >= 2");
    }
    validate_thetas(cfg, w.size());
    require_nonnegative(w);
    const std::size_t m = w.size();
    const double scale = static_cast<double>(cfg.degree) * static_cast<double>(cfg.degree - 1);
    Matrix h(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            const auto s = shift_pattern(m, i, j);
            h(i, j) = scale * shifted_sum(cfg.thetas, w, cfg.degree - 2, s);
            h(j, i) = h(i, j);
        }
    }
    return h;
}

std::vector<ExponentTuple> exponent_tuples(int m, int degree) {
    if (m < 2) {
        throw std::invalid_argument("exponent_tuples: m must be >= 2");
    }
    if (degree < 2) {
        throw std::invalid_argument("exponent_tuples: degree must be >= 2");
    }
    std::vector<ExponentTuple> out;
    ExponentTuple cur(static_cast<std::size_t>(m - 1));
    // Position k ranges from the previous entry to p_m - 2; nested in order so
    // the output is lexicographic in (p_1, ..., p_{m-1}).
    std::function<void(std::size_t, int)> fill = [&](std::size_t k, int lo) {
        if (k == cur.size()) {
            out.push_back(cur);
            return;
        }
        for (int v = lo; v <= degree - 2; ++v) {
            cur[k] = v;
            fill(k + 1, v);
        }
    };
    fill(0, 0);
    return out;
}

double coupling_ratio(const SpectralDecomposition& dec, std::size_t i, std::size_t j) {
    const double li = dec.lambdas_bar()[i];
    const double lj = dec.lambdas_bar()[j];
    return (li + lj) / (2.0 * std::sqrt(li * lj));
}

ConditionMatrix build_condition_matrix(const SpectralDecomposition& dec, const LyapunovConfig& cfg,
                                       const ExponentTuple& exponents) {
    const std::size_t m = dec.size();
    validate(cfg);
    validate_thetas(cfg, m);
    validate_tuple(exponents, m, cfg.degree);

    ConditionMatrix out;
    out.lambda_bar.assign(dec.lambdas_bar().begin(), dec.lambdas_bar().end());
    out.exponents = exponents;
    out.entries = Matrix(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            const double avg = 0.5 * (out.lambda_bar[i] + out.lambda_bar[j]);
            out.entries(i, j) = avg * std::exp(log_theta_factor(cfg, exponents, i, j));
            out.entries(j, i) = out.entries(i, j);
        }
    }
    return out;
}

MinorRecursion::MinorRecursion(const Matrix& a) : n_(a.rows()) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("k_recursion: matrix must be square");
    }
    const std::size_t n = n_;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    stages_.assign(n + 1, Matrix());
    if (n >= 2) {
        Matrix seed(n + 1, n + 1, nan);
        for (std::size_t i = 2; i <= n; ++i) {
            for (std::size_t j = 2; j <= n; ++j) {
                seed(i, j) = a(0, 0) * a(i - 1, j - 1) - a(0, i - 1) * a(0, j - 1);
            }
        }
        stages_[2] = std::move(seed);
    }
    for (std::size_t r = 3; r <= n; ++r) {
        const Matrix& prev = stages_[r - 1];
        Matrix cur(n + 1, n + 1, nan);
        const double pivot = prev(r - 1, r - 1);
        for (std::size_t i = r; i <= n; ++i) {
            for (std::size_t j = r; j <= n; ++j) {
                cur(i, j) = pivot * prev(i, j) - prev(r - 1, i) * prev(r - 1, j);
            }
        }
        stages_[r] = std::move(cur);
    }
    for (std::size_t l = 2; l <= n; ++l) {
        k_diag_.push_back(stages_[l](l, l));
    }
    for (std::size_t k = 1; k <= n; ++k) {
        minors_.push_back(determinant(leading_block(a, k)));
    }
}

double MinorRecursion::K(std::size_t l, std::size_t r) const {
    if (r < 2 || r > l || l > n_) {
        throw std::out_of_range("K_l^r requires 2 <= r <= l <= m");
    }
    return stages_[r](l, l);
}

double MinorRecursion::H(std::size_t l, std::size_t r) const {
    if (r < 2 || r >= l || l > n_) {
        throw std::out_of_range("H_l^r requires 2 <= r < l <= m");
    }
    return stages_[r](r, l);
}

MinorRecursion k_recursion(const Matrix& a) { return MinorRecursion(a); }

ConditionReport check_condition(const SpectralDecomposition& dec, const LyapunovConfig& cfg) {
    if (!parabolicity_check(dec.system())) {
        throw std::invalid_argument("check_condition: system is not parabolic");
    }
    validate(cfg);
    validate_thetas(cfg, dec.size());

    ConditionReport report;
    report.satisfied = true;
    report.min_margin = std::numeric_limits<double>::infinity();
    for (const auto& p : exponent_tuples(static_cast<int>(dec.size()), cfg.degree)) {
        const MinorRecursion rec(normalized_condition_matrix(dec, cfg, p));
        const auto& diag = rec.diagonal();
        double margin = std::numeric_limits<double>::infinity();
        std::size_t first_bad = 0;
        for (std::size_t idx = 0; idx < diag.size(); ++idx) {
            // NaN compares false and is treated as a violation.
            if (!(diag[idx] > 0.0) && first_bad == 0) {
                first_bad = idx + 2;
            }
            margin = std::min(margin, std::isnan(diag[idx]) ? -std::numeric_limits<double>::infinity() : diag[idx]);
        }
        report.margins.push_back({p, margin});
        report.min_margin = std::min(report.min_margin, margin);
        if (first_bad != 0) {
            report.satisfied = false;
            report.failing_tuple = p;
            report.failing_l = first_bad;
            break;
        }
    }
    return report;
}

ThetaSearchResult theta_search(const SpectralDecomposition& dec, int degree, const ThetaSearchOptions& opts) {
    if (!parabolicity_check(dec.system())) {
        throw std::invalid_argument("theta_search: system is not parabolic");
    }
    if (degree < 2) {
        throw std::invalid_argument("theta_search: degree p_m must be >= 2");
    }
    if (!(opts.ratio > 1.0) || opts.max_exponent < 0) {
        throw std::invalid_argument("theta_search: ratio must exceed 1 and max_exponent be nonnegative");
    }

    const std::size_t dims = dec.size() - 1;
    ThetaSearchResult result;
    result.best_margin = -std::numeric_limits<double>::infinity();
    std::vector<int> js(dims, 0);
    bool stop = false;

    auto evaluate = [&]() {
        LyapunovConfig cfg{degree, std::vector<double>(dims)};
        for (std::size_t k = 0; k < dims; ++k) {
            cfg.thetas[k] = std::pow(opts.ratio, js[k]);
        }
        ++result.evaluated;
        ConditionReport report = check_condition(dec, cfg);
        if (report.satisfied) {
            result.found = true;
            result.config = std::move(cfg);
            result.grid_exponents = js;
            result.best_margin = report.min_margin;
            result.report = std::move(report);
            stop = true;
            return;
        }
        if (report.min_margin > result.best_margin) {
            result.best_margin = report.min_margin;
            result.config = std::move(cfg);
            result.grid_exponents = js;
            result.report = std::move(report);
        }
        if (result.evaluated >= opts.budget) {
            stop = true;
        }
    };

    // Lexicographic compositions of `remaining` into positions k..dims-1,
    // each part capped at max_exponent.
    std::function<void(std::size_t, int)> compose = [&](std::size_t k, int remaining) {
        if (stop) {
            return;
        }
        if (k + 1 == dims) {
            if (remaining <= opts.max_exponent) {
                js[k] = remaining;
                evaluate();
            }
            return;
        }
        const auto tail_cap = static_cast<long>(dims - k - 1) * opts.max_exponent;
        for (int v = 0; v <= std::min(remaining, opts.max_exponent) && !stop; ++v) {
            if (remaining - v > tail_cap) {
                continue;
            }
            js[k] = v;
            compose(k + 1, remaining - v);
        }
    };

    const int max_sum = static_cast<int>(dims) * opts.max_exponent;
    for (int s = 0; s <= max_sum && !stop; ++s) {
        compose(0, s);
    }
    return result;
}

std::string format_certificate(const SpectralDecomposition& dec, const LyapunovConfig& cfg,
                               const ConditionReport& report) {
    std::ostringstream out;
    out << std::setprecision(17);
    const auto& sys = dec.system();
    out << "# Lyapunov condition certificate\n";
    out << "m = " << sys.m << '\n';
    out << "a = " << sys.a << '\n';
    out << "b = " << sys.b << '\n';
    out << "p_m = " << cfg.degree << '\n';
    out << "theta =";
    for (double t : cfg.thetas) {
        out << ' ' << t;
    }
    out << '\n';
    out << "lambda_bar =";
    for (double l : dec.lambdas_bar()) {
        out << ' ' << l;
    }
    out << '\n';
    out << "status = " << (report.satisfied ? "CERTIFIED" : "FAILED") << '\n';
    if (!report.satisfied && report.failing_tuple) {
        out << "failing_l = " << report.failing_l << '\n';
    }
    out << "tuples = " << report.margins.size() << '\n';
    out << "min_margin = " << report.min_margin << '\n';
    out << "# tuple (p_1 .. p_{m-1}) : min_l normalized K_l^l\n";
    for (const auto& tm : report.margins) {
        out << "tuple";
        for (int p : tm.exponents) {
            out << ' ' << p;
        }
        out << " : " << tm.margin << '\n';
    }
    return out.str();
}

}  // namespace trd
