#include "trd/reactions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace trd {

int Monomial::total_degree() const { return std::accumulate(exponents.begin(), exponents.end(), 0); }

double Monomial::evaluate(std::span<const double> w) const {
    double v = coefficient;
    for (std::size_t k = 0; k < exponents.size(); ++k) {
        for (int e = 0; e < exponents[k]; ++e) {
            v *= w[k];
        }
    }
    return v;
}

ReactionSpec::ReactionSpec(int m) : m_(m), components_(static_cast<std::size_t>(std::max(m, 0))) {
    if (m < 2) {
        throw std::invalid_argument("reaction: m must be >= 2");
    }
}

ReactionSpec::ReactionSpec(int m, std::vector<std::vector<Monomial>> components)
    : m_(m), components_(std::move(components)) {
    if (m < 2) {
        throw std::invalid_argument("reaction: m must be >= 2");
    }
    if (components_.size() != static_cast<std::size_t>(m)) {
        throw std::invalid_argument("reaction: expected one monomial list per component");
    }
    for (const auto& comp : components_) {
        for (const auto& mono : comp) {
            if (mono.exponents.size() != static_cast<std::size_t>(m)) {
                throw std::invalid_argument("reaction: monomial exponent count must equal m");
            }
            if (std::any_of(mono.exponents.begin(), mono.exponents.end(), [](int e) { return e < 0; })) {
                throw std::invalid_argument("reaction: exponents must be nonnegative");
            }
            if (!std::isfinite(mono.coefficient)) {
                throw std::invalid_argument("reaction: coefficients must be finite");
            }
            growth_degree_ = std::max(growth_degree_, mono.total_degree());
        }
    }
}

double ReactionSpec::coefficient_mass(std::size_t l) const {
    double acc = 0.0;
    for (const auto& mono : components_.at(l)) {
        acc += std::abs(mono.coefficient);
    }
    return acc;
}

void ReactionSpec::evaluate(std::span<const double> w, std::span<double> out) const {
    for (std::size_t l = 0; l < components_.size(); ++l) {
        double acc = 0.0;
        for (const auto& mono : components_[l]) {
            acc += mono.evaluate(w);
        }
        out[l] = acc;
    }
}

std::vector<double> ReactionSpec::evaluate(std::span<const double> w) const {
    if (w.size() != static_cast<std::size_t>(m_)) {
        throw std::invalid_argument("reaction: dimension mismatch");
    }
    std::vector<double> out(w.size());
    evaluate(w, std::span<double>(out));
    return out;
}

ReactionSpec builtin_family(int m, int q) {
    if (m < 2 || q < 1) {
        throw std::invalid_argument("builtin_family: requires m >= 2 and q >= 1");
    }
    const auto n = static_cast<std::size_t>(m);
    std::vector<std::vector<Monomial>> comps(n);
    for (std::size_t l = 0; l + 1 < n; ++l) {
        std::vector<int> e(n, 0);
        e[l] = 1;
        e[n - 1] = q;
        comps[l].push_back({-1.0, e});
        comps[n - 1].push_back({1.0, e});
    }
    return ReactionSpec(m, std::move(comps));
}

ReactionSpec parse_reaction(std::istream& in, int m) {
    if (m < 2) {
        throw std::invalid_argument("reaction: m must be >= 2");
    }
    std::vector<std::vector<Monomial>> comps(static_cast<std::size_t>(m));
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream fields(line);
        int component = 0;
        if (!(fields >> component)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) {
                continue;
            }
            throw std::invalid_argument("reaction line " + std::to_string(lineno) + ": bad component index");
        }
        Monomial mono;
        if (!(fields >> mono.coefficient)) {
            throw std::invalid_argument("reaction line " + std::to_string(lineno) + ": missing coefficient");
        }
        int e = 0;
        while (fields >> e) {
            mono.exponents.push_back(e);
        }
        if (!fields.eof()) {
            throw std::invalid_argument("reaction line " + std::to_string(lineno) + ": bad exponent");
        }
        if (component < 1 || component > m) {
            throw std::invalid_argument("reaction line " + std::to_string(lineno) + ": component out of range");
        }
        if (mono.exponents.size() != static_cast<std::size_t>(m)) {
            throw std::invalid_argument("reaction line " + std::to_string(lineno) + ": expected " +
                                        std::to_string(m) + " exponents");
        }
        if (std::any_of(mono.exponents.begin(), mono.exponents.end(), [](int x) { return x < 0; })) {
            throw std::invalid_argument("reaction line " + std::to_string(lineno) + ": negative exponent");
        }
        comps[static_cast<std::size_t>(component - 1)].push_back(std::move(mono));
    }
    return ReactionSpec(m, std::move(comps));
}

ReactionSpec load_reaction_file(const std::string& path, int m) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open reaction file: " + path);
    }
    return parse_reaction(in, m);
}

ReactionField as_field(const ReactionSpec& spec) {
    return [spec](std::span<const double> w) { return spec.evaluate(w); };
}

PulledBackReaction::PulledBackReaction(const ReactionSpec& spec, const SpectralDecomposition& dec)
    : spec_(&spec), dec_(&dec) {
    if (static_cast<std::size_t>(spec.size()) != dec.size()) {
        throw std::invalid_argument("pullback: reaction and decomposition sizes differ");
    }
}

void PulledBackReaction::evaluate(std::span<const double> u, std::span<double> out) const {
    const std::vector<double> w = to_w(*dec_, u);
    std::vector<double> f(w.size());
    spec_->evaluate(w, f);
    const auto back = to_u(*dec_, f);
    std::copy(back.begin(), back.end(), out.begin());
}

std::vector<double> PulledBackReaction::operator()(std::span<const double> u) const {
    std::vector<double> out(u.size());
    evaluate(u, out);
    return out;
}

PulledBackReaction pullback_to_u(const ReactionSpec& spec, const SpectralDecomposition& dec) {
    return PulledBackReaction(spec, dec);
}

ReactionField push_forward(ReactionField u_reaction, const SpectralDecomposition& dec) {
    return [f = std::move(u_reaction), &dec](std::span<const double> w) {
        const auto u = to_u(dec, w);
        return to_w(dec, f(u));
    };
}

namespace {

class Sampler {
public:
    Sampler(std::size_t m, SampleBox box, std::uint64_t seed) : point_(m), rng_(seed), dist_(box.lo, box.hi) {
        if (!(box.lo >= 0.0) || !(box.hi >= box.lo)) {
            throw std::invalid_argument("sample box must lie in the nonnegative orthant");
        }
    }

    std::vector<double>& next() {
        for (double& x : point_) {
            x = dist_(rng_);
        }
        return point_;
    }

private:
    std::vector<double> point_;
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> dist_;
};

void record(AssumptionReport& report, double slack, std::span<const double> w, std::size_t component) {
    if (report.worst_point.empty() || slack < report.worst_slack) {
        report.worst_slack = slack;
        report.worst_point.assign(w.begin(), w.end());
        report.worst_component = component;
    }
}

}  // namespace

AssumptionReport check_A1(const ReactionField& field, int m, std::size_t n_samples, SampleBox box,
                          std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(m);
    Sampler sampler(n, box, seed);
    AssumptionReport report;
    for (std::size_t s = 0; s < n_samples; ++s) {
        auto& w = sampler.next();
        for (std::size_t l = 0; l < n; ++l) {
            const double saved = w[l];
            w[l] = 0.0;
            const auto f = field(w);
            record(report, f[l], w, l);
            w[l] = saved;
        }
        ++report.samples;
    }
    report.passed = report.worst_slack >= -1e-12;
    return report;
}

AssumptionReport check_A2(const ReactionSpec& spec, std::size_t n_samples, SampleBox box, std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(spec.size());
    double c1 = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        c1 = std::max(c1, spec.coefficient_mass(l));
    }
    Sampler sampler(n, box, seed);
    AssumptionReport report;
    report.passed = true;
    for (std::size_t s = 0; s < n_samples; ++s) {
        const auto& w = sampler.next();
        const double sum = std::accumulate(w.begin(), w.end(), 0.0);
        const double bound = c1 * std::pow(1.0 + sum, spec.growth_degree());
        const auto f = spec.evaluate(w);
        for (std::size_t l = 0; l < n; ++l) {
            const double slack = bound - std::abs(f[l]);
            record(report, slack, w, l);
            if (slack < -1e-12 * std::max(1.0, bound)) {
                report.passed = false;
            }
        }
        ++report.samples;
    }
    return report;
}

AssumptionReport check_A3(const ReactionField& field, int m, std::span<const double> D, double C2,
                          std::size_t n_samples, SampleBox box, std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(m);
    if (D.size() + 1 != n) {
        throw std::invalid_argument("check_A3: expected m-1 weights D");
    }
    if (std::any_of(D.begin(), D.end(), [](double d) { return !(d > 0.0); })) {
        throw std::invalid_argument("check_A3: weights D must be positive");
    }
    Sampler sampler(n, box, seed);
    AssumptionReport report;
    report.passed = true;
    for (std::size_t s = 0; s < n_samples; ++s) {
        const auto& w = sampler.next();
        const auto f = field(w);
        double lhs = f[n - 1];
        for (std::size_t l = 0; l + 1 < n; ++l) {
            lhs += D[l] * f[l];
        }
        const double rhs = C2 * (1.0 + std::accumulate(w.begin(), w.end(), 0.0));
        const double slack = rhs - lhs;
        record(report, slack, w, n - 1);
        if (slack < -1e-12 * std::max(1.0, std::abs(rhs))) {
            report.passed = false;
        }
        ++report.samples;
    }
    return report;
}

}  // namespace trd
