#include "trd/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>

namespace trd {

namespace {

constexpr double kHomogeneousTol = 1e-12;

// Classical RK4 on the pointwise system dv/dt = rhs(v), applied node by node.
template <typename Rhs>
void rk4_nodes(Matrix& field, double tau, Rhs&& rhs) {
    const std::size_t m = field.rows();
    const std::size_t nodes = field.cols();
    std::vector<double> v(m), k1(m), k2(m), k3(m), k4(m), tmp(m);
    for (std::size_t i = 0; i < nodes; ++i) {
        for (std::size_t l = 0; l < m; ++l) {
            v[l] = field(l, i);
        }
        rhs(v, k1);
        for (std::size_t l = 0; l < m; ++l) {
            tmp[l] = v[l] + 0.5 * tau * k1[l];
        }
        rhs(tmp, k2);
        for (std::size_t l = 0; l < m; ++l) {
            tmp[l] = v[l] + 0.5 * tau * k2[l];
        }
        rhs(tmp, k3);
        for (std::size_t l = 0; l < m; ++l) {
            tmp[l] = v[l] + tau * k3[l];
        }
        rhs(tmp, k4);
        for (std::size_t l = 0; l < m; ++l) {
            field(l, i) = v[l] + tau / 6.0 * (k1[l] + 2.0 * k2[l] + 2.0 * k3[l] + k4[l]);
        }
    }
}

// Nodewise product of an m x m matrix with every column of `field`.
Matrix apply_columns(const Matrix& op, const Matrix& field) { return multiply(op, field); }

// Discrete Laplacian with ghost-node elimination; no affine boundary part.
void laplacian_row(std::span<const double> v, std::span<double> out, BoundaryKind kind, double sigma, double h) {
    const std::size_t n = v.size() - 1;
    const double inv_h2 = 1.0 / (h * h);
    for (std::size_t i = 1; i < n; ++i) {
        out[i] = (v[i - 1] - 2.0 * v[i] + v[i + 1]) * inv_h2;
    }
    if (kind == BoundaryKind::Dirichlet) {
        out[0] = 0.0;
        out[n] = 0.0;
        return;
    }
    const double robin = 2.0 + 2.0 * h * sigma;
    out[0] = (2.0 * v[1] - robin * v[0]) * inv_h2;
    out[n] = (2.0 * v[n - 1] - robin * v[n]) * inv_h2;
}

struct Stencil {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;
};

// Coefficients of (I - tau L) for a unit diffusivity scaled by `coef`.
Stencil implicit_stencil(std::size_t nodes, BoundaryKind kind, double sigma, double h, double coef) {
    Stencil s{std::vector<double>(nodes, 0.0), std::vector<double>(nodes, 0.0), std::vector<double>(nodes, 0.0)};
    const std::size_t n = nodes - 1;
    const double c = coef / (h * h);
    for (std::size_t i = 1; i < n; ++i) {
        s.lower[i] = -c;
        s.diag[i] = 1.0 + 2.0 * c;
        s.upper[i] = -c;
    }
    if (kind == BoundaryKind::Dirichlet) {
        s.diag[0] = 1.0;
        s.diag[n] = 1.0;
        return s;
    }
    const double robin = 2.0 + 2.0 * h * sigma;
    s.diag[0] = 1.0 + robin * c;
    s.upper[0] = -2.0 * c;
    s.diag[n] = 1.0 + robin * c;
    s.lower[n] = -2.0 * c;
    return s;
}

}  // namespace

void validate(const Mesh1D& mesh) {
    if (!(mesh.length > 0.0) || !std::isfinite(mesh.length)) {
        throw std::invalid_argument("mesh: domain length must be positive");
    }
    if (mesh.n_cells < 8) {
        throw std::invalid_argument("mesh: n_cells must be >= 8");
    }
}

BoundarySpec BoundarySpec::neumann(std::size_t m) { return {std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)}; }

BoundarySpec BoundarySpec::dirichlet(std::size_t m) {
    return {std::vector<double>(m, 1.0), std::vector<double>(m, 0.0)};
}

BoundarySpec BoundarySpec::robin(std::size_t m, double alpha, std::vector<double> beta) {
    return {std::vector<double>(m, alpha), std::move(beta)};
}

BoundaryKind BoundarySpec::kind(std::size_t l) const {
    if (alpha.at(l) == 0.0) {
        return BoundaryKind::Neumann;
    }
    if (alpha.at(l) == 1.0) {
        return BoundaryKind::Dirichlet;
    }
    return BoundaryKind::Robin;
}

bool BoundarySpec::has_robin() const {
    for (std::size_t l = 0; l < alpha.size(); ++l) {
        if (kind(l) == BoundaryKind::Robin) {
            return true;
        }
    }
    return false;
}

bool BoundarySpec::uniform() const {
    return std::all_of(alpha.begin(), alpha.end(), [this](double a) { return a == alpha.front(); });
}

std::vector<double> boundary_rho(const BoundarySpec& bc, const SpectralDecomposition& dec) {
    return to_w(dec, bc.beta);
}

void validate(const BoundarySpec& bc, const SpectralDecomposition& dec) {
    if (bc.alpha.size() != dec.size() || bc.beta.size() != dec.size()) {
        throw std::invalid_argument("boundary: alpha and beta need one entry per component");
    }
    for (double a : bc.alpha) {
        if (!(a >= 0.0 && a <= 1.0)) {
            throw std::invalid_argument("boundary: alpha must lie in [0, 1]");
        }
    }
    const auto rho = boundary_rho(bc, dec);
    const double scale = 1.0 + max_abs(bc.beta);
    for (std::size_t l = 0; l < rho.size(); ++l) {
        if (bc.kind(l) != BoundaryKind::Robin && std::abs(rho[l]) > kHomogeneousTol * scale) {
            throw std::invalid_argument("boundary: Neumann and Dirichlet components must be homogeneous (rho_" +
                                        std::to_string(l + 1) + " != 0)");
        }
    }
}

SimState initial_state(const InitialData& init, const SpectralDecomposition& dec, const Mesh1D& mesh) {
    const std::size_t m = dec.size();
    if (init.mean.size() != m || init.amplitude.size() != m) {
        throw std::invalid_argument("initial data: mean and amplitude need one entry per component");
    }
    const std::size_t nodes = mesh.nodes();
    SimState state;
    Matrix profile(m, nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        const double arg = init.mode * std::numbers::pi * mesh.x(i) / mesh.length;
        const double shape = init.shape == InitialData::Shape::Cosine ? std::cos(arg) : std::sin(arg);
        for (std::size_t l = 0; l < m; ++l) {
            profile(l, i) = init.mean[l] + init.amplitude[l] * shape;
        }
    }
    if (init.basis == InitialData::Basis::U) {
        state.u = profile;
        state.w = apply_columns(dec.transform(), profile);
    } else {
        state.w = profile;
        state.u = apply_columns(dec.inverse(), profile);
    }
    return state;
}

DiagonalIntegrator::DiagonalIntegrator(const SpectralDecomposition& dec, const ReactionSpec& reaction,
                                       const BoundarySpec& bc, const Mesh1D& mesh, double dt)
    : DiagonalIntegrator(dec, reaction, bc, mesh, dt, dec.lambdas_bar()) {}

DiagonalIntegrator::DiagonalIntegrator(const SpectralDecomposition& dec, const ReactionSpec& reaction,
                                       const BoundarySpec& bc, const Mesh1D& mesh, double dt,
                                       std::span<const double> diffusivities)
    : dec_(&dec), reaction_(&reaction), mesh_(mesh), dt_(dt), diffusivity_(diffusivities.begin(), diffusivities.end()) {
    validate(mesh_);
    validate(bc, dec);
    if (!(dt > 0.0)) {
        throw std::invalid_argument("time step must be positive");
    }
    const std::size_t m = dec.size();
    if (static_cast<std::size_t>(reaction.size()) != m || diffusivity_.size() != m) {
        throw std::invalid_argument("integrator: component counts differ");
    }
    const auto rho = boundary_rho(bc, dec);
    for (std::size_t l = 0; l < m; ++l) {
        kinds_.push_back(bc.kind(l));
        const bool robin = kinds_.back() == BoundaryKind::Robin;
        sigma_.push_back(robin ? bc.alpha[l] / (1.0 - bc.alpha[l]) : 0.0);
        gamma_.push_back(robin ? rho[l] / (1.0 - bc.alpha[l]) : 0.0);
        auto s = implicit_stencil(mesh_.nodes(), kinds_[l], sigma_[l], mesh_.h(), 0.5 * dt_ * diffusivity_[l]);
        solvers_.emplace_back(std::move(s.lower), std::move(s.diag), std::move(s.upper));
    }
}

void DiagonalIntegrator::react(Matrix& w, double tau) const {
    rk4_nodes(w, tau, [this](std::span<const double> v, std::span<double> out) { reaction_->evaluate(v, out); });
}

void DiagonalIntegrator::diffuse(Matrix& w) const {
    const std::size_t nodes = mesh_.nodes();
    const std::size_t n = nodes - 1;
    const double h = mesh_.h();
    std::vector<double> lap(nodes);
    for (std::size_t l = 0; l < w.rows(); ++l) {
        auto row = w.row(l);
        laplacian_row(row, lap, kinds_[l], sigma_[l], h);
        const double tau_d = 0.5 * dt_ * diffusivity_[l];
        for (std::size_t i = 0; i < nodes; ++i) {
            row[i] += tau_d * lap[i];
        }
        if (kinds_[l] == BoundaryKind::Dirichlet) {
            row[0] = 0.0;
            row[n] = 0.0;
        } else if (kinds_[l] == BoundaryKind::Robin) {
            // Affine ghost-node contribution 2 gamma / h, taken at both time levels.
            const double source = dt_ * diffusivity_[l] * 2.0 * gamma_[l] / h;
            row[0] += source;
            row[n] += source;
        }
        solvers_[l].solve_in_place(row);
    }
}

void DiagonalIntegrator::step(SimState& state) const {
    react(state.w, 0.5 * dt_);
    diffuse(state.w);
    react(state.w, 0.5 * dt_);
    const std::size_t n = mesh_.nodes() - 1;
    for (std::size_t l = 0; l < state.w.rows(); ++l) {
        if (kinds_[l] == BoundaryKind::Dirichlet) {
            state.w(l, 0) = 0.0;
            state.w(l, n) = 0.0;
        }
    }
    state.u = apply_columns(dec_->inverse(), state.w);
    state.t += dt_;
    ++state.steps;
}

void step(SimState& state, const SpectralDecomposition& dec, const ReactionSpec& reaction, const BoundarySpec& bc,
          const Mesh1D& mesh, double dt) {
    DiagonalIntegrator(dec, reaction, bc, mesh, dt).step(state);
}

CoupledIntegrator::CoupledIntegrator(const SpectralDecomposition& dec, const ReactionSpec& reaction,
                                     const BoundarySpec& bc, const Mesh1D& mesh, double dt)
    : dec_(&dec), reaction_(reaction, dec), mesh_(mesh), dt_(dt), diffusion_(diffusion_matrix(dec.system())) {
    validate(mesh_);
    validate(bc, dec);
    if (!(dt > 0.0)) {
        throw std::invalid_argument("time step must be positive");
    }
    if (!bc.uniform()) {
        throw std::invalid_argument("coupled integrator: u-space boundary conditions need a shared alpha");
    }
    const std::size_t m = dec.size();
    kind_ = bc.kind(0);
    const bool robin = kind_ == BoundaryKind::Robin;
    sigma_ = robin ? bc.alpha[0] / (1.0 - bc.alpha[0]) : 0.0;
    gamma_.assign(m, 0.0);
    if (robin) {
        for (std::size_t k = 0; k < m; ++k) {
            gamma_[k] = bc.beta[k] / (1.0 - bc.alpha[0]);
        }
    }

    // Block row i: lower_coef_[i] A, I + c_i A, upper_coef_[i] A, where the
    // scalars come from the unit-diffusivity stencil.
    const std::size_t nodes = mesh_.nodes();
    auto s = implicit_stencil(nodes, kind_, sigma_, mesh_.h(), 0.5 * dt_);
    lower_coef_ = s.lower;
    upper_coef_ = s.upper;
    const bool dirichlet = kind_ == BoundaryKind::Dirichlet;
    auto diag_block = [&](std::size_t i) {
        Matrix d = Matrix::identity(m);
        if (dirichlet && (i == 0 || i == nodes - 1)) {
            return d;
        }
        for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t c = 0; c < m; ++c) {
                d(r, c) += (s.diag[i] - 1.0) * diffusion_(r, c);
            }
        }
        return d;
    };
    auto scaled = [&](double coef) {
        Matrix b = diffusion_;
        for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t c = 0; c < m; ++c) {
                b(r, c) *= coef;
            }
        }
        return b;
    };

    pivots_.reserve(nodes);
    upper_.reserve(nodes);
    Matrix current = diag_block(0);
    for (std::size_t i = 0; i < nodes; ++i) {
        if (i > 0) {
            // D'_i = D_i - B_i D'_{i-1}^{-1} C_{i-1}
            current = diag_block(i);
            const Matrix correction = multiply(scaled(lower_coef_[i]), upper_.back());
            for (std::size_t r = 0; r < m; ++r) {
                for (std::size_t c = 0; c < m; ++c) {
                    current(r, c) -= correction(r, c);
                }
            }
        }
        pivots_.emplace_back(current);
        if (i + 1 < nodes) {
            upper_.push_back(pivots_.back().solve(scaled(upper_coef_[i])));
        }
    }
}

void CoupledIntegrator::react(Matrix& u, double tau) const {
    rk4_nodes(u, tau, [this](std::span<const double> v, std::span<double> out) { reaction_.evaluate(v, out); });
}

void CoupledIntegrator::diffuse(Matrix& u) const {
    const std::size_t m = u.rows();
    const std::size_t nodes = mesh_.nodes();
    const std::size_t n = nodes - 1;
    const double h = mesh_.h();

    // rhs = u + (dt/2) A L u + dt A g, assembled component by component.
    Matrix lap(m, nodes);
    for (std::size_t k = 0; k < m; ++k) {
        laplacian_row(u.row(k), lap.row(k), kind_, sigma_, h);
        if (kind_ == BoundaryKind::Robin) {
            // L u + g carries the affine 2 gamma / h at both ends; the factor 2
            // in dt versus dt/2 accounts for both time levels.
            lap(k, 0) += 4.0 * gamma_[k] / h;
            lap(k, n) += 4.0 * gamma_[k] / h;
        }
    }
    const Matrix coupled = multiply(diffusion_, lap);
    std::vector<std::vector<double>> y(nodes, std::vector<double>(m));
    for (std::size_t i = 0; i < nodes; ++i) {
        for (std::size_t k = 0; k < m; ++k) {
            y[i][k] = u(k, i) + 0.5 * dt_ * coupled(k, i);
        }
        if (kind_ == BoundaryKind::Dirichlet && (i == 0 || i == n)) {
            std::fill(y[i].begin(), y[i].end(), 0.0);
        }
    }

    // Forward sweep.
    for (std::size_t i = 0; i < nodes; ++i) {
        if (i > 0 && lower_coef_[i] != 0.0) {
            const auto prev = multiply(diffusion_, y[i - 1]);
            for (std::size_t k = 0; k < m; ++k) {
                y[i][k] -= lower_coef_[i] * prev[k];
            }
        }
        pivots_[i].solve_in_place(y[i]);
    }
    // Back substitution.
    for (std::size_t i = n; i-- > 0;) {
        const auto next = multiply(upper_[i], y[i + 1]);
        for (std::size_t k = 0; k < m; ++k) {
            y[i][k] -= next[k];
        }
    }
    for (std::size_t i = 0; i < nodes; ++i) {
        for (std::size_t k = 0; k < m; ++k) {
            u(k, i) = y[i][k];
        }
    }
}

void CoupledIntegrator::step(SimState& state) const {
    react(state.u, 0.5 * dt_);
    diffuse(state.u);
    react(state.u, 0.5 * dt_);
    state.w = apply_columns(dec_->transform(), state.u);
    state.t += dt_;
    ++state.steps;
}

double domain_average(std::span<const double> values, const Mesh1D& mesh) {
    const std::size_t n = values.size() - 1;
    double acc = 0.5 * (values[0] + values[n]);
    for (std::size_t i = 1; i < n; ++i) {
        acc += values[i];
    }
    return acc * mesh.h() / mesh.length;
}

MonitorSample measure(const SimState& state, const RegionSpec& region, const LyapunovConfig& lyapunov,
                      const Mesh1D& mesh) {
    const std::size_t m = state.w.rows();
    const std::size_t nodes = state.w.cols();
    const auto signs = region.signs();
    MonitorSample s;
    s.t = state.t;
    s.min_w.assign(m, std::numeric_limits<double>::infinity());
    s.mass.resize(m);

    std::vector<double> h_values(nodes);
    std::vector<double> signed_w(m);
    bool finite = true;
    for (std::size_t i = 0; i < nodes; ++i) {
        double column_sum = 0.0;
        for (std::size_t l = 0; l < m; ++l) {
            const double v = signs[l] * state.w(l, i);
            s.min_w[l] = std::min(s.min_w[l], v);
            column_sum += std::abs(v);
            // H lives on the closed cone; round-off below zero is clamped.
            signed_w[l] = std::max(0.0, v);
            finite = finite && std::isfinite(v);
        }
        s.supnorm = std::max(s.supnorm, column_sum);
        if (!std::isfinite(column_sum)) {
            s.supnorm = std::numeric_limits<double>::infinity();
        }
        h_values[i] = finite ? eval_H(lyapunov, signed_w) : std::numeric_limits<double>::infinity();
    }
    s.L = domain_average(h_values, mesh);
    s.Z = std::pow(s.L, 1.0 / lyapunov.degree);
    for (std::size_t l = 0; l < m; ++l) {
        s.mass[l] = domain_average(state.u.row(l), mesh);
    }
    return s;
}

GronwallFit fit_gronwall(std::span<const MonitorSample> trace, int degree) {
    GronwallFit fit;
    if (trace.size() < 2) {
        fit.holds = true;
        fit.envelope_holds = true;
        return fit;
    }
    const std::size_t n = trace.size() - 1;
    std::vector<double> x(n), y(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double dt = trace[k + 1].t - trace[k].t;
        x[k] = trace[k].Z;
        y[k] = degree * (trace[k + 1].Z - trace[k].Z) / dt;
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.c6 = std::max(0.0, slope);

    // Lift the intercept until the line bounds every step.
    double lift = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        lift = std::max(lift, y[k] - fit.c6 * x[k]);
    }
    fit.c8 = std::max(0.0, lift);
    fit.steps = n;

    fit.worst_slack = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        fit.worst_slack = std::min(fit.worst_slack, fit.c6 * x[k] + fit.c8 - y[k]);
    }
    fit.holds = std::isfinite(fit.c6) && std::isfinite(fit.c8) && fit.worst_slack >= -1e-9;

    // Integrated form: p Z' <= C6 Z + C8 gives
    //   Z(t) <= (Z0 + C8/C6) exp(C6 (t - t0)/p) - C8/C6   (C6 > 0)
    //   Z(t) <= Z0 + C8 (t - t0)/p                         (C6 = 0)
    fit.envelope_holds = true;
    const double z0 = trace.front().Z;
    const double t0 = trace.front().t;
    for (const auto& s : trace) {
        const double elapsed = s.t - t0;
        double bound = 0.0;
        if (fit.c6 > 0.0) {
            const double shift = fit.c8 / fit.c6;
            bound = (z0 + shift) * std::exp(fit.c6 * elapsed / degree) - shift;
        } else {
            bound = z0 + fit.c8 * elapsed / degree;
        }
        if (s.Z > bound + 1e-9 * (1.0 + std::abs(bound))) {
            fit.envelope_holds = false;
        }
    }
    return fit;
}

void validate_run(const SimConfig& config) {
    try {
        validate(config.sys);
        validate(config.mesh);
    } catch (const std::invalid_argument& e) {
        throw PreconditionError(kInvalidConfig, e.what());
    }
    if (!parabolicity_check(config.sys)) {
        throw PreconditionError(kNotParabolic, "2b cos(pi/(m+1)) >= a");
    }
    const SpectralDecomposition dec(config.sys);
    const std::size_t m = dec.size();
    try {
        validate(config.bc, dec);
        validate(config.lyapunov);
        if (config.lyapunov.thetas.size() + 1 != m) {
            throw std::invalid_argument("lyapunov: expected m-1 thetas");
        }
        if (config.region.size() != m || static_cast<std::size_t>(config.reaction.size()) != m) {
            throw std::invalid_argument("region and reaction must have m components");
        }
        if (!(config.t_final > 0.0) || !std::isfinite(config.t_final)) {
            throw std::invalid_argument("final time must be positive");
        }
        if (config.dt < 0.0 || !std::isfinite(config.dt)) {
            throw std::invalid_argument("time step must be positive (or 0 for the default)");
        }
        if (config.sample_every == 0) {
            throw std::invalid_argument("sample interval must be >= 1");
        }
        (void)initial_state(config.init, dec, config.mesh);
    } catch (const std::invalid_argument& e) {
        throw PreconditionError(kInvalidConfig, e.what());
    }

    const SimState init = initial_state(config.init, dec, config.mesh);
    std::vector<double> u0(m);
    for (std::size_t i = 0; i < config.mesh.nodes(); ++i) {
        for (std::size_t l = 0; l < m; ++l) {
            u0[l] = init.u(l, i);
        }
        const auto check = membership(config.region, dec, u0);
        if (!check.inside) {
            throw PreconditionError(kRegionMembershipFailed,
                                    "initial data leaves " + config.region.describe() + " at x = " +
                                        std::to_string(config.mesh.x(i)));
        }
    }
    if (config.bc.has_robin()) {
        const auto check = boundary_compat(config.region, dec, config.bc.beta);
        if (!check.inside) {
            throw PreconditionError(kBoundaryIncompatible, "rho has the wrong sign for " + config.region.describe());
        }
    }
    const auto report = check_condition(dec, config.lyapunov);
    if (!report.satisfied) {
        throw PreconditionError(kConditionFailed, "K_" + std::to_string(report.failing_l) + "^" +
                                                      std::to_string(report.failing_l) + " <= 0");
    }
}

namespace {

struct StepPlan {
    std::size_t steps;
    double dt;
};

StepPlan plan_steps(const SimConfig& config) {
    const double target = config.dt > 0.0 ? config.dt : config.mesh.h();
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(config.t_final / target - 1e-9)));
    return {steps, config.t_final / static_cast<double>(steps)};
}

}  // namespace

SimResult run(const SimConfig& config) {
    validate_run(config);
    const SpectralDecomposition dec(config.sys);
    const auto plan = plan_steps(config);
    const DiagonalIntegrator integrator(dec, config.reaction, config.bc, config.mesh, plan.dt);

    SimResult result;
    result.dt = plan.dt;
    SimState state = initial_state(config.init, dec, config.mesh);
    result.trace.push_back(measure(state, config.region, config.lyapunov, config.mesh));
    for (std::size_t k = 0; k < plan.steps; ++k) {
        integrator.step(state);
        // Keep the final time exact instead of accumulating dt.
        state.t = static_cast<double>(k + 1) * plan.dt;
        result.trace.push_back(measure(state, config.region, config.lyapunov, config.mesh));
        const auto& last = result.trace.back();
        if (!std::isfinite(last.supnorm) || last.supnorm > config.blowup_threshold) {
            result.blew_up = true;
            result.t_blowup = state.t;
            break;
        }
    }
    result.final_state = state;

    const std::size_t healthy = result.trace.size() - (result.blew_up ? 1 : 0);
    const std::span<const MonitorSample> finite_trace(result.trace.data(), healthy);
    result.min_signed_w = std::numeric_limits<double>::infinity();
    for (const auto& s : finite_trace) {
        for (double v : s.min_w) {
            result.min_signed_w = std::min(result.min_signed_w, v);
        }
    }
    result.gronwall = fit_gronwall(finite_trace, config.lyapunov.degree);
    return result;
}

void write_csv(std::ostream& out, const SimResult& result, std::size_t sample_every) {
    if (result.trace.empty()) {
        return;
    }
    const std::size_t m = result.trace.front().min_w.size();
    out << "t,L,Z,supnorm";
    for (std::size_t l = 0; l < m; ++l) {
        out << ",minw_" << l + 1;
    }
    for (std::size_t l = 0; l < m; ++l) {
        out << ",mass_" << l + 1;
    }
    out << '\n';
    const auto old_precision = out.precision(17);
    const std::size_t every = std::max<std::size_t>(1, sample_every);
    for (std::size_t k = 0; k < result.trace.size(); ++k) {
        if (k % every != 0 && k + 1 != result.trace.size()) {
            continue;
        }
        const auto& s = result.trace[k];
        out << s.t << ',' << s.L << ',' << s.Z << ',' << s.supnorm;
        for (double v : s.min_w) {
            out << ',' << v;
        }
        for (double v : s.mass) {
            out << ',' << v;
        }
        out << '\n';
    }
    out.precision(old_precision);
}

CrossCheckReport cross_check(const SimConfig& config, const CrossCheckOptions& options) {
    validate_run(config);
    const SpectralDecomposition dec(config.sys);
    const auto plan = plan_steps(config);

    std::vector<double> diffusivities(dec.lambdas_bar().begin(), dec.lambdas_bar().end());
    if (options.mismatch_ordering) {
        diffusivities.assign(dec.lambdas().begin(), dec.lambdas().end());
    }
    const DiagonalIntegrator decoupled(dec, config.reaction, config.bc, config.mesh, plan.dt, diffusivities);
    const CoupledIntegrator coupled(dec, config.reaction, config.bc, config.mesh, plan.dt);

    SimState w_path = initial_state(config.init, dec, config.mesh);
    SimState u_path = w_path;
    CrossCheckReport report;
    for (std::size_t k = 0; k < plan.steps; ++k) {
        decoupled.step(w_path);
        coupled.step(u_path);
        report.max_discrepancy = std::max(report.max_discrepancy, max_abs_diff(w_path.u, u_path.u));
        ++report.steps;
        if (!std::isfinite(report.max_discrepancy) || max_abs(w_path.w.data()) > config.blowup_threshold) {
            break;
        }
    }
    report.t_final = static_cast<double>(report.steps) * plan.dt;
    return report;
}

}  // namespace trd
