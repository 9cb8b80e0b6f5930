#pragma once

#include "trd/linalg.hpp"
#include "trd/lyapunov.hpp"
#include "trd/reactions.hpp"
#include "trd/regions.hpp"
#include "trd/spectral.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace trd {

/// Uniform vertex-centred mesh on [0, length] with n_cells + 1 nodes.
struct Mesh1D {
    double length = 1.0;
    int n_cells = 64;

    double h() const { return length / n_cells; }
    std::size_t nodes() const { return static_cast<std::size_t>(n_cells) + 1; }
    double x(std::size_t i) const { return static_cast<double>(i) * h(); }
};

/// Throws unless length > 0 and n_cells >= 8.
void validate(const Mesh1D& mesh);

enum class BoundaryKind { Neumann, Robin, Dirichlet };

/// alpha w_l + (1 - alpha) d_n w_l = rho_l on both ends, rho = V beta.
///
/// alpha is per transformed component: 0 is homogeneous Neumann, 1 is
/// homogeneous Dirichlet, anything strictly between is Robin. beta is the
/// u-space data; homogeneous components need rho_l = 0.
struct BoundarySpec {
    std::vector<double> alpha;
    std::vector<double> beta;

    static BoundarySpec neumann(std::size_t m);
    static BoundarySpec dirichlet(std::size_t m);
    static BoundarySpec robin(std::size_t m, double alpha, std::vector<double> beta);

    BoundaryKind kind(std::size_t l) const;
    bool has_robin() const;
    /// Same alpha on every component (required to pose the u-space problem).
    bool uniform() const;
};

void validate(const BoundarySpec& bc, const SpectralDecomposition& dec);

/// rho_l = sum_k beta_k sin((m+1-l) k pi/(m+1)).
std::vector<double> boundary_rho(const BoundarySpec& bc, const SpectralDecomposition& dec);

/// Profiles mean_l + amplitude_l * shape(mode pi x / length), given either
/// in u or in (unsigned) transformed coordinates.
struct InitialData {
    enum class Basis { U, W };
    enum class Shape { Cosine, Sine };

    Basis basis = Basis::W;
    Shape shape = Shape::Cosine;
    std::vector<double> mean;
    std::vector<double> amplitude;
    int mode = 1;
};

struct SimState {
    double t = 0.0;
    std::size_t steps = 0;
    Matrix u;  // m x nodes
    Matrix w;  // m x nodes, to_w of each column of u
};

/// Nodewise U0 from the profile description.
SimState initial_state(const InitialData& init, const SpectralDecomposition& dec, const Mesh1D& mesh);

/// Strang-split integrator for the decoupled system
///   d_t w_l - lb_l w_xx = F_l(w)
/// with a classical RK4 reaction half-step on each side of a Crank-Nicolson
/// diffusion step per component.
class DiagonalIntegrator {
public:
    DiagonalIntegrator(const SpectralDecomposition& dec, const ReactionSpec& reaction, const BoundarySpec& bc,
                       const Mesh1D& mesh, double dt);
    /// Same, pairing component l with `diffusivities[l]` instead of lb_l.
    DiagonalIntegrator(const SpectralDecomposition& dec, const ReactionSpec& reaction, const BoundarySpec& bc,
                       const Mesh1D& mesh, double dt, std::span<const double> diffusivities);

    void step(SimState& state) const;
    double dt() const { return dt_; }

private:
    void react(Matrix& w, double tau) const;
    void diffuse(Matrix& w) const;

    const SpectralDecomposition* dec_;
    const ReactionSpec* reaction_;
    Mesh1D mesh_;
    double dt_;
    std::vector<double> diffusivity_;
    std::vector<BoundaryKind> kinds_;
    std::vector<double> sigma_;   // alpha / (1 - alpha)
    std::vector<double> gamma_;   // rho / (1 - alpha)
    std::vector<TridiagonalSolver> solvers_;
};

/// One step of the decoupled scheme.
void step(SimState& state, const SpectralDecomposition& dec, const ReactionSpec& reaction, const BoundarySpec& bc,
          const Mesh1D& mesh, double dt);

/// The same scheme posed directly on u: coupled diffusion stencil A u_xx
/// solved as a block-tridiagonal system, reaction f = V^{-1} F(V u).
class CoupledIntegrator {
public:
    CoupledIntegrator(const SpectralDecomposition& dec, const ReactionSpec& reaction, const BoundarySpec& bc,
                      const Mesh1D& mesh, double dt);

    void step(SimState& state) const;

private:
    void react(Matrix& u, double tau) const;
    void diffuse(Matrix& u) const;

    const SpectralDecomposition* dec_;
    PulledBackReaction reaction_;
    Mesh1D mesh_;
    double dt_;
    Matrix diffusion_;
    BoundaryKind kind_;
    double sigma_ = 0.0;
    std::vector<double> gamma_;
    // Block Thomas factorization: LU of each modified diagonal block and the
    // scaled super-diagonal blocks.
    std::vector<LuFactor> pivots_;
    std::vector<Matrix> upper_;
    std::vector<double> lower_coef_;
    std::vector<double> upper_coef_;
};

struct SimConfig {
    ToeplitzSystem sys;
    BoundarySpec bc;
    RegionSpec region = RegionSpec::positive(2);
    ReactionSpec reaction = ReactionSpec(2);
    LyapunovConfig lyapunov;
    Mesh1D mesh;
    InitialData init;
    double t_final = 1.0;
    double dt = 0.0;  // <= 0 selects dt = h
    std::size_t sample_every = 1;
    double blowup_threshold = 1e6;
};

/// A run refused before integrating. `reason` is a short stable name.
class PreconditionError : public std::runtime_error {
public:
    PreconditionError(std::string reason, const std::string& detail)
        : std::runtime_error(reason + ": " + detail), reason_(std::move(reason)) {}

    const std::string& reason() const { return reason_; }

private:
    std::string reason_;
};

inline const std::string kNotParabolic = "not parabolic";
inline const std::string kRegionMembershipFailed = "region membership failed";
inline const std::string kBoundaryIncompatible = "boundary data incompatible with region";
inline const std::string kConditionFailed = "Lyapunov condition failed";
inline const std::string kInvalidConfig = "invalid configuration";

/// Throws PreconditionError naming the first failed check.
void validate_run(const SimConfig& config);

struct MonitorSample {
    double t = 0.0;
    double L = 0.0;        // (1/|Omega|) int H(signed w) dx
    double Z = 0.0;        // L^{1/p_m}
    double supnorm = 0.0;  // max_x sum_l |w_l|
    std::vector<double> min_w;  // min_x signs[l] * w_l
    std::vector<double> mass;   // (1/|Omega|) int u_l dx
};

/// Fitted (C6, C8) with p_m (Z_{n+1} - Z_n)/dt <= C6 Z_n + C8 at every step.
struct GronwallFit {
    double c6 = 0.0;
    double c8 = 0.0;
    double worst_slack = 0.0;  // min over steps of (C6 Z_n + C8) - p_m dZ/dt
    bool holds = false;
    /// Z_n stays under the integrated envelope of the inequality.
    bool envelope_holds = false;
    std::size_t steps = 0;
};

GronwallFit fit_gronwall(std::span<const MonitorSample> trace, int degree);

struct SimResult {
    std::vector<MonitorSample> trace;  // initial state and every step
    double min_signed_w = 0.0;
    bool blew_up = false;
    double t_blowup = 0.0;
    GronwallFit gronwall;
    SimState final_state;
    double dt = 0.0;
};

/// Monitors of one state under the region signs and Lyapunov weights.
MonitorSample measure(const SimState& state, const RegionSpec& region, const LyapunovConfig& lyapunov,
                      const Mesh1D& mesh);

/// Trapezoid rule average (1/|Omega|) int f dx over the mesh nodes.
double domain_average(std::span<const double> values, const Mesh1D& mesh);

SimResult run(const SimConfig& config);

/// `t,L,Z,supnorm,minw_1..minw_m,mass_1..mass_m`, one row per `sample_every`
/// steps plus the final row.
void write_csv(std::ostream& out, const SimResult& result, std::size_t sample_every);

struct CrossCheckOptions {
    /// Negative control: pair w_l with the natural-order lambda_l.
    bool mismatch_ordering = false;
};

struct CrossCheckReport {
    double max_discrepancy = 0.0;  // sup over nodes and steps of |u_w - u_u|
    std::size_t steps = 0;
    double t_final = 0.0;
};

CrossCheckReport cross_check(const SimConfig& config, const CrossCheckOptions& options = {});

}  // namespace trd
