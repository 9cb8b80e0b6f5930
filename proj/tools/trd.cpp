#include "acceptance.hpp"
#include "trd/config.hpp"
#include "trd/lyapunov.hpp"
#include "trd/regions.hpp"
#include "trd/simulate.hpp"
#include "trd/spectral.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>

namespace {

// 0 ok, 1 condition failure, 2 validation error, 3 blow-up.
constexpr int kOk = 0;
constexpr int kConditionFailure = 1;
constexpr int kValidationError = 2;
constexpr int kBlowUp = 3;

struct SystemArgs {
    int m = 2;
    double a = 1.0;
    double b = 1.0;

    trd::ToeplitzSystem system() const { return {m, a, b}; }
};

void add_system_options(CLI::App* cmd, SystemArgs& args) {
    cmd->add_option("-m", args.m, "number of components")->required();
    cmd->add_option("-a", args.a, "diagonal diffusion coefficient")->required();
    cmd->add_option("-b", args.b, "off-diagonal coupling")->required();
}

void print_vector(std::ostream& out, const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        out << (i ? " " : "") << v[i];
    }
}

int cmd_spectrum(const SystemArgs& args) {
    const auto dec = trd::decompose(args.system());
    const std::size_t m = dec.size();
    std::cout << std::setprecision(12);
    std::cout << "l  lambda_l  lambda_bar_l\n";
    for (std::size_t l = 0; l < m; ++l) {
        std::cout << l + 1 << "  " << dec.lambdas()[l] << "  " << dec.lambdas_bar()[l] << '\n';
    }
    const bool parabolic = trd::parabolicity_check(args.system());
    std::cout << "verdict: " << (parabolic ? "PARABOLIC" : "NOT PARABOLIC") << '\n';
    return parabolic ? kOk : kConditionFailure;
}

int cmd_regions(const SystemArgs& args, const std::vector<double>& u0, const std::vector<double>& beta) {
    const auto dec = trd::decompose(args.system());
    const auto regions = trd::enumerate_regions(args.m);
    std::cout << std::setprecision(6);
    for (std::size_t k = 0; k < regions.size(); ++k) {
        const auto& r = regions[k];
        std::cout << k << "  " << r.describe();
        if (!u0.empty()) {
            const auto check = trd::membership(r, dec, u0);
            std::cout << "  u0 " << (check.inside ? "inside" : "outside") << " margins ";
            print_vector(std::cout, check.margins);
        }
        if (!beta.empty()) {
            const auto check = trd::boundary_compat(r, dec, beta);
            std::cout << "  beta " << (check.inside ? "compatible" : "incompatible");
        }
        std::cout << '\n';
    }
    return kOk;
}

int cmd_certify(const SystemArgs& args, int degree, const std::vector<double>& thetas,
                const trd::ThetaSearchOptions& opts, const std::string& out_path) {
    if (!trd::parabolicity_check(args.system())) {
        std::cerr << "error: not parabolic (2b cos(pi/(m+1)) >= a)\n";
        return kValidationError;
    }
    if (degree < 2) {
        std::cerr << "error: p_m must be >= 2\n";
        return kValidationError;
    }
    const trd::SpectralDecomposition dec(args.system());
    trd::LyapunovConfig cfg;
    cfg.degree = degree;
    trd::ConditionReport report;
    if (thetas.empty()) {
        const auto found = trd::theta_search(dec, degree, opts);
        if (!found.found) {
            std::cerr << "theta search exhausted after " << found.evaluated
                      << " candidates; tightest margin " << found.best_margin << '\n';
            return kConditionFailure;
        }
        cfg = found.config;
        report = found.report;
    } else {
        cfg.thetas = thetas;
        trd::validate(cfg);
        if (cfg.thetas.size() + 1 != dec.size()) {
            throw std::invalid_argument("--theta needs m-1 values");
        }
        report = trd::check_condition(dec, cfg);
    }
    const auto text = trd::format_certificate(dec, cfg, report);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        if (!out) {
            throw std::invalid_argument("cannot write " + out_path);
        }
        out << text;
        std::cout << "certificate written to " << out_path << '\n';
    }
    if (!report.satisfied) {
        std::cerr << "condition fails at l = " << report.failing_l << "; min margin " << report.min_margin << '\n';
        return kConditionFailure;
    }
    return kOk;
}

int cmd_simulate(const std::string& config_path, std::string csv_path) {
    auto rc = trd::load_run_config(config_path);
    auto& sim = rc.sim;
    const trd::SpectralDecomposition dec(sim.sys);
    if (!trd::parabolicity_check(sim.sys)) {
        std::cerr << "abort: " << trd::kNotParabolic << '\n';
        return kValidationError;
    }
    if (rc.theta_auto) {
        const auto found = trd::theta_search(dec, sim.lyapunov.degree);
        if (!found.found) {
            std::cerr << "abort: " << trd::kConditionFailed << ": no theta found, tightest margin "
                      << found.best_margin << '\n';
            return kConditionFailure;
        }
        sim.lyapunov = found.config;
    }
    trd::SimResult result;
    try {
        result = trd::run(sim);
    } catch (const trd::PreconditionError& e) {
        std::cerr << "abort: " << e.what() << '\n';
        return e.reason() == trd::kConditionFailed ? kConditionFailure : kValidationError;
    }

    if (csv_path.empty()) {
        csv_path = rc.csv_path;
    }
    std::ostream* summary = &std::cout;
    if (csv_path.empty()) {
        trd::write_csv(std::cout, result, sim.sample_every);
        summary = &std::cerr;
    } else {
        std::ofstream out(csv_path);
        if (!out) {
            throw std::invalid_argument("cannot write " + csv_path);
        }
        trd::write_csv(out, result, sim.sample_every);
    }

    const auto a1 = trd::check_A1(trd::as_field(sim.reaction), sim.sys.m, trd::kDefaultSamples, {}, rc.seed);
    auto& s = *summary;
    s << std::setprecision(10);
    s << "reaction: " << rc.reaction_label << " (quasipositivity " << (a1.passed ? "ok" : "VIOLATED")
      << ", worst " << a1.worst_slack << ")\n";
    s << "region: " << sim.region.describe() << "\n";
    s << "theta:";
    for (double t : sim.lyapunov.thetas) {
        s << ' ' << t;
    }
    s << "\nsteps: " << result.trace.size() - 1 << ", dt " << result.dt << '\n';
    s << "min signed w: " << result.min_signed_w << '\n';
    s << "gronwall: C6 " << result.gronwall.c6 << ", C8 " << result.gronwall.c8 << ", worst slack "
      << result.gronwall.worst_slack << (result.gronwall.holds ? " (holds)" : " (VIOLATED)") << '\n';
    if (result.blew_up) {
        s << "blow-up: T_max ~ " << result.t_blowup << '\n';
        return kBlowUp;
    }
    s << "final L: " << result.trace.back().L << '\n';
    return kOk;
}

int cmd_verify_all() {
    const auto results = trd::acceptance::run_all(std::cout);
    const bool ok = std::all_of(results.begin(), results.end(), [](const auto& o) { return o.passed; });
    return ok ? kOk : kConditionFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tridiagonal Toeplitz reaction-diffusion toolkit"};
    app.require_subcommand(1);

    SystemArgs sys;

    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues and parabolicity verdict");
    add_system_options(spectrum, sys);

    std::vector<double> u0;
    std::vector<double> beta;
    auto* regions = app.add_subcommand("regions", "list the 2^m regions, optionally testing data");
    add_system_options(regions, sys);
    regions->add_option("--u0", u0, "initial value U0 to test")->delimiter(',');
    regions->add_option("--beta", beta, "Robin data beta to test")->delimiter(',');

    int degree = 2;
    std::vector<double> thetas;
    std::string cert_out;
    trd::ThetaSearchOptions opts;
    auto* certify = app.add_subcommand("certify", "search for and certify Lyapunov weights");
    add_system_options(certify, sys);
    certify->add_option("-p", degree, "polynomial degree p_m");
    certify->add_option("--theta", thetas, "check these weights instead of searching")->delimiter(',');
    certify->add_option("--ratio", opts.ratio, "theta grid ratio");
    certify->add_option("--max-exponent", opts.max_exponent, "largest grid exponent");
    certify->add_option("--budget", opts.budget, "candidate limit");
    certify->add_option("-o,--out", cert_out, "certificate file");

    std::string config_path;
    std::string csv_path;
    auto* simulate = app.add_subcommand("simulate", "run a configured simulation");
    simulate->add_option("config", config_path, "run configuration file")->required();
    simulate->add_option("--csv", csv_path, "CSV output path (overrides output.csv)");

    auto* verify = app.add_subcommand("verify-all", "run the acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kValidationError;
    }

    try {
        if (spectrum->parsed()) {
            return cmd_spectrum(sys);
        }
        if (regions->parsed()) {
            return cmd_regions(sys, u0, beta);
        }
        if (certify->parsed()) {
            (void)trd::decompose(sys.system());
            return cmd_certify(sys, degree, thetas, opts, cert_out);
        }
        if (simulate->parsed()) {
            return cmd_simulate(config_path, csv_path);
        }
        if (verify->parsed()) {
            return cmd_verify_all();
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidationError;
    }
    return kValidationError;
}
