#pragma once

#include "trd/reactions.hpp"
#include "trd/simulate.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace trd {

/// Parsed run description. Keys, one per line as `section.key = value`:
///
///   sys.m, sys.a, sys.b
///   bc.kind = neumann | dirichlet | robin, bc.alpha (scalar or list), bc.beta (list)
///   region.L = 1,2            (1-based; the rest of {1..m} forms Z; `none` for empty)
///   reaction.kind = builtin | file | zero, reaction.q, reaction.file
///   lyapunov.p, lyapunov.theta = auto | list
///   mesh.X, mesh.n
///   time.T, time.dt, time.sample_every
///   init.basis = u | w, init.shape = cos | sin, init.mean, init.amp, init.mode
///   monitor.blowup, seed, output.csv
///
/// Lists are comma separated. `#` starts a comment. Unknown or repeated keys
/// are errors.
struct RunConfig {
    SimConfig sim;
    bool theta_auto = false;
    std::string reaction_label;
    std::uint64_t seed = kDefaultSeed;
    std::string csv_path;
};

/// Throws std::invalid_argument with the offending key or line. Relative
/// reaction file paths resolve against `base_dir`.
RunConfig parse_run_config(std::istream& in, const std::string& base_dir = ".");
RunConfig load_run_config(const std::string& path);

}  // namespace trd
