#include "trd/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace trd {

namespace {

const std::set<std::string> kKnownKeys = {
    "sys.m",      "sys.a",          "sys.b",         "bc.kind",         "bc.alpha",    "bc.beta",
    "region.L",   "reaction.kind",  "reaction.q",    "reaction.file",   "lyapunov.p",  "lyapunov.theta",
    "mesh.X",     "mesh.n",         "time.T",        "time.dt",         "time.sample_every",
    "init.basis", "init.shape",     "init.mean",     "init.amp",        "init.mode",   "monitor.blowup",
    "seed",       "output.csv",
};

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

class Entries {
public:
    explicit Entries(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    const std::string& text(const std::string& key) const {
        const auto it = kv_.find(key);
        if (it == kv_.end()) {
            throw std::invalid_argument("missing required key '" + key + "'");
        }
        return it->second;
    }

    std::string text_or(const std::string& key, const std::string& fallback) const {
        return has(key) ? text(key) : fallback;
    }

    double number(const std::string& key) const { return parse_number(key, text(key)); }
    double number_or(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

    long integer(const std::string& key) const {
        const std::string& v = text(key);
        std::size_t used = 0;
        long out = 0;
        try {
            out = std::stol(v, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != v.size()) {
            throw std::invalid_argument("key '" + key + "': expected an integer, got '" + v + "'");
        }
        return out;
    }
    long integer_or(const std::string& key, long fallback) const { return has(key) ? integer(key) : fallback; }

    std::vector<double> list(const std::string& key) const {
        std::vector<double> out;
        std::stringstream ss(text(key));
        std::string item;
        while (std::getline(ss, item, ',')) {
            out.push_back(parse_number(key, trim(item)));
        }
        return out;
    }

private:
    static double parse_number(const std::string& key, const std::string& v) {
        std::size_t used = 0;
        double out = 0.0;
        try {
            out = std::stod(v, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != v.size()) {
            throw std::invalid_argument("key '" + key + "': expected a number, got '" + v + "'");
        }
        return out;
    }

    std::map<std::string, std::string> kv_;
};

std::vector<double> sized_list(const Entries& e, const std::string& key, std::size_t m) {
    auto values = e.list(key);
    if (values.size() == 1 && m > 1) {
        values.assign(m, values.front());
    }
    if (values.size() != m) {
        throw std::invalid_argument("key '" + key + "': expected 1 or " + std::to_string(m) + " values");
    }
    return values;
}

}  // namespace

RunConfig parse_run_config(std::istream& in, const std::string& base_dir) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (kKnownKeys.count(key) == 0) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        if (!kv.emplace(key, value).second) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": repeated key '" + key + "'");
        }
    }
    const Entries e(std::move(kv));

    RunConfig rc;
    SimConfig& sim = rc.sim;
    sim.sys.m = static_cast<int>(e.integer("sys.m"));
    sim.sys.a = e.number("sys.a");
    sim.sys.b = e.number("sys.b");
    validate(sim.sys);
    const auto m = static_cast<std::size_t>(sim.sys.m);

    const std::string kind = e.text_or("bc.kind", "neumann");
    if (kind == "neumann" || kind == "dirichlet") {
        if (e.has("bc.alpha")) {
            throw std::invalid_argument("bc.alpha is implied by bc.kind = " + kind);
        }
        sim.bc = kind == "neumann" ? BoundarySpec::neumann(m) : BoundarySpec::dirichlet(m);
        if (e.has("bc.beta")) {
            sim.bc.beta = sized_list(e, "bc.beta", m);
        }
    } else if (kind == "robin") {
        sim.bc.alpha = sized_list(e, "bc.alpha", m);
        sim.bc.beta = e.has("bc.beta") ? sized_list(e, "bc.beta", m) : std::vector<double>(m, 0.0);
        for (double a : sim.bc.alpha) {
            if (!(a > 0.0 && a < 1.0)) {
                throw std::invalid_argument("bc.alpha must lie strictly between 0 and 1 for robin");
            }
        }
    } else {
        throw std::invalid_argument("bc.kind must be neumann, dirichlet or robin");
    }

    {
        std::vector<std::size_t> L;
        std::vector<std::size_t> Z;
        std::set<std::size_t> chosen;
        const std::string spec = e.text_or("region.L", "");
        if (!spec.empty() && spec != "none") {
            for (double v : e.list("region.L")) {
                const auto idx = static_cast<long>(v);
                if (static_cast<double>(idx) != v || idx < 1 || idx > static_cast<long>(m)) {
                    throw std::invalid_argument("region.L entries must be indices in 1.." + std::to_string(m));
                }
                chosen.insert(static_cast<std::size_t>(idx - 1));
            }
        } else if (spec.empty()) {
            for (std::size_t i = 0; i < m; ++i) {
                chosen.insert(i);
            }
        }
        for (std::size_t i = 0; i < m; ++i) {
            (chosen.count(i) ? L : Z).push_back(i);
        }
        sim.region = RegionSpec(m, std::move(L), std::move(Z));
    }

    const std::string rkind = e.text_or("reaction.kind", "builtin");
    if (rkind == "builtin") {
        const auto q = static_cast<int>(e.integer_or("reaction.q", 1));
        sim.reaction = builtin_family(sim.sys.m, q);
        rc.reaction_label = "builtin q=" + std::to_string(q);
    } else if (rkind == "file") {
        std::filesystem::path p = e.text("reaction.file");
        if (p.is_relative()) {
            p = std::filesystem::path(base_dir) / p;
        }
        sim.reaction = load_reaction_file(p.string(), sim.sys.m);
        rc.reaction_label = "file " + p.string();
    } else if (rkind == "zero") {
        sim.reaction = ReactionSpec(sim.sys.m);
        rc.reaction_label = "zero";
    } else {
        throw std::invalid_argument("reaction.kind must be builtin, file or zero");
    }

    sim.lyapunov.degree = static_cast<int>(e.integer_or("lyapunov.p", 2));
    if (sim.lyapunov.degree < 2) {
        throw std::invalid_argument("lyapunov.p must be >= 2");
    }
    const std::string theta = e.text_or("lyapunov.theta", "auto");
    if (theta == "auto") {
        rc.theta_auto = true;
    } else {
        sim.lyapunov.thetas = e.list("lyapunov.theta");
        if (sim.lyapunov.thetas.size() + 1 != m) {
            throw std::invalid_argument("lyapunov.theta needs m-1 values");
        }
    }

    sim.mesh.length = e.number_or("mesh.X", 1.0);
    sim.mesh.n_cells = static_cast<int>(e.integer_or("mesh.n", 64));
    validate(sim.mesh);

    sim.t_final = e.number_or("time.T", 1.0);
    sim.dt = e.number_or("time.dt", 0.0);
    const long every = e.integer_or("time.sample_every", 1);
    if (every < 1) {
        throw std::invalid_argument("time.sample_every must be >= 1");
    }
    sim.sample_every = static_cast<std::size_t>(every);

    const std::string basis = e.text_or("init.basis", "w");
    if (basis != "u" && basis != "w") {
        throw std::invalid_argument("init.basis must be u or w");
    }
    sim.init.basis = basis == "u" ? InitialData::Basis::U : InitialData::Basis::W;
    const std::string shape = e.text_or("init.shape", "cos");
    if (shape != "cos" && shape != "sin") {
        throw std::invalid_argument("init.shape must be cos or sin");
    }
    sim.init.shape = shape == "cos" ? InitialData::Shape::Cosine : InitialData::Shape::Sine;
    sim.init.mean = sized_list(e, "init.mean", m);
    sim.init.amplitude = e.has("init.amp") ? sized_list(e, "init.amp", m) : std::vector<double>(m, 0.0);
    sim.init.mode = static_cast<int>(e.integer_or("init.mode", 1));

    sim.blowup_threshold = e.number_or("monitor.blowup", 1e6);
    const long seed = e.integer_or("seed", static_cast<long>(kDefaultSeed));
    if (seed < 0) {
        throw std::invalid_argument("seed must be nonnegative");
    }
    rc.seed = static_cast<std::uint64_t>(seed);
    rc.csv_path = e.text_or("output.csv", "");
    return rc;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open config file: " + path);
    }
    const auto parent = std::filesystem::path(path).parent_path();
    return parse_run_config(in, parent.empty() ? "." : parent.string());
}

}  // namespace trd
