#include "mrpoisson/config.hpp"

#include "mrpoisson/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace mrpoisson {

using json = nlohmann::json;

CaseId parse_case(const std::string& name)
{
    if (name == "gaussian1d") {
        return CaseId::gaussian1d;
    }
    if (name == "gaussian2d") {
        return CaseId::gaussian2d;
    }
    if (name == "sp3demo") {
        return CaseId::sp3demo;
    }
    throw ConfigError("unknown case '" + name + "' (expected gaussian1d, gaussian2d or sp3demo)");
}

std::string to_string(CaseId id)
{
    switch (id) {
    case CaseId::gaussian1d:
        return "gaussian1d";
    case CaseId::gaussian2d:
        return "gaussian2d";
    case CaseId::sp3demo:
        return "sp3demo";
    }
    return "?";
}

double RunConfig::solver_tol() const
{
    return tol ? *tol : std::max(1e-3 * eta, 1e-10);
}

SolverConfig RunConfig::solver_config() const
{
    SolverConfig s;
    s.method = solver;
    s.rel_tol = solver_tol();
    s.abs_tol = solver_tol();
    s.max_iters = max_iters;
    s.preconditioner = preconditioner;
    s.threads = threads;
    return s;
}

void RunConfig::validate() const
{
    if (max_level < 0 || max_level > Domain::kMaxLevel) {
        throw ConfigError("max_level out of range");
    }
    if (!roots.empty() && static_cast<int>(roots.size()) != dim()) {
        throw ConfigError("roots needs one entry per dimension");
    }
    for (int r : roots) {
        if (r < 1) {
            throw ConfigError("roots must be positive");
        }
    }
    if (!(eta >= 0.0)) {
        throw ConfigError("eta must be non-negative");
    }
    if (tol && !(*tol > 0.0)) {
        throw ConfigError("tol must be positive");
    }
    if (threads < 1) {
        throw ConfigError("threads must be at least 1");
    }
    if (!(gaussian.sigma > 0.0)) {
        throw ConfigError("gaussian.sigma must be positive");
    }
    const auto box = [this](const std::vector<double>& lo, const std::vector<double>& hi, const char* what) {
        if (lo.empty() && hi.empty()) {
            return;
        }
        if (static_cast<int>(lo.size()) != dim() || lo.size() != hi.size()) {
            throw ConfigError(std::string(what) + ": lo/hi need one entry per dimension");
        }
        for (std::size_t a = 0; a < lo.size(); ++a) {
            if (!(hi[a] > lo[a])) {
                throw ConfigError(std::string(what) + ": empty box");
            }
        }
    };
    if (case_id != CaseId::sp3demo) {
        box(gaussian.lo, gaussian.hi, "gaussian");
    } else {
        box(sp3.lo, sp3.hi, "sp3");
        if (sp3.center.size() != 2) {
            throw ConfigError("sp3.center needs two entries");
        }
    }
    if (!gaussian.bc.empty() && static_cast<int>(gaussian.bc.size()) != 2 * dim()) {
        throw ConfigError("gaussian.bc needs one entry per box side");
    }
    for (const std::string& s : gaussian.bc) {
        if (s != "dirichlet" && s != "neumann" && s != "symmetry") {
            throw ConfigError("unknown boundary condition '" + s + "'");
        }
    }
    if (gaussian.adapt_on.empty()) {
        throw ConfigError("gaussian.adapt_on must name at least one field");
    }
    for (const std::string& s : gaussian.adapt_on) {
        if (s != "rho" && s != "phi") {
            throw ConfigError("unknown adaptation field '" + s + "'");
        }
    }
    for (int l : study.levels) {
        if (l < 0 || l > Domain::kMaxLevel) {
            throw ConfigError("study.levels out of range");
        }
    }
    if (sp3.boundary != "robin" && sp3.boundary != "neumann") {
        throw ConfigError("sp3.boundary must be robin or neumann");
    }
    if (sp3.max_corrections < 0 || !(sp3.update_tol > 0.0) || !(sp3.sigma > 0.0)) {
        throw ConfigError("invalid sp3 iteration or source settings");
    }
    sp3.physics.validate();
}

namespace {

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!obj.is_object()) {
        throw ConfigError(where + " must be an object");
    }
    for (const auto& item : obj.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* k) { return item.key() == k; });
        if (!known) {
            throw ConfigError("unknown key '" + (where.empty() ? "" : where + ".") + item.key() + "'");
        }
    }
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where)
{
    if (!obj.contains(key)) {
        return;
    }
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("bad value for '" + (where.empty() ? "" : where + ".") + key + "'");
    }
}

} // namespace

RunConfig parse_config(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    check_keys(root, "",
               {"case", "max_level", "roots", "eta", "tol", "solver", "preconditioner", "max_iters", "threads",
                "out_dir", "gaussian", "study", "sp3"});
    RunConfig cfg;
    std::string name;
    if (root.contains("case")) {
        read(root, "case", name, "");
        cfg.case_id = parse_case(name);
    }
    read(root, "max_level", cfg.max_level, "");
    read(root, "roots", cfg.roots, "");
    read(root, "eta", cfg.eta, "");
    if (root.contains("tol") && !root.at("tol").is_null()) {
        double t = 0.0;
        read(root, "tol", t, "");
        cfg.tol = t;
    }
    if (root.contains("solver")) {
        read(root, "solver", name, "");
        cfg.solver = parse_solver_method(name);
    }
    if (root.contains("preconditioner")) {
        read(root, "preconditioner", name, "");
        if (name == "none") {
            cfg.preconditioner = Preconditioner::none;
        } else if (name == "jacobi") {
            cfg.preconditioner = Preconditioner::jacobi;
        } else {
            throw ConfigError("unknown preconditioner '" + name + "'");
        }
    }
    read(root, "max_iters", cfg.max_iters, "");
    read(root, "threads", cfg.threads, "");
    read(root, "out_dir", cfg.out_dir, "");
    if (root.contains("gaussian")) {
        const json& g = root.at("gaussian");
        check_keys(g, "gaussian", {"a", "b", "sigma", "lo", "hi", "bc", "adapt_on"});
        read(g, "a", cfg.gaussian.a, "gaussian");
        read(g, "b", cfg.gaussian.b, "gaussian");
        read(g, "sigma", cfg.gaussian.sigma, "gaussian");
        read(g, "lo", cfg.gaussian.lo, "gaussian");
        read(g, "hi", cfg.gaussian.hi, "gaussian");
        read(g, "bc", cfg.gaussian.bc, "gaussian");
        read(g, "adapt_on", cfg.gaussian.adapt_on, "gaussian");
    }
    if (root.contains("study")) {
        const json& s = root.at("study");
        check_keys(s, "study", {"levels", "etas"});
        read(s, "levels", cfg.study.levels, "study");
        read(s, "etas", cfg.study.etas, "study");
    }
    if (root.contains("sp3")) {
        const json& s = root.at("sp3");
        check_keys(s, "sp3",
                   {"lo", "hi", "amplitude", "sigma", "center", "boundary", "max_corrections", "update_tol", "p_o2",
                    "p", "p_q", "xi"});
        read(s, "lo", cfg.sp3.lo, "sp3");
        read(s, "hi", cfg.sp3.hi, "sp3");
        read(s, "amplitude", cfg.sp3.amplitude, "sp3");
        read(s, "sigma", cfg.sp3.sigma, "sp3");
        read(s, "center", cfg.sp3.center, "sp3");
        read(s, "boundary", cfg.sp3.boundary, "sp3");
        read(s, "max_corrections", cfg.sp3.max_corrections, "sp3");
        read(s, "update_tol", cfg.sp3.update_tol, "sp3");
        read(s, "p_o2", cfg.sp3.physics.p_o2, "sp3");
        read(s, "p", cfg.sp3.physics.p, "sp3");
        read(s, "p_q", cfg.sp3.physics.p_q, "sp3");
        read(s, "xi", cfg.sp3.physics.xi, "sp3");
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string dump_config(const RunConfig& cfg)
{
    json j;
    j["case"] = to_string(cfg.case_id);
    j["max_level"] = cfg.max_level;
    j["roots"] = cfg.roots;
    j["eta"] = cfg.eta;
    j["tol"] = cfg.tol ? json(*cfg.tol) : json(nullptr);
    j["solver"] = to_string(cfg.solver);
    j["preconditioner"] = cfg.preconditioner == Preconditioner::jacobi ? "jacobi" : "none";
    j["max_iters"] = cfg.max_iters;
    j["threads"] = cfg.threads;
    j["out_dir"] = cfg.out_dir;
    j["gaussian"] = {{"a", cfg.gaussian.a},         {"b", cfg.gaussian.b},   {"sigma", cfg.gaussian.sigma},
                     {"lo", cfg.gaussian.lo},       {"hi", cfg.gaussian.hi}, {"bc", cfg.gaussian.bc},
                     {"adapt_on", cfg.gaussian.adapt_on}};
    j["study"] = {{"levels", cfg.study.levels}, {"etas", cfg.study.etas}};
    j["sp3"] = {{"lo", cfg.sp3.lo},
                {"hi", cfg.sp3.hi},
                {"amplitude", cfg.sp3.amplitude},
                {"sigma", cfg.sp3.sigma},
                {"center", cfg.sp3.center},
                {"boundary", cfg.sp3.boundary},
                {"max_corrections", cfg.sp3.max_corrections},
                {"update_tol", cfg.sp3.update_tol},
                {"p_o2", cfg.sp3.physics.p_o2},
                {"p", cfg.sp3.physics.p},
                {"p_q", cfg.sp3.physics.p_q},
                {"xi", cfg.sp3.physics.xi}};
    return j.dump(2);
}

} // namespace mrpoisson
