#include "mrpoisson/cases.hpp"

#include "mrpoisson/error.hpp"
#include "mrpoisson/sp3.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>

namespace mrpoisson {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double r2(const RVec& x, int dim)
{
    double s = 0.0;
    for (int a = 0; a < dim; ++a) {
        s += x[a] * x[a];
    }
    return s;
}

IVec roots_of(const RunConfig& cfg)
{
    IVec roots{1, 1, 1};
    if (!cfg.roots.empty()) {
        for (std::size_t a = 0; a < cfg.roots.size(); ++a) {
            roots[a] = cfg.roots[a];
        }
        return roots;
    }
    switch (cfg.case_id) {
    case CaseId::gaussian1d:
        roots = {4, 1, 1};
        break;
    case CaseId::gaussian2d:
        roots = {4, 2, 1};
        break;
    case CaseId::sp3demo:
        roots = {2, 2, 1};
        break;
    }
    return roots;
}

std::string nan_or(double v)
{
    return std::isnan(v) ? std::string() : csv_number(v);
}

} // namespace

double GaussianSolution::g(const RVec& x) const
{
    return a * std::exp(-r2(x, dim) / (sigma * sigma));
}

double GaussianSolution::rho(const RVec& x) const
{
    const double s2 = sigma * sigma;
    return (4.0 * r2(x, dim) / (s2 * s2) - 2.0 * dim / s2) * g(x);
}

double GaussianSolution::e(const RVec& x, int axis) const
{
    return 2.0 * x[axis] * g(x) / (sigma * sigma);
}

GaussianSolution gaussian_solution(const RunConfig& cfg)
{
    return GaussianSolution{cfg.dim(), cfg.gaussian.a, cfg.gaussian.b, cfg.gaussian.sigma};
}

Domain case_domain(const RunConfig& cfg, int max_level)
{
    const int dim = cfg.dim();
    RVec lo{0.0, 0.0, 0.0};
    RVec hi{1.0, 1.0, 1.0};
    const std::vector<double>* clo = &cfg.gaussian.lo;
    const std::vector<double>* chi = &cfg.gaussian.hi;
    if (cfg.case_id == CaseId::sp3demo) {
        clo = &cfg.sp3.lo;
        chi = &cfg.sp3.hi;
    }
    if (!clo->empty()) {
        for (int a = 0; a < dim; ++a) {
            lo[a] = (*clo)[static_cast<std::size_t>(a)];
            hi[a] = (*chi)[static_cast<std::size_t>(a)];
        }
    } else if (cfg.case_id == CaseId::gaussian1d) {
        lo[0] = -0.5;
        hi[0] = 0.5;
    } else {
        lo = {-0.5, 0.0, 0.0};
        hi = {0.5, 0.5, 1.0};
    }
    return Domain(dim, roots_of(cfg), max_level, lo, hi);
}

BCSpec gaussian_bc(const RunConfig& cfg)
{
    const int dim = cfg.dim();
    std::vector<std::string> kinds = cfg.gaussian.bc;
    if (kinds.empty()) {
        kinds.assign(static_cast<std::size_t>(2 * dim), "dirichlet");
        if (dim == 2) {
            kinds[2] = "symmetry";
        }
    }
    const GaussianSolution sol = gaussian_solution(cfg);
    BCSpec bc;
    for (int a = 0; a < dim; ++a) {
        for (Side side : {Side::minus, Side::plus}) {
            const std::string& kind = kinds[static_cast<std::size_t>(2 * a + static_cast<int>(side))];
            if (kind == "dirichlet") {
                bc.set(a, side, BCFunction([sol](const BoundaryFace& f) { return FaceBC::dirichlet(sol.phi(f.center)); }));
            } else if (kind == "neumann") {
                const double sign = side == Side::plus ? -1.0 : 1.0;
                bc.set(a, side, BCFunction([sol, a, sign](const BoundaryFace& f) {
                           return FaceBC::neumann(sign * sol.e(f.center, a));
                       }));
            } else {
                bc.set(a, side, FaceBC::symmetry());
            }
        }
    }
    return bc;
}

GaussianRun run_gaussian_case(const RunConfig& cfg)
{
    cfg.validate();
    if (cfg.case_id == CaseId::sp3demo) {
        throw ConfigError("run_gaussian_case needs a gaussian case");
    }
    const int level = cfg.max_level;
    const Domain domain = case_domain(cfg, level);
    const GaussianSolution sol = gaussian_solution(cfg);
    GaussianRun run;
    auto t0 = Clock::now();
    const LevelField rho = sample_midpoints(domain, level, [&sol](const RVec& x) { return sol.rho(x); });
    std::vector<LevelField> driving;
    for (const std::string& name : cfg.gaussian.adapt_on) {
        if (name == "rho") {
            driving.push_back(rho);
        } else {
            driving.push_back(sample_midpoints(domain, level, [&sol](const RVec& x) { return sol.phi(x); }));
        }
    }
    run.grid = adapt_uniform(domain, driving, ThresholdSpec{cfg.eta});
    run.rho = leaf_averages(domain, run.grid.leaves, rho);
    run.row.adapt_seconds = seconds_since(t0);

    const BCSpec bc = gaussian_bc(cfg);
    t0 = Clock::now();
    run.system = assemble_adapted(run.grid.forest, run.grid.leaves, FluxScheme::centered(), OperatorSpec::laplace(), bc);
    run.row.assembly_seconds = seconds_since(t0);

    const std::vector<double> rhs = assemble_rhs(run.rho, run.system.rhs_bc);
    t0 = Clock::now();
    run.report = solve(run.system.matrix, rhs, run.phi, cfg.solver_config());
    run.row.solve_seconds = seconds_since(t0);
    if (!run.report.converged) {
        throw SolverError("solver did not converge at level " + std::to_string(level) + ": " + run.report.message);
    }
    run.e = gradient(run.grid.forest, run.grid.leaves, run.phi, bc);

    const std::size_t n = run.grid.leaves.size();
    std::vector<double> err(n);
    for (std::size_t i = 0; i < n; ++i) {
        err[i] = run.phi[i] - sol.phi(domain.cell_center(run.grid.leaves.cell(i)));
    }
    run.row.err_phi = norm_l2(run.grid.forest, run.grid.leaves, err);
    for (int a = 0; a < domain.dim(); ++a) {
        for (std::size_t i = 0; i < n; ++i) {
            err[i] = run.e[a][i] - sol.e(domain.cell_center(run.grid.leaves.cell(i)), a);
        }
        run.row.err_e[a] = norm_l2(run.grid.forest, run.grid.leaves, err);
    }
    run.row.level = level;
    run.row.eta = cfg.eta;
    run.row.dx = domain.cell_size(level, 0);
    run.row.leaves = n;
    run.row.phantoms = run.grid.forest.phantom_count();
    run.row.compression_pct = 100.0 * static_cast<double>(n) / static_cast<double>(domain.cells_at_level(level));
    run.row.stats = matrix_stats(run.system.matrix);
    run.row.iterations = run.report.iterations;
    run.row.residual = run.report.residual;
    run.row.converged = run.report.converged;
    return run;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) {
        throw Error("loglog_slope: need at least two points");
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceReport run_convergence_study(const RunConfig& cfg)
{
    ConvergenceReport rep;
    std::vector<double> etas = cfg.study.etas;
    std::vector<int> levels = cfg.study.levels;
    std::sort(levels.begin(), levels.end());
    for (double eta : etas) {
        for (int level : levels) {
            RunConfig c = cfg;
            c.eta = eta;
            c.max_level = level;
            rep.rows.push_back(run_gaussian_case(c).row);
        }
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const bool first = i == 0 || rep.rows[i - 1].eta != rep.rows[i].eta;
        if (first) {
            rep.order_phi.push_back(nan);
            rep.order_e.push_back({nan, nan, nan});
            continue;
        }
        const CaseRow& p = rep.rows[i - 1];
        const CaseRow& r = rep.rows[i];
        const double lr = std::log(p.dx / r.dx);
        rep.order_phi.push_back(std::log(p.err_phi / r.err_phi) / lr);
        std::array<double, kMaxDim> oe{nan, nan, nan};
        for (int a = 0; a < cfg.dim(); ++a) {
            oe[a] = std::log(p.err_e[a] / r.err_e[a]) / lr;
        }
        rep.order_e.push_back(oe);
    }
    std::vector<double> nl;
    std::vector<double> t;
    for (const CaseRow& r : rep.rows) {
        if (r.assembly_seconds > 0.0) {
            nl.push_back(static_cast<double>(r.leaves));
            t.push_back(r.assembly_seconds);
        }
    }
    rep.complexity_slope = nl.size() >= 2 ? loglog_slope(nl, t) : nan;
    return rep;
}

Sp3Report run_sp3_demo(const RunConfig& cfg)
{
    cfg.validate();
    const Domain domain = case_domain(cfg, cfg.max_level);
    const Sp3DemoConfig& sc = cfg.sp3;
    const auto source_fn = [&sc](const RVec& x) {
        const double dx = x[0] - sc.center[0];
        const double dy = x[1] - sc.center[1];
        return sc.amplitude * std::exp(-(dx * dx + dy * dy) / (sc.sigma * sc.sigma));
    };
    Sp3Report rep;
    const LevelField fine = sample_midpoints(domain, cfg.max_level, source_fn);
    rep.grid = adapt_uniform(domain, std::span<const LevelField>(&fine, 1), ThresholdSpec{cfg.eta});
    rep.source = rep.grid.fields.front();
    Sp3Options opt;
    opt.boundary = sc.boundary == "neumann" ? Sp3Boundary::neumann : Sp3Boundary::robin;
    opt.max_corrections = sc.max_corrections;
    opt.update_tol = sc.update_tol;
    opt.solver.method = cfg.solver == SolverMethod::cg ? SolverMethod::bicgstab : cfg.solver;
    opt.solver.rel_tol = cfg.tol ? *cfg.tol : 1e-10;
    opt.solver.abs_tol = 1e-300;
    opt.solver.max_iters = cfg.max_iters;
    opt.solver.threads = cfg.threads;
    const auto groups = three_group_parameters();
    const std::vector<double> unit(rep.source.size(), sc.amplitude);
    Sp3Options neumann = opt;
    neumann.boundary = Sp3Boundary::neumann;
    neumann.solver.rel_tol = std::min(opt.solver.rel_tol, 1e-11);
    for (std::size_t l = 0; l < groups.size(); ++l) {
        const GroupSolution gs =
            sp3_solve_group(rep.grid.forest, rep.grid.leaves, groups[l], sc.physics, rep.source, opt);
        rep.psi.push_back(photon_isotropic(gs.phi1, gs.phi2));
        Sp3GroupRow row;
        row.group = static_cast<int>(l) + 1;
        row.a = groups[l].a;
        row.lambda = groups[l].lambda;
        row.iterations = gs.iterations;
        row.updates = gs.updates;
        const GroupSolution cs = sp3_solve_group(rep.grid.forest, rep.grid.leaves, groups[l], sc.physics, unit, neumann);
        const double exact = sc.physics.quenching() * sc.amplitude / (groups[l].lambda * sc.physics.p_o2);
        for (std::size_t i = 0; i < unit.size(); ++i) {
            row.constant_error = std::max({row.constant_error, std::abs(cs.phi1[i] - exact) / exact,
                                           std::abs(cs.phi2[i] - exact) / exact});
        }
        rep.groups.push_back(row);
    }
    rep.s_ph = photo_source(rep.psi, groups, sc.physics);
    rep.negative_s_ph = static_cast<std::size_t>(
        std::count_if(rep.s_ph.begin(), rep.s_ph.end(), [](double v) { return v < 0.0; }));
    return rep;
}

CsvTable case_table(const std::vector<CaseRow>& rows, const std::vector<double>& order_phi,
                    const std::vector<std::array<double, kMaxDim>>& order_e)
{
    CsvTable t({"level", "eta", "dx", "leaves", "phantoms", "compression_pct", "err_phi", "err_ex", "err_ey",
                "order_phi", "order_ex", "order_ey", "nnz", "nnz_ratio", "symmetry_fraction", "iterations",
                "residual", "converged"});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const CaseRow& r = rows[i];
        const double nan = std::numeric_limits<double>::quiet_NaN();
        const double op = i < order_phi.size() ? order_phi[i] : nan;
        const std::array<double, kMaxDim> oe = i < order_e.size() ? order_e[i] : std::array<double, kMaxDim>{nan, nan, nan};
        t.add_row({csv_number(std::int64_t{r.level}), csv_number(r.eta), csv_number(r.dx),
                   csv_number(static_cast<std::int64_t>(r.leaves)), csv_number(static_cast<std::int64_t>(r.phantoms)),
                   csv_number(r.compression_pct), csv_number(r.err_phi), csv_number(r.err_e[0]),
                   csv_number(r.err_e[1]), nan_or(op), nan_or(oe[0]), nan_or(oe[1]),
                   csv_number(static_cast<std::int64_t>(r.stats.nnz)), csv_number(r.stats.ratio),
                   csv_number(r.stats.symmetry_fraction), csv_number(std::int64_t{r.iterations}),
                   csv_number(r.residual), r.converged ? "1" : "0"});
    }
    return t;
}

CsvTable timing_table(const std::vector<CaseRow>& rows)
{
    CsvTable t({"level", "eta", "leaves", "adapt_s", "assembly_s", "solve_s"});
    for (const CaseRow& r : rows) {
        t.add_row({csv_number(std::int64_t{r.level}), csv_number(r.eta),
                   csv_number(static_cast<std::int64_t>(r.leaves)), csv_number(r.adapt_seconds),
                   csv_number(r.assembly_seconds), csv_number(r.solve_seconds)});
    }
    return t;
}

CsvTable gaussian_field_table(const RunConfig& cfg, const GaussianRun& run)
{
    const Domain& domain = run.grid.forest.domain();
    const GaussianSolution sol = gaussian_solution(cfg);
    CsvTable t({"leaf", "level", "x", "y", "rho", "phi", "phi_exact", "ex", "ey", "ex_exact", "ey_exact"});
    for (std::size_t i = 0; i < run.grid.leaves.size(); ++i) {
        const CellId& c = run.grid.leaves.cell(i);
        const RVec x = domain.cell_center(c);
        t.add_row({csv_number(static_cast<std::int64_t>(i)), csv_number(std::int64_t{c.level}), csv_number(x[0]),
                   csv_number(x[1]), csv_number(run.rho[i]), csv_number(run.phi[i]), csv_number(sol.phi(x)),
                   csv_number(run.e[0][i]), csv_number(run.e[1][i]), csv_number(sol.e(x, 0)),
                   csv_number(domain.dim() > 1 ? sol.e(x, 1) : 0.0)});
    }
    return t;
}

CsvTable sp3_group_table(const Sp3Report& report)
{
    CsvTable t({"group", "A", "lambda", "iterations", "update_1", "update_2", "update_3", "final_update",
                "constant_error"});
    for (const Sp3GroupRow& g : report.groups) {
        std::vector<std::string> u(3);
        for (std::size_t k = 0; k < 3 && k < g.updates.size(); ++k) {
            u[k] = csv_number(g.updates[k]);
        }
        t.add_row({csv_number(std::int64_t{g.group}), csv_number(g.a), csv_number(g.lambda),
                   csv_number(std::int64_t{g.iterations}), u[0], u[1], u[2],
                   g.updates.empty() ? std::string() : csv_number(g.updates.back()), csv_number(g.constant_error)});
    }
    return t;
}

CsvTable sp3_field_table(const Sp3Report& report)
{
    CsvTable t({"leaf", "level", "x", "y", "source", "psi_1", "psi_2", "psi_3", "s_ph"});
    const Domain& domain = report.grid.forest.domain();
    for (std::size_t i = 0; i < report.grid.leaves.size(); ++i) {
        const CellId& c = report.grid.leaves.cell(i);
        const RVec x = domain.cell_center(c);
        t.add_row({csv_number(static_cast<std::int64_t>(i)), csv_number(std::int64_t{c.level}), csv_number(x[0]),
                   csv_number(x[1]), csv_number(report.source[i]), csv_number(report.psi[0][i]),
                   csv_number(report.psi[1][i]), csv_number(report.psi[2][i]), csv_number(report.s_ph[i])});
    }
    return t;
}

} // namespace mrpoisson
