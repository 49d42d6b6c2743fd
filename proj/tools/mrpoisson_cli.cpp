#include "mrpoisson/cases.hpp"
#include "mrpoisson/config.hpp"
#include "mrpoisson/error.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

namespace {

using namespace mrpoisson;

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

struct Overrides {
    std::string config;
    std::optional<int> max_level;
    std::optional<double> eta;
    std::optional<double> tol;
    std::optional<std::string> solver;
    std::optional<std::string> out;
    std::optional<int> threads;
    std::optional<std::string> case_name;
};

void add_common(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("--config", o.config, "JSON configuration file");
    cmd->add_option("--case", o.case_name, "gaussian1d | gaussian2d | sp3demo");
    cmd->add_option("--max-level", o.max_level, "maximum refinement level J");
    cmd->add_option("--eta", o.eta, "multiresolution threshold");
    cmd->add_option("--tol", o.tol, "solver relative and absolute tolerance");
    cmd->add_option("--solver", o.solver, "cg | bicgstab | direct");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--threads", o.threads, "worker threads for sparse kernels");
}

RunConfig resolve(const Overrides& o)
{
    RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
    if (o.case_name) {
        cfg.case_id = parse_case(*o.case_name);
    }
    if (o.max_level) {
        cfg.max_level = *o.max_level;
    }
    if (o.eta) {
        cfg.eta = *o.eta;
    }
    if (o.tol) {
        cfg.tol = *o.tol;
    }
    if (o.solver) {
        cfg.solver = parse_solver_method(*o.solver);
    }
    if (o.out) {
        cfg.out_dir = *o.out;
    }
    if (o.threads) {
        cfg.threads = *o.threads;
    }
    cfg.validate();
    return cfg;
}

std::string prepare(const RunConfig& cfg, const std::string& name)
{
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + cfg.out_dir + ": " + ec.message());
    }
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

void print_row(const CaseRow& r)
{
    std::printf("J=%d eta=%g leaves=%zu compression=%.2f%% err_phi=%.6e err_ex=%.6e err_ey=%.6e iters=%d\n", r.level,
                r.eta, r.leaves, r.compression_pct, r.err_phi, r.err_e[0], r.err_e[1], r.iterations);
}

void cmd_sp3(const RunConfig& cfg)
{
    const Sp3Report rep = run_sp3_demo(cfg);
    sp3_group_table(rep).save(prepare(cfg, "sp3_groups.csv"));
    sp3_field_table(rep).save(prepare(cfg, "sp3_fields.csv"));
    for (const Sp3GroupRow& g : rep.groups) {
        std::printf("group %d: corrections=%d final_update=%.3e constant_error=%.3e\n", g.group, g.iterations,
                    g.updates.empty() ? 0.0 : g.updates.back(), g.constant_error);
    }
    std::printf("leaves=%zu negative S_ph cells=%zu\n", rep.grid.leaves.size(), rep.negative_s_ph);
}

void cmd_run(const RunConfig& cfg)
{
    if (cfg.case_id == CaseId::sp3demo) {
        cmd_sp3(cfg);
        return;
    }
    const GaussianRun run = run_gaussian_case(cfg);
    case_table({run.row}).save(prepare(cfg, "run.csv"));
    timing_table({run.row}).save(prepare(cfg, "run_timing.csv"));
    gaussian_field_table(cfg, run).save(prepare(cfg, "fields.csv"));
    print_row(run.row);
}

void cmd_study(const RunConfig& cfg)
{
    const ConvergenceReport rep = run_convergence_study(cfg);
    case_table(rep.rows, rep.order_phi, rep.order_e).save(prepare(cfg, "study.csv"));
    timing_table(rep.rows).save(prepare(cfg, "study_timing.csv"));
    for (const CaseRow& r : rep.rows) {
        print_row(r);
    }
    std::printf("assembly time vs leaves slope: %.3f\n", rep.complexity_slope);
}

void cmd_export(const RunConfig& cfg)
{
    if (cfg.case_id == CaseId::sp3demo) {
        throw ConfigError("export-matrix needs a gaussian case");
    }
    const GaussianRun run = run_gaussian_case(cfg);
    write_matrix_market(run.system.matrix, prepare(cfg, "matrix.mtx"));
    CsvTable leaves({"row", "level", "i", "j", "k", "rhs_bc"});
    for (std::size_t i = 0; i < run.grid.leaves.size(); ++i) {
        const CellId& c = run.grid.leaves.cell(i);
        leaves.add_row({csv_number(static_cast<std::int64_t>(i + 1)), csv_number(std::int64_t{c.level}),
                        csv_number(std::int64_t{c.index[0]}), csv_number(std::int64_t{c.index[1]}),
                        csv_number(std::int64_t{c.index[2]}), csv_number(run.system.rhs_bc[i])});
    }
    leaves.save(prepare(cfg, "matrix_rows.csv"));
    const MatrixStats s = run.row.stats;
    std::printf("n=%zu nnz=%zu ratio=%.3f symmetry=%.4f\n", s.n, s.nnz, s.ratio, s.symmetry_fraction);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Adaptive multiresolution finite-volume Poisson toolkit"};
    app.require_subcommand(1);
    Overrides o;
    CLI::App* run = app.add_subcommand("run", "single Gaussian (or SP3) case");
    CLI::App* study = app.add_subcommand("study", "convergence and complexity sweep");
    CLI::App* sp3 = app.add_subcommand("sp3", "three-group SP3 photoionization demo");
    CLI::App* exp = app.add_subcommand("export-matrix", "write the adapted operator in Matrix Market format");
    for (CLI::App* c : {run, study, sp3, exp}) {
        add_common(c, o);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }
    try {
        RunConfig cfg = resolve(o);
        if (sp3->parsed()) {
            cfg.case_id = CaseId::sp3demo;
            cfg.validate();
            cmd_sp3(cfg);
        } else if (run->parsed()) {
            cmd_run(cfg);
        } else if (study->parsed()) {
            cmd_study(cfg);
        } else {
            cmd_export(cfg);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kExitSolver;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
