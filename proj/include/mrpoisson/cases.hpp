#pragma once

#include "mrpoisson/assembly.hpp"
#include "mrpoisson/config.hpp"
#include "mrpoisson/csv.hpp"
#include "mrpoisson/linalg.hpp"
#include "mrpoisson/mra.hpp"

#include <array>
#include <vector>

namespace mrpoisson {

/// phi = g + b with g = a exp(-|x|^2 / sigma^2); rho = lap(phi); E = -grad(phi).
struct GaussianSolution {
    int dim = 2;
    double a = 10.0;
    double b = 20.0;
    double sigma = 0.05;

    [[nodiscard]] double g(const RVec& x) const;
    [[nodiscard]] double phi(const RVec& x) const { return g(x) + b; }
    [[nodiscard]] double rho(const RVec& x) const;
    [[nodiscard]] double e(const RVec& x, int axis) const;
};

[[nodiscard]] GaussianSolution gaussian_solution(const RunConfig& cfg);
[[nodiscard]] Domain case_domain(const RunConfig& cfg, int max_level);
[[nodiscard]] BCSpec gaussian_bc(const RunConfig& cfg);

struct CaseRow {
    int level = 0;
    double eta = 0.0;
    double dx = 0.0;
    std::size_t leaves = 0;
    std::size_t phantoms = 0;
    double compression_pct = 0.0;
    double err_phi = 0.0;
    std::array<double, kMaxDim> err_e{0.0, 0.0, 0.0};
    MatrixStats stats;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
    double adapt_seconds = 0.0;
    double assembly_seconds = 0.0;
    double solve_seconds = 0.0;
};

struct GaussianRun {
    CaseRow row;
    AdaptResult grid;
    Assembly system;
    std::vector<double> rho;
    std::vector<double> phi;
    std::array<std::vector<double>, kMaxDim> e;
    SolveReport report;
};

/// Adapts on the configured fields at cfg.max_level / cfg.eta, assembles on
/// the adapted grid, solves and measures normalised L2 errors against the
/// exact solution at leaf centres. Throws SolverError when the solve fails.
[[nodiscard]] GaussianRun run_gaussian_case(const RunConfig& cfg);

struct ConvergenceReport {
    std::vector<CaseRow> rows;
    /// Observed orders between consecutive rows of the same eta; NaN for
    /// the first row of each group.
    std::vector<double> order_phi;
    std::vector<std::array<double, kMaxDim>> order_e;
    /// Log-log slope of assembly time against leaf count.
    double complexity_slope = 0.0;
};

[[nodiscard]] ConvergenceReport run_convergence_study(const RunConfig& cfg);

/// Least-squares slope of log(y) against log(x).
[[nodiscard]] double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct Sp3GroupRow {
    int group = 0;
    double a = 0.0;
    double lambda = 0.0;
    int iterations = 0;
    std::vector<double> updates;
    /// max |phi_n - q S / (lambda p_O2)| for a constant source with
    /// Neumann boundaries, relative to the exact constant.
    double constant_error = 0.0;
};

struct Sp3Report {
    AdaptResult grid;
    std::vector<double> source;
    std::vector<std::vector<double>> psi;
    std::vector<double> s_ph;
    std::vector<Sp3GroupRow> groups;
    std::size_t negative_s_ph = 0;
};

[[nodiscard]] Sp3Report run_sp3_demo(const RunConfig& cfg);

[[nodiscard]] CsvTable case_table(const std::vector<CaseRow>& rows, const std::vector<double>& order_phi = {},
                                  const std::vector<std::array<double, kMaxDim>>& order_e = {});
[[nodiscard]] CsvTable timing_table(const std::vector<CaseRow>& rows);
[[nodiscard]] CsvTable gaussian_field_table(const RunConfig& cfg, const GaussianRun& run);
[[nodiscard]] CsvTable sp3_group_table(const Sp3Report& report);
[[nodiscard]] CsvTable sp3_field_table(const Sp3Report& report);

} // namespace mrpoisson
