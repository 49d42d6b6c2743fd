#pragma once

#include "mrpoisson/geometry.hpp"
#include "mrpoisson/linalg.hpp"
#include "mrpoisson/sp3.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mrpoisson {

enum class CaseId : std::uint8_t { gaussian1d, gaussian2d, sp3demo };

[[nodiscard]] CaseId parse_case(const std::string& name);
[[nodiscard]] std::string to_string(CaseId id);

/// phi = a exp(-|x|^2 / sigma^2) + b on a box.
struct GaussianConfig {
    double a = 10.0;
    double b = 20.0;
    double sigma = 0.05;
    /// Empty: the case default box.
    std::vector<double> lo;
    std::vector<double> hi;
    /// Per side, order x-, x+, y-, y+, z-, z+: "dirichlet", "neumann" or
    /// "symmetry". Dirichlet and Neumann data come from the exact solution.
    std::vector<std::string> bc;
    /// Fields that drive the adaptation: "rho" and/or "phi".
    std::vector<std::string> adapt_on{"rho"};
};

struct StudyConfig {
    std::vector<int> levels{4, 5, 6, 7, 8};
    std::vector<double> etas{1e-10, 1e-4};
};

/// Gaussian source S = amplitude exp(-|x - center|^2 / sigma^2) in cm^-3 s^-1.
struct Sp3DemoConfig {
    std::vector<double> lo{-0.1, -0.1};
    std::vector<double> hi{0.1, 0.1};
    double amplitude = 1.0;
    double sigma = 0.02;
    std::vector<double> center{0.0, 0.0};
    std::string boundary = "robin";
    int max_corrections = 3;
    double update_tol = 1e-6;
    PhysicalParams physics;
};

struct RunConfig {
    CaseId case_id = CaseId::gaussian2d;
    int max_level = 6;
    /// Empty: the case default root grid.
    std::vector<int> roots;
    double eta = 1e-4;
    /// Solver rel/abs tolerance; unset means max(1e-3 * eta, 1e-10).
    std::optional<double> tol;
    SolverMethod solver = SolverMethod::bicgstab;
    Preconditioner preconditioner = Preconditioner::jacobi;
    int max_iters = 50000;
    int threads = 1;
    std::string out_dir = "out";
    GaussianConfig gaussian;
    StudyConfig study;
    Sp3DemoConfig sp3;

    [[nodiscard]] int dim() const { return case_id == CaseId::gaussian1d ? 1 : 2; }
    [[nodiscard]] double solver_tol() const;
    [[nodiscard]] SolverConfig solver_config() const;
    /// Throws ConfigError on inconsistent values.
    void validate() const;
};

/// Parses a JSON document. Unknown keys and wrongly typed values raise
/// ConfigError; missing keys keep their defaults.
[[nodiscard]] RunConfig parse_config(const std::string& text);
[[nodiscard]] RunConfig load_config(const std::string& path);
[[nodiscard]] std::string dump_config(const RunConfig& cfg);

} // namespace mrpoisson
