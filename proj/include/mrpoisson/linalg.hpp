#pragma once

#include "mrpoisson/sparse_matrix.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mrpoisson {

enum class SolverMethod : std::uint8_t { cg, bicgstab, direct };
enum class Preconditioner : std::uint8_t { none, jacobi };

[[nodiscard]] SolverMethod parse_solver_method(const std::string& name);
[[nodiscard]] std::string to_string(SolverMethod m);

struct SolverConfig {
    SolverMethod method = SolverMethod::bicgstab;
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    int max_iters = 10000;
    Preconditioner preconditioner = Preconditioner::jacobi;
    int threads = 1;
    /// Size cap of the dense LU path.
    std::size_t direct_cap = 8192;

    /// Throws ConfigError on non-positive tolerances or iteration caps.
    void validate() const;
};

struct SolveReport {
    int iterations = 0;
    /// ||b - A x||_2 recomputed from x.
    double residual = 0.0;
    double rhs_norm = 0.0;
    bool converged = false;
    double seconds = 0.0;
    std::vector<double> history;
    std::string message;
};

/// Solves A x = b. `x` is the initial guess on entry (resized and zeroed
/// when empty). Converged means ||b - A x|| <= max(rel_tol ||b||, abs_tol)
/// for the recomputed residual. CG requires a symmetric matrix and throws
/// SolverError otherwise; breakdowns and iteration limits are reported.
SolveReport solve(const SparseMatrix& a, std::span<const double> b, std::vector<double>& x,
                  const SolverConfig& cfg);

/// Dense LU with partial pivoting. Throws SolverError for singular systems
/// or when the size exceeds `cap`.
[[nodiscard]] std::vector<double> dense_direct(const SparseMatrix& a, std::span<const double> b,
                                               std::size_t cap = 8192);

[[nodiscard]] double norm2(std::span<const double> v);
[[nodiscard]] double dot(std::span<const double> a, std::span<const double> b);
[[nodiscard]] double residual_norm(const SparseMatrix& a, std::span<const double> b, std::span<const double> x,
                                   int threads = 1);

} // namespace mrpoisson
