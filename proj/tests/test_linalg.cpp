#include "mrpoisson/assembly.hpp"
#include "mrpoisson/error.hpp"
#include "mrpoisson/linalg.hpp"
#include "mrpoisson/sparse_matrix.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

using namespace mrpoisson;

namespace {

SparseMatrix from_dense(const std::vector<std::vector<double>>& m)
{
    SparseMatrix a(m.size());
    for (std::size_t r = 0; r < m.size(); ++r) {
        for (std::size_t c = 0; c < m.size(); ++c) {
            if (m[r][c] != 0.0) {
                a.add(static_cast<int>(r), static_cast<int>(c), m[r][c]);
            }
        }
    }
    a.finalize();
    return a;
}

// Dirichlet Laplacian on an n x n grid of the unit square, negated so that
// it is positive definite.
SparseMatrix spd_laplacian(int n)
{
    const Domain d(2, {n, n, 1}, 0);
    const Assembly a = assemble_uniform(d, 0, OperatorSpec::laplace(), BCSpec::all(FaceBC::dirichlet(0.0)));
    SparseMatrix neg(a.matrix.size());
    const auto offsets = a.matrix.row_offsets();
    for (std::size_t r = 0; r < a.matrix.size(); ++r) {
        for (std::size_t p = offsets[r]; p < offsets[r + 1]; ++p) {
            neg.add(static_cast<int>(r), a.matrix.columns()[p], -a.matrix.values()[p]);
        }
    }
    neg.finalize();
    return neg;
}

SparseMatrix convection_diffusion(int n)
{
    SparseMatrix a(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        a.add(i, i, 4.0);
        if (i > 0) {
            a.add(i, i - 1, -1.5);
        }
        if (i + 1 < n) {
            a.add(i, i + 1, -0.5);
        }
    }
    a.finalize();
    return a;
}

std::vector<double> random_vector(std::size_t n, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) {
        x = u(rng);
    }
    return v;
}

SolverConfig config(SolverMethod m, double rel = 1e-12)
{
    SolverConfig c;
    c.method = m;
    c.rel_tol = rel;
    c.abs_tol = 1e-300;
    return c;
}

} // namespace

TEST(SparseMatrix, MergesDuplicatesAndDropsCancelledEntries)
{
    SparseMatrix a(3);
    a.add(0, 1, 2.0);
    a.add(0, 1, 3.0);
    a.add(1, 2, 1.0);
    a.add(1, 2, -1.0);
    a.finalize();
    EXPECT_DOUBLE_EQ(a.at(0, 1), 5.0);
    EXPECT_DOUBLE_EQ(a.at(1, 2), 0.0);
    EXPECT_EQ(a.triplets_added(), 4u);
    EXPECT_EQ(a.nnz(), 1u);
    EXPECT_DOUBLE_EQ(a.diagonal(2), 0.0);

    SparseMatrix b(2);
    b.add(0, 0, 1.0);
    b.add(0, 0, -1.0);
    b.finalize();
    EXPECT_EQ(b.nnz(), 1u);
}

TEST(SparseMatrix, MatrixVectorProduct)
{
    const SparseMatrix a = from_dense({{2.0, -1.0, 0.0}, {-1.0, 2.0, -1.0}, {0.0, -1.0, 2.0}});
    EXPECT_EQ(spmv(a, std::vector<double>{1.0, 1.0, 1.0}), (std::vector<double>{1.0, 0.0, 1.0}));
    EXPECT_EQ(spmv(a, std::vector<double>{1.0, 2.0, 3.0}), (std::vector<double>{0.0, 0.0, 4.0}));
}

TEST(SparseMatrix, ThreadedProductMatchesSerial)
{
    const SparseMatrix a = spd_laplacian(90);
    const std::vector<double> x = random_vector(a.size(), 4);
    const std::vector<double> serial = spmv(a, x, 1);
    for (int threads : {2, 3, 4}) {
        EXPECT_EQ(spmv(a, x, threads), serial);
    }
}

TEST(SparseMatrix, MatrixMarketOutput)
{
    const SparseMatrix a = from_dense({{2.0, 0.5}, {0.0, 1.0}});
    std::ostringstream out;
    write_matrix_market(a, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "%%MatrixMarket matrix coordinate real general");
    std::getline(in, line);
    EXPECT_EQ(line.rfind("% n=2 nnz=3", 0), 0u);
    std::getline(in, line);
    EXPECT_EQ(line, "2 2 3");
    std::getline(in, line);
    EXPECT_EQ(line, "1 1 2");
    std::getline(in, line);
    EXPECT_EQ(line, "1 2 0.5");
    std::getline(in, line);
    EXPECT_EQ(line, "2 2 1");
}

TEST(SparseMatrix, Statistics)
{
    const SparseMatrix a = from_dense({{2.0, 1.0, 0.0}, {1.0, 2.0, 3.0}, {0.0, 0.0, 2.0}});
    const MatrixStats s = matrix_stats(a);
    EXPECT_EQ(s.n, 3u);
    EXPECT_EQ(s.nnz, 6u);
    EXPECT_DOUBLE_EQ(s.ratio, 2.0);
    EXPECT_NEAR(s.symmetry_fraction, 5.0 / 6.0, 1e-15);
    EXPECT_FALSE(is_symmetric(a));
}

TEST(Solve, TwoByTwo)
{
    const SparseMatrix a = from_dense({{4.0, 1.0}, {1.0, 3.0}});
    const std::vector<double> b{1.0, 2.0};
    for (SolverMethod m : {SolverMethod::cg, SolverMethod::bicgstab, SolverMethod::direct}) {
        std::vector<double> x;
        const SolveReport r = solve(a, b, x, config(m));
        EXPECT_TRUE(r.converged) << to_string(m);
        EXPECT_NEAR(x[0], 1.0 / 11.0, 1e-12);
        EXPECT_NEAR(x[1], 7.0 / 11.0, 1e-12);
    }
}

TEST(Solve, IterativeMatchesDirect)
{
    const SparseMatrix a = convection_diffusion(300);
    const std::vector<double> b = random_vector(300, 1);
    std::vector<double> xd;
    std::vector<double> xi;
    ASSERT_TRUE(solve(a, b, xd, config(SolverMethod::direct)).converged);
    const SolveReport r = solve(a, b, xi, config(SolverMethod::bicgstab));
    ASSERT_TRUE(r.converged);
    for (std::size_t i = 0; i < xd.size(); ++i) {
        EXPECT_NEAR(xi[i], xd[i], 1e-10);
    }
}

TEST(Solve, WarmStartNeedsNoIterations)
{
    const SparseMatrix a = spd_laplacian(8);
    const std::vector<double> b = random_vector(a.size(), 2);
    std::vector<double> x;
    ASSERT_TRUE(solve(a, b, x, config(SolverMethod::direct)).converged);
    for (SolverMethod m : {SolverMethod::cg, SolverMethod::bicgstab}) {
        std::vector<double> warm = x;
        const SolveReport r = solve(a, b, warm, config(m, 1e-8));
        EXPECT_TRUE(r.converged);
        EXPECT_EQ(r.iterations, 0);
    }
}

TEST(Solve, ManufacturedQuadratic)
{
    // u = x(1 - x) on (0, 1) with u'' = -2 and u = 0 at both ends.
    const Domain d(1, {64, 1, 1}, 0);
    const Assembly a = assemble_uniform(d, 0, OperatorSpec::laplace(), BCSpec::all(FaceBC::dirichlet(0.0)));
    const double h = 1.0 / 64.0;
    std::vector<double> exact(64);
    std::vector<double> rhs(64, -2.0);
    for (int i = 0; i < 64; ++i) {
        const double x0 = i * h;
        const double x1 = x0 + h;
        // Cell average of x - x^2.
        exact[static_cast<std::size_t>(i)] = 0.5 * (x0 + x1) - (x1 * x1 * x1 - x0 * x0 * x0) / (3.0 * h);
    }
    // The ghost-cell Dirichlet closure is second order.
    std::vector<double> x;
    const SolveReport r = solve(a.matrix, assemble_rhs(rhs, a.rhs_bc), x, config(SolverMethod::cg));
    ASSERT_TRUE(r.converged);
    double err = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        err = std::max(err, std::abs(x[i] - exact[i]));
    }
    EXPECT_LT(err, h * h);
}

TEST(Solve, PermutationInvariance)
{
    const SparseMatrix a = convection_diffusion(50);
    const std::vector<double> b = random_vector(50, 3);
    std::vector<int> perm(50);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), std::mt19937(11));
    SparseMatrix p(50);
    std::vector<double> pb(50);
    const auto offsets = a.row_offsets();
    for (std::size_t r = 0; r < 50; ++r) {
        pb[static_cast<std::size_t>(perm[r])] = b[r];
        for (std::size_t k = offsets[r]; k < offsets[r + 1]; ++k) {
            p.add(perm[r], perm[static_cast<std::size_t>(a.columns()[k])], a.values()[k]);
        }
    }
    p.finalize();
    std::vector<double> x;
    std::vector<double> px;
    ASSERT_TRUE(solve(a, b, x, config(SolverMethod::bicgstab)).converged);
    ASSERT_TRUE(solve(p, pb, px, config(SolverMethod::bicgstab)).converged);
    for (std::size_t r = 0; r < 50; ++r) {
        EXPECT_NEAR(px[static_cast<std::size_t>(perm[r])], x[r], 1e-10);
    }
}

TEST(Solve, SingularMatrixIsReported)
{
    const SparseMatrix a = from_dense({{1.0, 1.0}, {1.0, 1.0}});
    std::vector<double> x;
    EXPECT_THROW((void)solve(a, std::vector<double>{1.0, 2.0}, x, config(SolverMethod::direct)), SolverError);
    EXPECT_THROW((void)dense_direct(a, std::vector<double>{1.0, 2.0}), SolverError);
}

TEST(Solve, ConjugateGradientRejectsNonSymmetric)
{
    const SparseMatrix a = convection_diffusion(10);
    std::vector<double> x;
    EXPECT_THROW((void)solve(a, std::vector<double>(10, 1.0), x, config(SolverMethod::cg)), SolverError);
}

TEST(Solve, ConjugateGradientIterationBound)
{
    const SparseMatrix a = spd_laplacian(12);
    const std::vector<double> b = random_vector(a.size(), 5);
    std::vector<double> x;
    SolverConfig cfg = config(SolverMethod::cg, 1e-10);
    cfg.preconditioner = Preconditioner::none;
    const SolveReport r = solve(a, b, x, cfg);
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.iterations, static_cast<int>(2 * a.size()));
}

TEST(Solve, StoppingRule)
{
    const SparseMatrix a = spd_laplacian(16);
    const std::vector<double> b = random_vector(a.size(), 6);
    for (SolverMethod m : {SolverMethod::cg, SolverMethod::bicgstab}) {
        for (double tol : {1e-4, 1e-8}) {
            std::vector<double> x;
            const SolveReport r = solve(a, b, x, config(m, tol));
            EXPECT_TRUE(r.converged);
            EXPECT_NEAR(r.rhs_norm, norm2(b), 1e-12);
            EXPECT_NEAR(r.residual, residual_norm(a, b, x), 1e-12 * r.rhs_norm);
            EXPECT_LE(r.residual, tol * norm2(b));
        }
    }
}

TEST(Solve, ToleranceScalesWithRightHandSide)
{
    const SparseMatrix a = spd_laplacian(10);
    const std::vector<double> b = random_vector(a.size(), 7);
    std::vector<double> scaled = b;
    for (double& v : scaled) {
        v *= 1e6;
    }
    std::vector<double> x1;
    std::vector<double> x2;
    const SolveReport r1 = solve(a, b, x1, config(SolverMethod::cg, 1e-9));
    const SolveReport r2 = solve(a, scaled, x2, config(SolverMethod::cg, 1e-9));
    EXPECT_EQ(r1.iterations, r2.iterations);
}

TEST(Solve, IterationLimitIsReported)
{
    const SparseMatrix a = spd_laplacian(20);
    const std::vector<double> b = random_vector(a.size(), 8);
    std::vector<double> x;
    SolverConfig cfg = config(SolverMethod::cg, 1e-12);
    cfg.max_iters = 3;
    const SolveReport r = solve(a, b, x, cfg);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.iterations, 3);
}

TEST(SolverConfig, Validation)
{
    SolverConfig c;
    EXPECT_NO_THROW(c.validate());
    c.rel_tol = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    EXPECT_EQ(parse_solver_method("cg"), SolverMethod::cg);
    EXPECT_EQ(parse_solver_method("direct"), SolverMethod::direct);
    EXPECT_THROW((void)parse_solver_method("gmres"), ConfigError);
}
