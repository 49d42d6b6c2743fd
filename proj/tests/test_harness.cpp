#include "mrpoisson/cases.hpp"
#include "mrpoisson/config.hpp"
#include "mrpoisson/csv.hpp"
#include "mrpoisson/error.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mrpoisson;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("mrpoisson_harness_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(MRPOISSON_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t count_lines(const std::string& text)
{
    std::size_t n = 0;
    for (char c : text) {
        n += c == '\n' ? 1 : 0;
    }
    return n;
}

} // namespace

TEST(Config, Defaults)
{
    const RunConfig cfg = parse_config("{}");
    EXPECT_EQ(cfg.case_id, CaseId::gaussian2d);
    EXPECT_EQ(cfg.max_level, 6);
    EXPECT_DOUBLE_EQ(cfg.eta, 1e-4);
    EXPECT_FALSE(cfg.tol.has_value());
    EXPECT_NEAR(cfg.solver_tol(), 1e-7, 1e-22);
    EXPECT_EQ(cfg.solver, SolverMethod::bicgstab);
    EXPECT_DOUBLE_EQ(cfg.gaussian.a, 10.0);
    EXPECT_DOUBLE_EQ(cfg.gaussian.b, 20.0);
    EXPECT_DOUBLE_EQ(cfg.gaussian.sigma, 0.05);
}

TEST(Config, ToleranceFloor)
{
    RunConfig cfg;
    cfg.eta = 1e-10;
    EXPECT_DOUBLE_EQ(cfg.solver_tol(), 1e-10);
    cfg.tol = 1e-5;
    EXPECT_DOUBLE_EQ(cfg.solver_tol(), 1e-5);
    EXPECT_DOUBLE_EQ(cfg.solver_config().rel_tol, 1e-5);
}

TEST(Config, OverridesAndNesting)
{
    const RunConfig cfg = parse_config(
        R"({"case": "gaussian1d", "max_level": 7, "eta": 1e-3, "solver": "direct",
            "gaussian": {"a": 2.0, "sigma": 0.1}, "study": {"levels": [3, 4]}})");
    EXPECT_EQ(cfg.case_id, CaseId::gaussian1d);
    EXPECT_EQ(cfg.dim(), 1);
    EXPECT_EQ(cfg.max_level, 7);
    EXPECT_EQ(cfg.solver, SolverMethod::direct);
    EXPECT_DOUBLE_EQ(cfg.gaussian.a, 2.0);
    EXPECT_DOUBLE_EQ(cfg.gaussian.b, 20.0);
    EXPECT_EQ(cfg.study.levels, (std::vector<int>{3, 4}));
}

TEST(Config, RejectsUnknownKeysAndBadTypes)
{
    EXPECT_THROW((void)parse_config(R"({"max_levle": 5})"), ConfigError);
    EXPECT_THROW((void)parse_config(R"({"gaussian": {"amplitude": 5}})"), ConfigError);
    EXPECT_THROW((void)parse_config(R"({"max_level": "six"})"), ConfigError);
    EXPECT_THROW((void)parse_config(R"({"eta": -1})"), ConfigError);
    EXPECT_THROW((void)parse_config(R"({"solver": "gmres"})"), ConfigError);
    EXPECT_THROW((void)parse_config("{not json"), ConfigError);
    EXPECT_THROW((void)load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, DumpRoundTrip)
{
    RunConfig cfg;
    cfg.case_id = CaseId::sp3demo;
    cfg.max_level = 5;
    cfg.tol = 1e-9;
    cfg.sp3.sigma = 0.03;
    cfg.study.etas = {1e-3};
    const std::string text = dump_config(cfg);
    EXPECT_EQ(dump_config(parse_config(text)), text);
}

TEST(GaussianSolution, SourceAtCentre)
{
    const GaussianSolution s{2, 10.0, 20.0, 0.005};
    const RVec origin{0.0, 0.0, 0.0};
    EXPECT_NEAR(s.rho(origin), -1.6e6, 1e-6);
    EXPECT_DOUBLE_EQ(s.phi(origin), 30.0);
    EXPECT_DOUBLE_EQ(s.e(origin, 0), 0.0);
}

TEST(GaussianSolution, SourceIsLaplacianOfPotential)
{
    for (int dim = 1; dim <= 2; ++dim) {
        const GaussianSolution s{dim, 10.0, 20.0, 0.05};
        const RVec x{0.031, dim == 2 ? -0.017 : 0.0, 0.0};
        const double h = 1e-4;
        double lap = 0.0;
        for (int a = 0; a < dim; ++a) {
            RVec xp = x;
            RVec xm = x;
            xp[a] += h;
            xm[a] -= h;
            lap += (s.phi(xp) - 2.0 * s.phi(x) + s.phi(xm)) / (h * h);
            EXPECT_NEAR(s.e(x, a), -(s.phi(xp) - s.phi(xm)) / (2.0 * h), 1e-5 * std::abs(s.e(x, a)));
        }
        EXPECT_NEAR(s.rho(x), lap, 1e-3 * std::abs(lap));
    }
}

TEST(GaussianCase, OffsetDoesNotChangeErrors)
{
    RunConfig cfg = parse_config(R"({"case": "gaussian1d", "max_level": 7, "solver": "direct"})");
    const GaussianRun with_offset = run_gaussian_case(cfg);
    cfg.gaussian.b = 0.0;
    const GaussianRun without = run_gaussian_case(cfg);
    EXPECT_EQ(with_offset.row.leaves, without.row.leaves);
    EXPECT_NEAR(with_offset.row.err_phi, without.row.err_phi, 1e-9);
    EXPECT_NEAR(with_offset.row.err_e[0], without.row.err_e[0], 1e-8);
}

TEST(GaussianCase, FieldTableHasOneRowPerLeaf)
{
    const RunConfig cfg = parse_config(R"({"max_level": 5, "eta": 1e-3})");
    const GaussianRun run = run_gaussian_case(cfg);
    EXPECT_TRUE(run.row.converged);
    EXPECT_EQ(gaussian_field_table(cfg, run).rows(), run.grid.leaves.size());
    EXPECT_EQ(run.phi.size(), run.grid.leaves.size());
    EXPECT_GT(run.row.compression_pct, 0.0);
    EXPECT_LT(run.row.compression_pct, 100.0);
}

TEST(GaussianCase, OneDimensionalStudyConverges)
{
    RunConfig cfg = parse_config(R"({"case": "gaussian1d", "study": {"levels": [4, 5, 6, 7, 8], "etas": [1e-10]}})");
    const ConvergenceReport rep = run_convergence_study(cfg);
    ASSERT_EQ(rep.rows.size(), 5u);
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        EXPECT_LT(rep.rows[i].err_phi, rep.rows[i - 1].err_phi);
        EXPECT_GT(rep.order_phi[i], 1.5);
    }
    EXPECT_TRUE(std::isnan(rep.order_phi[0]));
    EXPECT_EQ(case_table(rep.rows, rep.order_phi, rep.order_e).rows(), 5u);
}

TEST(Slope, LogLogFit)
{
    const std::vector<double> x{1.0, 10.0, 100.0, 1000.0};
    std::vector<double> y;
    for (double v : x) {
        y.push_back(3.0 * std::pow(v, 1.5));
    }
    EXPECT_NEAR(loglog_slope(x, y), 1.5, 1e-12);
    EXPECT_NEAR(loglog_slope({1.0, 2.0}, {5.0, 5.0}), 0.0, 1e-15);
}

TEST(Csv, NumberFormatting)
{
    EXPECT_EQ(csv_number(0.1), "0.10000000000000001");
    EXPECT_EQ(csv_number(2.0), "2");
    EXPECT_EQ(csv_number(-1.5e-300), "-1.5000000000000001e-300");
    EXPECT_EQ(csv_number(std::int64_t{42}), "42");
    EXPECT_DOUBLE_EQ(std::stod(csv_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Csv, Escaping)
{
    EXPECT_EQ(csv_escape("plain"), "plain");
    EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(csv_escape("two\nlines"), "\"two\nlines\"");
}

TEST(Csv, HeaderOnlyAndRowWidth)
{
    CsvTable t({"x", "y"});
    std::ostringstream out;
    t.write(out);
    EXPECT_EQ(out.str(), "x,y\r\n");
    EXPECT_THROW(t.add_row({"1"}), Error);
    t.add_row({"1", "a,b"});
    std::ostringstream out2;
    t.write(out2);
    EXPECT_EQ(out2.str(), "x,y\r\n1,\"a,b\"\r\n");
}

TEST(Csv, SaveFailureIsIoError)
{
    const CsvTable t({"x"});
    EXPECT_THROW(t.save("/nonexistent/dir/out.csv"), IoError);
}

TEST(Csv, DeterministicTables)
{
    const RunConfig cfg = parse_config(R"({"max_level": 5, "eta": 1e-3})");
    std::ostringstream a;
    std::ostringstream b;
    case_table({run_gaussian_case(cfg).row}).write(a);
    case_table({run_gaussian_case(cfg).row}).write(b);
    EXPECT_EQ(a.str(), b.str());
}

TEST(Cli, RunWritesOutputs)
{
    const fs::path dir = scratch_dir("run");
    ASSERT_EQ(run_cli("run --max-level 4 --eta 1e-3 --out " + dir.string()), 0);
    EXPECT_TRUE(fs::exists(dir / "run.csv"));
    EXPECT_TRUE(fs::exists(dir / "run_timing.csv"));
    const std::string fields = read_file(dir / "fields.csv");
    const std::string run = read_file(dir / "run.csv");
    EXPECT_EQ(count_lines(run), 2u);
    EXPECT_GT(count_lines(fields), 1u);
}

TEST(Cli, ExportMatrix)
{
    const fs::path dir = scratch_dir("export");
    ASSERT_EQ(run_cli("export-matrix --max-level 4 --eta 1e-3 --out " + dir.string()), 0);
    const std::string mtx = read_file(dir / "matrix.mtx");
    EXPECT_EQ(mtx.rfind("%%MatrixMarket matrix coordinate real general\n", 0), 0u);
    std::istringstream in(mtx);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t nnz = 0;
    in >> n >> m >> nnz;
    EXPECT_EQ(n, m);
    EXPECT_EQ(count_lines(mtx), nnz + 3u);
    EXPECT_EQ(count_lines(read_file(dir / "matrix_rows.csv")), n + 1u);
}

TEST(Cli, ExitCodes)
{
    const fs::path dir = scratch_dir("codes");
    EXPECT_EQ(run_cli("run --bogus-flag"), 2);
    EXPECT_EQ(run_cli("run --solver gmres --out " + dir.string()), 2);
    EXPECT_EQ(run_cli("run --config /nonexistent.json"), 2);

    const fs::path cfg = dir / "tight.json";
    std::ofstream(cfg) << R"({"max_level": 5, "max_iters": 1, "tol": 1e-14})";
    EXPECT_EQ(run_cli("run --config " + cfg.string() + " --out " + dir.string()), 3);

    const fs::path blocker = dir / "blocker";
    std::ofstream(blocker) << "x";
    EXPECT_EQ(run_cli("run --max-level 3 --out " + (blocker / "sub").string()), 4);
}
