#include "mrpoisson/linalg.hpp"

#include "mrpoisson/error.hpp"

#include <chrono>
#include <cmath>

namespace mrpoisson {

SolverMethod parse_solver_method(const std::string& name)
{
    if (name == "cg") {
        return SolverMethod::cg;
    }
    if (name == "bicgstab") {
        return SolverMethod::bicgstab;
    }
    if (name == "direct") {
        return SolverMethod::direct;
    }
    throw ConfigError("unknown solver '" + name + "' (expected cg, bicgstab or direct)");
}

std::string to_string(SolverMethod m)
{
    switch (m) {
    case SolverMethod::cg:
        return "cg";
    case SolverMethod::bicgstab:
        return "bicgstab";
    case SolverMethod::direct:
        return "direct";
    }
    return "?";
}

void SolverConfig::validate() const
{
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
        throw ConfigError("solver tolerances must be positive");
    }
    if (max_iters < 1) {
        throw ConfigError("max_iters must be at least 1");
    }
    if (threads < 1) {
        throw ConfigError("threads must be at least 1");
    }
}

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double norm2(std::span<const double> v)
{
    return std::sqrt(dot(v, v));
}

double residual_norm(const SparseMatrix& a, std::span<const double> b, std::span<const double> x, int threads)
{
    std::vector<double> r = spmv(a, x, threads);
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = b[i] - r[i];
    }
    return norm2(r);
}

namespace {

using Clock = std::chrono::steady_clock;

std::vector<double> inverse_diagonal(const SparseMatrix& a, Preconditioner p)
{
    std::vector<double> inv(a.size(), 1.0);
    if (p == Preconditioner::jacobi) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = a.diagonal(static_cast<int>(i));
            inv[i] = d != 0.0 ? 1.0 / d : 1.0;
        }
    }
    return inv;
}

void true_residual(const SparseMatrix& a, std::span<const double> b, std::span<const double> x,
                   std::vector<double>& r, int threads)
{
    a.multiply(x, r, threads);
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = b[i] - r[i];
    }
}

void run_cg(const SparseMatrix& a, std::span<const double> b, std::vector<double>& x, const SolverConfig& cfg,
            double target, SolveReport& rep)
{
    const std::size_t n = a.size();
    const std::vector<double> minv = inverse_diagonal(a, cfg.preconditioner);
    std::vector<double> r(n), z(n), p(n), q(n);
    true_residual(a, b, x, r, cfg.threads);
    double rn = norm2(r);
    rep.history.push_back(rn);
    if (rn <= target) {
        rep.converged = true;
        return;
    }
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = minv[i] * r[i];
    }
    p = z;
    double rz = dot(r, z);
    while (rep.iterations < cfg.max_iters) {
        a.multiply(p, q, cfg.threads);
        const double pq = dot(p, q);
        if (pq == 0.0 || !std::isfinite(pq)) {
            rep.message = "cg breakdown";
            return;
        }
        const double alpha = rz / pq;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        ++rep.iterations;
        rn = norm2(r);
        rep.history.push_back(rn);
        if (rn <= target) {
            true_residual(a, b, x, r, cfg.threads);
            rn = norm2(r);
            if (rn <= target) {
                rep.converged = true;
                return;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = minv[i] * r[i];
        }
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = z[i] + beta * p[i];
        }
    }
    rep.message = "iteration limit reached";
}

void run_bicgstab(const SparseMatrix& a, std::span<const double> b, std::vector<double>& x,
                  const SolverConfig& cfg, double target, SolveReport& rep)
{
    const std::size_t n = a.size();
    const std::vector<double> minv = inverse_diagonal(a, cfg.preconditioner);
    std::vector<double> r(n), rhat(n), p(n), v(n), phat(n), s(n), shat(n), t(n);
    true_residual(a, b, x, r, cfg.threads);
    double rn = norm2(r);
    rep.history.push_back(rn);
    if (rn <= target) {
        rep.converged = true;
        return;
    }
    constexpr int kMaxRestarts = 20;
    for (int restart = 0; restart <= kMaxRestarts && rep.iterations < cfg.max_iters; ++restart) {
        rhat = r;
        std::fill(p.begin(), p.end(), 0.0);
        std::fill(v.begin(), v.end(), 0.0);
        double rho = 1.0;
        double alpha = 1.0;
        double omega = 1.0;
        bool restart_needed = false;
        while (rep.iterations < cfg.max_iters && !restart_needed) {
            const double rho_new = dot(rhat, r);
            if (rho_new == 0.0 || !std::isfinite(rho_new)) {
                restart_needed = true;
                break;
            }
            const double beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for (std::size_t i = 0; i < n; ++i) {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
                phat[i] = minv[i] * p[i];
            }
            a.multiply(phat, v, cfg.threads);
            const double rv = dot(rhat, v);
            if (rv == 0.0 || !std::isfinite(rv)) {
                restart_needed = true;
                break;
            }
            alpha = rho / rv;
            for (std::size_t i = 0; i < n; ++i) {
                s[i] = r[i] - alpha * v[i];
            }
            ++rep.iterations;
            if (norm2(s) <= target) {
                for (std::size_t i = 0; i < n; ++i) {
                    x[i] += alpha * phat[i];
                }
                true_residual(a, b, x, r, cfg.threads);
                rn = norm2(r);
                rep.history.push_back(rn);
                if (rn <= target) {
                    rep.converged = true;
                    return;
                }
                restart_needed = true;
                break;
            }
            for (std::size_t i = 0; i < n; ++i) {
                shat[i] = minv[i] * s[i];
            }
            a.multiply(shat, t, cfg.threads);
            const double tt = dot(t, t);
            omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += alpha * phat[i] + omega * shat[i];
                r[i] = s[i] - omega * t[i];
            }
            rn = norm2(r);
            rep.history.push_back(rn);
            if (rn <= target) {
                true_residual(a, b, x, r, cfg.threads);
                rn = norm2(r);
                if (rn <= target) {
                    rep.converged = true;
                    return;
                }
                restart_needed = true;
            } else if (omega == 0.0 || !std::isfinite(omega)) {
                restart_needed = true;
            }
        }
        true_residual(a, b, x, r, cfg.threads);
    }
    rep.message = rep.iterations >= cfg.max_iters ? "iteration limit reached" : "bicgstab breakdown";
}

} // namespace

std::vector<double> dense_direct(const SparseMatrix& a, std::span<const double> b, std::size_t cap)
{
    const std::size_t n = a.size();
    if (n > cap) {
        throw SolverError("dense_direct: system size " + std::to_string(n) + " exceeds the cap " +
                          std::to_string(cap));
    }
    if (b.size() != n) {
        throw SolverError("dense_direct: dimension mismatch");
    }
    std::vector<double> m(n * n, 0.0);
    const auto offsets = a.row_offsets();
    const auto cols = a.columns();
    const auto vals = a.values();
    double amax = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t p = offsets[r]; p < offsets[r + 1]; ++p) {
            m[r * n + static_cast<std::size_t>(cols[p])] = vals[p];
            amax = std::max(amax, std::abs(vals[p]));
        }
    }
    std::vector<double> x(b.begin(), b.end());
    const double tiny = amax * 1e-15 * static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(m[i * n + k]) > std::abs(m[piv * n + k])) {
                piv = i;
            }
        }
        if (std::abs(m[piv * n + k]) <= tiny) {
            throw SolverError("dense_direct: matrix is singular");
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(m[k * n + j], m[piv * n + j]);
            }
            std::swap(x[k], x[piv]);
        }
        const double d = m[k * n + k];
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = m[i * n + k] / d;
            if (f == 0.0) {
                continue;
            }
            m[i * n + k] = f;
            for (std::size_t j = k + 1; j < n; ++j) {
                m[i * n + j] -= f * m[k * n + j];
            }
            x[i] -= f * x[k];
        }
    }
    for (std::size_t k = n; k-- > 0;) {
        double s = x[k];
        for (std::size_t j = k + 1; j < n; ++j) {
            s -= m[k * n + j] * x[j];
        }
        x[k] = s / m[k * n + k];
    }
    return x;
}

SolveReport solve(const SparseMatrix& a, std::span<const double> b, std::vector<double>& x, const SolverConfig& cfg)
{
    cfg.validate();
    if (!a.finalized()) {
        throw SolverError("solve: matrix not finalized");
    }
    if (b.size() != a.size()) {
        throw SolverError("solve: right-hand side has the wrong size");
    }
    if (x.size() != a.size()) {
        x.assign(a.size(), 0.0);
    }
    const auto start = Clock::now();
    SolveReport rep;
    rep.rhs_norm = norm2(b);
    const double target = std::max(cfg.rel_tol * rep.rhs_norm, cfg.abs_tol);
    switch (cfg.method) {
    case SolverMethod::cg:
        if (!is_symmetric(a)) {
            throw SolverError("cg requires a symmetric matrix");
        }
        run_cg(a, b, x, cfg, target, rep);
        break;
    case SolverMethod::bicgstab:
        run_bicgstab(a, b, x, cfg, target, rep);
        break;
    case SolverMethod::direct:
        x = dense_direct(a, b, cfg.direct_cap);
        rep.iterations = 1;
        break;
    }
    rep.residual = residual_norm(a, b, x, cfg.threads);
    if (cfg.method == SolverMethod::direct) {
        rep.converged = rep.residual <= target;
        rep.history.push_back(rep.residual);
    } else {
        rep.converged = rep.converged && rep.residual <= target;
    }
    rep.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return rep;
}

} // namespace mrpoisson
