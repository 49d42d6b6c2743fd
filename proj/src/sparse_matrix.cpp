#include "mrpoisson/sparse_matrix.hpp"

#include "mrpoisson/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <thread>

namespace mrpoisson {

SparseMatrix::SparseMatrix(std::size_t n) : n_(n) {}

void SparseMatrix::add(int row, int col, double value)
{
    if (finalized_) {
        throw Error("SparseMatrix::add after finalize");
    }
    if (row < 0 || col < 0 || static_cast<std::size_t>(row) >= n_ || static_cast<std::size_t>(col) >= n_) {
        throw Error("SparseMatrix::add: index out of range");
    }
    coo_.push_back(Triplet{row, col, value});
    ++added_;
}

void SparseMatrix::finalize()
{
    if (finalized_) {
        return;
    }
    std::stable_sort(coo_.begin(), coo_.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    offsets_.assign(n_ + 1, 0);
    cols_.clear();
    vals_.clear();
    for (std::size_t i = 0; i < coo_.size();) {
        const Triplet& t = coo_[i];
        double sum = 0.0;
        std::size_t k = i;
        for (; k < coo_.size() && coo_[k].row == t.row && coo_[k].col == t.col; ++k) {
            sum += coo_[k].value;
        }
        if (sum != 0.0 || t.row == t.col) {
            cols_.push_back(t.col);
            vals_.push_back(sum);
            ++offsets_[static_cast<std::size_t>(t.row) + 1];
        }
        i = k;
    }
    for (std::size_t r = 0; r < n_; ++r) {
        offsets_[r + 1] += offsets_[r];
    }
    coo_.clear();
    coo_.shrink_to_fit();
    finalized_ = true;
}

void SparseMatrix::require_finalized(const char* what) const
{
    if (!finalized_) {
        throw Error(std::string(what) + ": matrix not finalized");
    }
}

double SparseMatrix::at(int row, int col) const
{
    require_finalized("SparseMatrix::at");
    const auto begin = cols_.begin() + static_cast<std::ptrdiff_t>(offsets_[static_cast<std::size_t>(row)]);
    const auto end = cols_.begin() + static_cast<std::ptrdiff_t>(offsets_[static_cast<std::size_t>(row) + 1]);
    const auto it = std::lower_bound(begin, end, col);
    if (it == end || *it != col) {
        return 0.0;
    }
    return vals_[static_cast<std::size_t>(it - cols_.begin())];
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y, int threads) const
{
    require_finalized("spmv");
    if (x.size() != n_ || y.size() != n_) {
        throw Error("spmv: dimension mismatch");
    }
    auto rows = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t r = lo; r < hi; ++r) {
            double s = 0.0;
            for (std::size_t p = offsets_[r]; p < offsets_[r + 1]; ++p) {
                s += vals_[p] * x[static_cast<std::size_t>(cols_[p])];
            }
            y[r] = s;
        }
    };
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n_ / 4096 + 1);
    if (workers <= 1) {
        rows(0, n_);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t block = (n_ + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * block;
        const std::size_t hi = std::min(n_, lo + block);
        pool.emplace_back(rows, lo, hi);
    }
    for (std::thread& t : pool) {
        t.join();
    }
}

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x, int threads)
{
    std::vector<double> y(a.size());
    a.multiply(x, y, threads);
    return y;
}

MatrixStats matrix_stats(const SparseMatrix& a)
{
    if (!a.finalized()) {
        throw Error("matrix_stats: matrix not finalized");
    }
    MatrixStats s;
    s.n = a.size();
    s.nnz = a.nnz();
    s.ratio = s.n > 0 ? static_cast<double>(s.nnz) / static_cast<double>(s.n) : 0.0;
    double amax = 0.0;
    for (double v : a.values()) {
        amax = std::max(amax, std::abs(v));
    }
    const double tol = 1e-12 * amax;
    std::size_t matched = 0;
    const auto offsets = a.row_offsets();
    const auto cols = a.columns();
    const auto vals = a.values();
    for (std::size_t r = 0; r < s.n; ++r) {
        for (std::size_t p = offsets[r]; p < offsets[r + 1]; ++p) {
            const int c = cols[p];
            if (static_cast<std::size_t>(c) == r) {
                ++matched;
                continue;
            }
            const auto cb = cols.begin() + static_cast<std::ptrdiff_t>(offsets[static_cast<std::size_t>(c)]);
            const auto ce = cols.begin() + static_cast<std::ptrdiff_t>(offsets[static_cast<std::size_t>(c) + 1]);
            const auto it = std::lower_bound(cb, ce, static_cast<int>(r));
            if (it != ce && *it == static_cast<int>(r) &&
                std::abs(vals[static_cast<std::size_t>(it - cols.begin())] - vals[p]) <= tol) {
                ++matched;
            }
        }
    }
    s.symmetry_fraction = s.nnz > 0 ? static_cast<double>(matched) / static_cast<double>(s.nnz) : 1.0;
    return s;
}

bool is_symmetric(const SparseMatrix& a)
{
    return matrix_stats(a).symmetry_fraction == 1.0;
}

void write_matrix_market(const SparseMatrix& a, std::ostream& out)
{
    const MatrixStats s = matrix_stats(a);
    char buf[128];
    out << "%%MatrixMarket matrix coordinate real general\n";
    std::snprintf(buf, sizeof buf, "%% n=%zu nnz=%zu ratio=%.17g symmetry_fraction=%.17g\n", s.n, s.nnz, s.ratio,
                  s.symmetry_fraction);
    out << buf;
    out << s.n << ' ' << s.n << ' ' << s.nnz << '\n';
    const auto offsets = a.row_offsets();
    const auto cols = a.columns();
    const auto vals = a.values();
    for (std::size_t r = 0; r < s.n; ++r) {
        for (std::size_t p = offsets[r]; p < offsets[r + 1]; ++p) {
            std::snprintf(buf, sizeof buf, "%zu %d %.17g\n", r + 1, cols[p] + 1, vals[p]);
            out << buf;
        }
    }
}

void write_matrix_market(const SparseMatrix& a, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    write_matrix_market(a, out);
    out.flush();
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

} // namespace mrpoisson
