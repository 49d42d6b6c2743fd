#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace mrpoisson {

/// Square sparse matrix. Entries are accumulated as COO triplets and turned
/// into CSR by finalize(), which sorts, sums duplicates and drops
/// off-diagonal entries that cancel to exactly zero.
class SparseMatrix {
public:
    struct Triplet {
        int row;
        int col;
        double value;
    };

    SparseMatrix() = default;
    explicit SparseMatrix(std::size_t n);

    void add(int row, int col, double value);
    void finalize();

    [[nodiscard]] bool finalized() const noexcept { return finalized_; }
    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] std::size_t nnz() const noexcept { return cols_.size(); }
    /// Triplets received since construction (before merging).
    [[nodiscard]] std::size_t triplets_added() const noexcept { return added_; }

    [[nodiscard]] std::span<const std::size_t> row_offsets() const noexcept { return offsets_; }
    [[nodiscard]] std::span<const int> columns() const noexcept { return cols_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return vals_; }

    /// Stored value or 0.
    [[nodiscard]] double at(int row, int col) const;
    [[nodiscard]] double diagonal(int row) const { return at(row, row); }

    /// y = A x, split into row blocks over `threads` workers.
    void multiply(std::span<const double> x, std::span<double> y, int threads = 1) const;

private:
    void require_finalized(const char* what) const;

    std::size_t n_ = 0;
    bool finalized_ = false;
    std::size_t added_ = 0;
    std::vector<Triplet> coo_;
    std::vector<std::size_t> offsets_;
    std::vector<int> cols_;
    std::vector<double> vals_;
};

[[nodiscard]] std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x, int threads = 1);

struct MatrixStats {
    std::size_t n = 0;
    std::size_t nnz = 0;
    double ratio = 0.0;
    /// Share of stored entries (i, j) whose transpose is stored and equal
    /// up to 1e-12 * max|a|.
    double symmetry_fraction = 0.0;
};

[[nodiscard]] MatrixStats matrix_stats(const SparseMatrix& a);
[[nodiscard]] bool is_symmetric(const SparseMatrix& a);

/// Matrix Market coordinate format, 1-based, 17 significant digits, with
/// one comment line carrying the stats.
void write_matrix_market(const SparseMatrix& a, std::ostream& out);
void write_matrix_market(const SparseMatrix& a, const std::string& path);

} // namespace mrpoisson
