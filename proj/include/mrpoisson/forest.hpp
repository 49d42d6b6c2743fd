#pragma once

#include "mrpoisson/geometry.hpp"

#include <cstddef>
#include <iosfwd>
#include <unordered_map>
#include <vector>

namespace mrpoisson {

enum class CellKind : std::uint8_t { leaf, inner, phantom };

struct CellRecord {
    CellKind kind = CellKind::leaf;
    double value = 0.0;
};

/// Set of graded dyadic trees over the root grid. Tree cells are leaves or
/// inner cells; phantoms are ghost children of leaves that only exist so
/// that fluxes next to finer leaves can be evaluated at the finer level.
class Forest {
public:
    using CellMap = std::unordered_map<CellKey, CellRecord>;

    /// Single 1D root cell.
    Forest();
    /// Roots only, every root a leaf.
    explicit Forest(Domain domain);

    /// Every cell down to `level` present, leaves at `level`.
    [[nodiscard]] static Forest uniform(const Domain& domain, int level);

    [[nodiscard]] const Domain& domain() const noexcept { return domain_; }
    [[nodiscard]] int dim() const noexcept { return domain_.dim(); }

    [[nodiscard]] const CellRecord* find(const CellId& c) const;
    [[nodiscard]] CellRecord* find(const CellId& c);
    [[nodiscard]] bool in_tree(const CellId& c) const;
    [[nodiscard]] bool is_leaf(const CellId& c) const;
    [[nodiscard]] bool is_inner(const CellId& c) const;
    [[nodiscard]] bool is_phantom(const CellId& c) const;

    /// Turns the leaf `c` into an inner cell with 2^d leaf children.
    /// Phantom children are promoted to leaves.
    void refine(const CellId& c);

    /// Refines the leaf covering `c` until `c` itself is in the tree.
    void refine_to(const CellId& c);

    /// Adds a phantom cell (no-op if the cell already exists).
    void add_phantom(const CellId& c);
    void clear_phantoms();

    /// Deepest tree cell containing `c` (a leaf when `c` is not in the tree).
    [[nodiscard]] CellId covering_cell(const CellId& c) const;

    [[nodiscard]] std::size_t leaf_count() const noexcept { return leaf_count_; }
    [[nodiscard]] std::size_t phantom_count() const noexcept { return phantom_count_; }
    [[nodiscard]] std::size_t cell_count() const noexcept { return cells_.size(); }
    [[nodiscard]] int finest_leaf_level() const;
    [[nodiscard]] const CellMap& cells() const noexcept { return cells_; }

    friend bool operator==(const Forest& a, const Forest& b);

private:
    void insert(const CellId& c, CellKind kind);

    Domain domain_;
    CellMap cells_;
    std::size_t leaf_count_ = 0;
    std::size_t phantom_count_ = 0;
};

/// Bijection between leaves and 0-based unknown numbers. Order is root-major
/// (x fastest), then depth-first Z-order inside each tree.
class LeafMap {
public:
    LeafMap() = default;
    explicit LeafMap(std::vector<CellId> leaves);

    [[nodiscard]] std::size_t size() const noexcept { return inverse_.size(); }
    /// -1 when `c` is not a leaf.
    [[nodiscard]] int index(const CellId& c) const;
    [[nodiscard]] const CellId& cell(std::size_t i) const { return inverse_.at(i); }
    [[nodiscard]] const std::vector<CellId>& cells() const noexcept { return inverse_; }

private:
    std::unordered_map<CellKey, int> forward_;
    std::vector<CellId> inverse_;
};

/// Smallest superset of the tree in which every inner cell has all of its
/// 3^d same-level neighbours present, i.e. neighbouring leaves (faces and
/// corners) differ by at most one level. Idempotent, never removes cells.
[[nodiscard]] Forest ensure_graded(Forest forest);
void make_graded(Forest& forest);

/// Adds the children of every leaf that has an inner same-level cell within
/// `flux_stencil_radius` along an axis. Idempotent.
[[nodiscard]] Forest insert_phantoms(Forest forest, int flux_stencil_radius = 1);
void add_phantoms(Forest& forest, int flux_stencil_radius = 1);

[[nodiscard]] LeafMap enumerate_leaves(const Forest& forest);

/// True when every inner cell sees all of its same-level neighbours.
[[nodiscard]] bool is_graded(const Forest& forest);

/// Diagnostic dump, one line per cell: "kind root level k0 [k1 [k2]] value"
/// where k is the index inside the root tree. Cells are sorted by key.
void dump_forest(const Forest& forest, std::ostream& out);

} // namespace mrpoisson
