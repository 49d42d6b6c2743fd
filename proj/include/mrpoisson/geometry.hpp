#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace mrpoisson {

inline constexpr int kMaxDim = 3;

using IVec = std::array<int, kMaxDim>;
using RVec = std::array<double, kMaxDim>;

enum class Side : int { minus = 0, plus = 1 };

/// A dyadic cell. `index` is the position inside the level-`level` grid that
/// covers the whole root grid, i.e. index[a] in [0, roots[a] * 2^level).
/// The root tree and the position inside that tree are derived from it
/// (see Domain::root_of / Domain::local_index), so neighbours across root
/// boundaries are plain index shifts. Unused axes stay at 0.
struct CellId {
    int level = 0;
    IVec index{0, 0, 0};

    friend bool operator==(const CellId&, const CellId&) = default;
};

using CellKey = std::uint64_t;

/// Box-shaped computational domain split into N_Rx x N_Ry x N_Rz root cells,
/// each the root of a dyadic tree of depth max_level.
class Domain {
public:
    static constexpr int kKeyIndexBits = 19;
    static constexpr int kMaxLevel = 24;

    Domain(int dim, IVec roots, int max_level, RVec lo, RVec hi);

    /// Unit-cube convenience constructor: [0,1]^dim with the given roots.
    Domain(int dim, IVec roots, int max_level);

    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] int max_level() const noexcept { return max_level_; }
    [[nodiscard]] const IVec& roots() const noexcept { return roots_; }
    [[nodiscard]] const RVec& lo() const noexcept { return lo_; }
    [[nodiscard]] const RVec& hi() const noexcept { return hi_; }
    [[nodiscard]] int root_count() const noexcept;
    [[nodiscard]] int children_per_cell() const noexcept { return 1 << dim_; }

    [[nodiscard]] int cells_per_axis(int level, int axis) const noexcept
    {
        return axis < dim_ ? (roots_[axis] << level) : 1;
    }
    [[nodiscard]] std::int64_t cells_at_level(int level) const noexcept;
    [[nodiscard]] double cell_size(int level, int axis) const noexcept;
    [[nodiscard]] double cell_measure(int level) const noexcept;
    /// Area (length in 2D, 1 in 1D) of a face of a level-`level` cell normal to `axis`.
    [[nodiscard]] double face_measure(int level, int axis) const noexcept;
    [[nodiscard]] double measure() const noexcept;

    [[nodiscard]] RVec cell_center(const CellId& c) const noexcept;
    /// Centre of the face of `c` normal to `axis` on `side`.
    [[nodiscard]] RVec face_center(const CellId& c, int axis, Side side) const noexcept;

    [[nodiscard]] bool contains(const CellId& c) const noexcept;
    [[nodiscard]] IVec root_of(const CellId& c) const noexcept;
    /// Root-major linear root number, x fastest.
    [[nodiscard]] int root_index(const CellId& c) const noexcept;
    [[nodiscard]] IVec local_index(const CellId& c) const noexcept;

    [[nodiscard]] static CellKey key(const CellId& c) noexcept;
    [[nodiscard]] static CellId from_key(CellKey key) noexcept;

    [[nodiscard]] CellId parent(const CellId& c) const;
    /// The 2^d children in lexicographic order with x varying fastest.
    [[nodiscard]] std::vector<CellId> children(const CellId& c) const;
    [[nodiscard]] CellId child(const CellId& c, int position) const;
    /// Bit a of the result is the child offset along axis a.
    [[nodiscard]] int child_position(const CellId& c) const noexcept;
    /// Same-level neighbour; std::nullopt marks the domain boundary.
    [[nodiscard]] std::optional<CellId> neighbor(const CellId& c, int axis, Side side) const noexcept;
    [[nodiscard]] std::optional<CellId> shifted(const CellId& c, const IVec& offset) const noexcept;
    /// Ancestor of `c` at `level` (<= c.level).
    [[nodiscard]] CellId ancestor(const CellId& c, int level) const noexcept;

    [[nodiscard]] std::vector<CellId> root_cells() const;

    friend bool operator==(const Domain&, const Domain&) = default;

private:
    int dim_;
    IVec roots_;
    int max_level_;
    RVec lo_;
    RVec hi_;
};

} // namespace mrpoisson
