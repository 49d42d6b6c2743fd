#include "mrpoisson/geometry.hpp"

#include "mrpoisson/error.hpp"

#include <string>

namespace mrpoisson {

namespace {

constexpr CellKey kIndexMask = (CellKey{1} << Domain::kKeyIndexBits) - 1;

} // namespace

Domain::Domain(int dim, IVec roots, int max_level, RVec lo, RVec hi)
    : dim_(dim), roots_(roots), max_level_(max_level), lo_(lo), hi_(hi)
{
    if (dim < 1 || dim > kMaxDim) {
        throw GridError("Domain: dimension must be 1, 2 or 3, got " + std::to_string(dim));
    }
    if (max_level < 0 || max_level > kMaxLevel) {
        throw GridError("Domain: max level out of range: " + std::to_string(max_level));
    }
    for (int a = 0; a < kMaxDim; ++a) {
        if (a >= dim) {
            roots_[a] = 1;
            lo_[a] = 0.0;
            hi_[a] = 1.0;
            continue;
        }
        if (roots_[a] < 1) {
            throw GridError("Domain: need at least one root per direction");
        }
        if ((static_cast<std::int64_t>(roots_[a]) << max_level) >= (std::int64_t{1} << kKeyIndexBits)) {
            throw GridError("Domain: roots * 2^J exceeds the addressable index range");
        }
        if (!(hi_[a] > lo_[a])) {
            throw GridError("Domain: empty extent along axis " + std::to_string(a));
        }
    }
}

Domain::Domain(int dim, IVec roots, int max_level)
    : Domain(dim, roots, max_level, RVec{0.0, 0.0, 0.0}, RVec{1.0, 1.0, 1.0})
{
}

int Domain::root_count() const noexcept
{
    int n = 1;
    for (int a = 0; a < dim_; ++a) {
        n *= roots_[a];
    }
    return n;
}

std::int64_t Domain::cells_at_level(int level) const noexcept
{
    std::int64_t n = 1;
    for (int a = 0; a < dim_; ++a) {
        n *= cells_per_axis(level, a);
    }
    return n;
}

double Domain::cell_size(int level, int axis) const noexcept
{
    return (hi_[axis] - lo_[axis]) / static_cast<double>(cells_per_axis(level, axis));
}

double Domain::cell_measure(int level) const noexcept
{
    double m = 1.0;
    for (int a = 0; a < dim_; ++a) {
        m *= cell_size(level, a);
    }
    return m;
}

double Domain::face_measure(int level, int axis) const noexcept
{
    double m = 1.0;
    for (int a = 0; a < dim_; ++a) {
        if (a != axis) {
            m *= cell_size(level, a);
        }
    }
    return m;
}

double Domain::measure() const noexcept
{
    double m = 1.0;
    for (int a = 0; a < dim_; ++a) {
        m *= hi_[a] - lo_[a];
    }
    return m;
}

RVec Domain::cell_center(const CellId& c) const noexcept
{
    RVec x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim_; ++a) {
        x[a] = lo_[a] + (c.index[a] + 0.5) * cell_size(c.level, a);
    }
    return x;
}

RVec Domain::face_center(const CellId& c, int axis, Side side) const noexcept
{
    RVec x = cell_center(c);
    const double half = 0.5 * cell_size(c.level, axis);
    x[axis] += side == Side::plus ? half : -half;
    return x;
}

bool Domain::contains(const CellId& c) const noexcept
{
    if (c.level < 0 || c.level > max_level_) {
        return false;
    }
    for (int a = 0; a < kMaxDim; ++a) {
        if (c.index[a] < 0 || c.index[a] >= cells_per_axis(c.level, a)) {
            return false;
        }
    }
    return true;
}

IVec Domain::root_of(const CellId& c) const noexcept
{
    IVec r{0, 0, 0};
    for (int a = 0; a < dim_; ++a) {
        r[a] = c.index[a] >> c.level;
    }
    return r;
}

int Domain::root_index(const CellId& c) const noexcept
{
    const IVec r = root_of(c);
    return r[0] + roots_[0] * (r[1] + roots_[1] * r[2]);
}

IVec Domain::local_index(const CellId& c) const noexcept
{
    IVec k{0, 0, 0};
    const int mask = (1 << c.level) - 1;
    for (int a = 0; a < dim_; ++a) {
        k[a] = c.index[a] & mask;
    }
    return k;
}

CellKey Domain::key(const CellId& c) noexcept
{
    CellKey k = static_cast<CellKey>(c.level);
    for (int a = 0; a < kMaxDim; ++a) {
        k = (k << kKeyIndexBits) | (static_cast<CellKey>(c.index[a]) & kIndexMask);
    }
    return k;
}

CellId Domain::from_key(CellKey key) noexcept
{
    CellId c;
    for (int a = kMaxDim - 1; a >= 0; --a) {
        c.index[a] = static_cast<int>(key & kIndexMask);
        key >>= kKeyIndexBits;
    }
    c.level = static_cast<int>(key);
    return c;
}

CellId Domain::parent(const CellId& c) const
{
    if (c.level == 0) {
        throw GridError("parent: root cells have no parent");
    }
    CellId p{c.level - 1, {0, 0, 0}};
    for (int a = 0; a < dim_; ++a) {
        p.index[a] = c.index[a] >> 1;
    }
    return p;
}

CellId Domain::child(const CellId& c, int position) const
{
    if (c.level >= max_level_) {
        throw GridError("children: level " + std::to_string(c.level) + " is already the finest level");
    }
    CellId ch{c.level + 1, {0, 0, 0}};
    for (int a = 0; a < dim_; ++a) {
        ch.index[a] = 2 * c.index[a] + ((position >> a) & 1);
    }
    return ch;
}

std::vector<CellId> Domain::children(const CellId& c) const
{
    std::vector<CellId> out;
    out.reserve(static_cast<std::size_t>(children_per_cell()));
    for (int p = 0; p < children_per_cell(); ++p) {
        out.push_back(child(c, p));
    }
    return out;
}

int Domain::child_position(const CellId& c) const noexcept
{
    int p = 0;
    for (int a = 0; a < dim_; ++a) {
        p |= (c.index[a] & 1) << a;
    }
    return p;
}

std::optional<CellId> Domain::neighbor(const CellId& c, int axis, Side side) const noexcept
{
    CellId n = c;
    n.index[axis] += side == Side::plus ? 1 : -1;
    if (n.index[axis] < 0 || n.index[axis] >= cells_per_axis(c.level, axis)) {
        return std::nullopt;
    }
    return n;
}

std::optional<CellId> Domain::shifted(const CellId& c, const IVec& offset) const noexcept
{
    CellId n = c;
    for (int a = 0; a < dim_; ++a) {
        n.index[a] += offset[a];
        if (n.index[a] < 0 || n.index[a] >= cells_per_axis(c.level, a)) {
            return std::nullopt;
        }
    }
    return n;
}

CellId Domain::ancestor(const CellId& c, int level) const noexcept
{
    CellId p{level, {0, 0, 0}};
    const int shift = c.level - level;
    for (int a = 0; a < dim_; ++a) {
        p.index[a] = c.index[a] >> shift;
    }
    return p;
}

std::vector<CellId> Domain::root_cells() const
{
    std::vector<CellId> out;
    out.reserve(static_cast<std::size_t>(root_count()));
    for (int z = 0; z < roots_[2]; ++z) {
        for (int y = 0; y < roots_[1]; ++y) {
            for (int x = 0; x < roots_[0]; ++x) {
                out.push_back(CellId{0, {x, y, z}});
            }
        }
    }
    return out;
}

} // namespace mrpoisson
