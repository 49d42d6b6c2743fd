#include "mrpoisson/forest.hpp"

#include "mrpoisson/error.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>

namespace mrpoisson {

namespace {

/// All offsets in {-1,0,1}^dim except the origin.
std::vector<IVec> neighbourhood_offsets(int dim)
{
    std::vector<IVec> out;
    const int n = dim == 1 ? 3 : (dim == 2 ? 9 : 27);
    for (int i = 0; i < n; ++i) {
        IVec off{0, 0, 0};
        int r = i;
        bool origin = true;
        for (int a = 0; a < dim; ++a) {
            off[a] = r % 3 - 1;
            r /= 3;
            origin = origin && off[a] == 0;
        }
        if (!origin) {
            out.push_back(off);
        }
    }
    return out;
}

const char* kind_name(CellKind kind)
{
    switch (kind) {
    case CellKind::leaf:
        return "leaf";
    case CellKind::inner:
        return "inner";
    case CellKind::phantom:
        return "phantom";
    }
    return "?";
}

} // namespace

Forest::Forest() : Forest(Domain(1, IVec{1, 1, 1}, 0)) {}

Forest::Forest(Domain domain) : domain_(std::move(domain))
{
    for (const CellId& r : domain_.root_cells()) {
        insert(r, CellKind::leaf);
    }
}

Forest Forest::uniform(const Domain& domain, int level)
{
    if (level > domain.max_level()) {
        throw GridError("uniform: level " + std::to_string(level) + " exceeds the maximum level");
    }
    Forest f(domain);
    f.cells_.reserve(static_cast<std::size_t>(domain.cells_at_level(level) * 2));
    std::vector<CellId> current = domain.root_cells();
    for (int j = 0; j < level; ++j) {
        std::vector<CellId> next;
        next.reserve(current.size() * static_cast<std::size_t>(domain.children_per_cell()));
        for (const CellId& c : current) {
            f.refine(c);
            for (int p = 0; p < domain.children_per_cell(); ++p) {
                next.push_back(domain.child(c, p));
            }
        }
        current = std::move(next);
    }
    return f;
}

void Forest::insert(const CellId& c, CellKind kind)
{
    cells_[Domain::key(c)] = CellRecord{kind, 0.0};
    if (kind == CellKind::leaf) {
        ++leaf_count_;
    } else if (kind == CellKind::phantom) {
        ++phantom_count_;
    }
}

const CellRecord* Forest::find(const CellId& c) const
{
    const auto it = cells_.find(Domain::key(c));
    return it == cells_.end() ? nullptr : &it->second;
}

CellRecord* Forest::find(const CellId& c)
{
    const auto it = cells_.find(Domain::key(c));
    return it == cells_.end() ? nullptr : &it->second;
}

bool Forest::in_tree(const CellId& c) const
{
    const CellRecord* r = find(c);
    return r != nullptr && r->kind != CellKind::phantom;
}

bool Forest::is_leaf(const CellId& c) const
{
    const CellRecord* r = find(c);
    return r != nullptr && r->kind == CellKind::leaf;
}

bool Forest::is_inner(const CellId& c) const
{
    const CellRecord* r = find(c);
    return r != nullptr && r->kind == CellKind::inner;
}

bool Forest::is_phantom(const CellId& c) const
{
    const CellRecord* r = find(c);
    return r != nullptr && r->kind == CellKind::phantom;
}

void Forest::refine(const CellId& c)
{
    CellRecord* rec = find(c);
    if (rec == nullptr || rec->kind != CellKind::leaf) {
        throw GridError("refine: cell is not a leaf");
    }
    if (c.level >= domain_.max_level()) {
        throw GridError("refine: cell already at the finest level " + std::to_string(c.level));
    }
    rec->kind = CellKind::inner;
    --leaf_count_;
    for (int p = 0; p < domain_.children_per_cell(); ++p) {
        const CellId ch = domain_.child(c, p);
        CellRecord* existing = find(ch);
        if (existing == nullptr) {
            insert(ch, CellKind::leaf);
        } else if (existing->kind == CellKind::phantom) {
            existing->kind = CellKind::leaf;
            --phantom_count_;
            ++leaf_count_;
        }
    }
}

CellId Forest::covering_cell(const CellId& c) const
{
    for (int l = c.level; l >= 0; --l) {
        const CellId a = domain_.ancestor(c, l);
        if (in_tree(a)) {
            return a;
        }
    }
    throw GridError("covering_cell: no root found");
}

void Forest::refine_to(const CellId& c)
{
    CellId a = covering_cell(c);
    while (a.level < c.level) {
        refine(a);
        a = domain_.ancestor(c, a.level + 1);
    }
}

void Forest::add_phantom(const CellId& c)
{
    if (find(c) == nullptr) {
        insert(c, CellKind::phantom);
    }
}

void Forest::clear_phantoms()
{
    std::erase_if(cells_, [](const auto& kv) { return kv.second.kind == CellKind::phantom; });
    phantom_count_ = 0;
}

int Forest::finest_leaf_level() const
{
    int level = 0;
    for (const auto& [key, rec] : cells_) {
        if (rec.kind == CellKind::leaf) {
            level = std::max(level, Domain::from_key(key).level);
        }
    }
    return level;
}

bool operator==(const Forest& a, const Forest& b)
{
    if (!(a.domain_ == b.domain_) || a.cells_.size() != b.cells_.size()) {
        return false;
    }
    for (const auto& [key, rec] : a.cells_) {
        const auto it = b.cells_.find(key);
        if (it == b.cells_.end() || it->second.kind != rec.kind || it->second.value != rec.value) {
            return false;
        }
    }
    return true;
}

LeafMap::LeafMap(std::vector<CellId> leaves) : inverse_(std::move(leaves))
{
    forward_.reserve(inverse_.size() * 2);
    for (std::size_t i = 0; i < inverse_.size(); ++i) {
        forward_.emplace(Domain::key(inverse_[i]), static_cast<int>(i));
    }
}

int LeafMap::index(const CellId& c) const
{
    const auto it = forward_.find(Domain::key(c));
    return it == forward_.end() ? -1 : it->second;
}

void make_graded(Forest& forest)
{
    const Domain& domain = forest.domain();
    const int top = domain.max_level();
    std::vector<std::vector<CellId>> inner(static_cast<std::size_t>(top + 1));
    for (const auto& [key, rec] : forest.cells()) {
        if (rec.kind == CellKind::inner) {
            const CellId c = Domain::from_key(key);
            inner[static_cast<std::size_t>(c.level)].push_back(c);
        }
    }
    const std::vector<IVec> offsets = neighbourhood_offsets(domain.dim());

    // Refinements triggered at level j only create inner cells below j.
    for (int j = top - 1; j >= 0; --j) {
        const std::vector<CellId>& level_cells = inner[static_cast<std::size_t>(j)];
        for (const CellId& c : level_cells) {
            for (const IVec& off : offsets) {
                const auto n = domain.shifted(c, off);
                if (!n || forest.in_tree(*n)) {
                    continue;
                }
                CellId a = forest.covering_cell(*n);
                while (a.level < n->level) {
                    forest.refine(a);
                    inner[static_cast<std::size_t>(a.level)].push_back(a);
                    a = domain.ancestor(*n, a.level + 1);
                }
            }
        }
    }
}

Forest ensure_graded(Forest forest)
{
    make_graded(forest);
    return forest;
}

bool is_graded(const Forest& forest)
{
    const Domain& domain = forest.domain();
    const std::vector<IVec> offsets = neighbourhood_offsets(domain.dim());
    for (const auto& [key, rec] : forest.cells()) {
        if (rec.kind != CellKind::inner) {
            continue;
        }
        const CellId c = Domain::from_key(key);
        for (const IVec& off : offsets) {
            const auto n = domain.shifted(c, off);
            if (n && !forest.in_tree(*n)) {
                return false;
            }
        }
    }
    return true;
}

void add_phantoms(Forest& forest, int flux_stencil_radius)
{
    const Domain& domain = forest.domain();
    std::vector<CellId> leaves;
    for (const auto& [key, rec] : forest.cells()) {
        if (rec.kind == CellKind::leaf) {
            leaves.push_back(Domain::from_key(key));
        }
    }
    for (const CellId& c : leaves) {
        if (c.level >= domain.max_level()) {
            continue;
        }
        bool needs = false;
        for (int axis = 0; axis < domain.dim() && !needs; ++axis) {
            for (int dist = 1; dist <= flux_stencil_radius && !needs; ++dist) {
                for (int sign : {-1, 1}) {
                    IVec off{0, 0, 0};
                    off[axis] = sign * dist;
                    const auto n = domain.shifted(c, off);
                    if (n && forest.is_inner(*n)) {
                        needs = true;
                        break;
                    }
                }
            }
        }
        if (needs) {
            for (int p = 0; p < domain.children_per_cell(); ++p) {
                forest.add_phantom(domain.child(c, p));
            }
        }
    }
}

Forest insert_phantoms(Forest forest, int flux_stencil_radius)
{
    add_phantoms(forest, flux_stencil_radius);
    return forest;
}

LeafMap enumerate_leaves(const Forest& forest)
{
    const Domain& domain = forest.domain();
    std::vector<CellId> order;
    order.reserve(forest.leaf_count());
    std::vector<CellId> stack;
    for (const CellId& root : domain.root_cells()) {
        stack.push_back(root);
        while (!stack.empty()) {
            const CellId c = stack.back();
            stack.pop_back();
            const CellRecord* rec = forest.find(c);
            if (rec == nullptr || rec->kind == CellKind::phantom) {
                throw GridError("enumerate_leaves: inner cell with missing children");
            }
            if (rec->kind == CellKind::leaf) {
                order.push_back(c);
                continue;
            }
            for (int p = domain.children_per_cell() - 1; p >= 0; --p) {
                stack.push_back(domain.child(c, p));
            }
        }
    }
    return LeafMap(std::move(order));
}

void dump_forest(const Forest& forest, std::ostream& out)
{
    const Domain& domain = forest.domain();
    std::vector<CellKey> keys;
    keys.reserve(forest.cell_count());
    for (const auto& kv : forest.cells()) {
        keys.push_back(kv.first);
    }
    std::sort(keys.begin(), keys.end());
    char buf[64];
    for (CellKey key : keys) {
        const CellId c = Domain::from_key(key);
        const CellRecord& rec = forest.cells().at(key);
        out << kind_name(rec.kind) << ' ' << domain.root_index(c) << ' ' << c.level;
        const IVec k = domain.local_index(c);
        for (int a = 0; a < domain.dim(); ++a) {
            out << ' ' << k[a];
        }
        std::snprintf(buf, sizeof buf, "%.17g", rec.value);
        out << ' ' << buf << '\n';
    }
}

} // namespace mrpoisson
