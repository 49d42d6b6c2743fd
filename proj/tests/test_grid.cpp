#include "mrpoisson/error.hpp"
#include "mrpoisson/forest.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

using namespace mrpoisson;

namespace {

std::set<CellKey> keys_of(const std::vector<CellId>& cells)
{
    std::set<CellKey> out;
    for (const CellId& c : cells) {
        out.insert(Domain::key(c));
    }
    return out;
}

std::vector<CellId> leaves_of(const Forest& f)
{
    std::vector<CellId> out;
    for (const auto& [key, rec] : f.cells()) {
        if (rec.kind == CellKind::leaf) {
            out.push_back(Domain::from_key(key));
        }
    }
    return out;
}

// Refines randomly chosen leaves; the result is generally not graded.
Forest random_forest(const Domain& domain, int refinements, unsigned seed)
{
    Forest f(domain);
    std::mt19937 rng(seed);
    for (int i = 0; i < refinements; ++i) {
        std::vector<CellId> leaves = leaves_of(f);
        std::sort(leaves.begin(), leaves.end(),
                  [](const CellId& a, const CellId& b) { return Domain::key(a) < Domain::key(b); });
        std::vector<CellId> open;
        for (const CellId& c : leaves) {
            if (c.level < domain.max_level()) {
                open.push_back(c);
            }
        }
        if (open.empty()) {
            break;
        }
        // Bias towards deep leaves so that level jumps appear.
        std::sort(open.begin(), open.end(), [](const CellId& a, const CellId& b) { return a.level > b.level; });
        std::uniform_int_distribution<std::size_t> pick(0, std::min<std::size_t>(open.size() - 1, 3));
        f.refine(open[pick(rng)]);
    }
    return f;
}

// Closed boxes of two leaves touch (face, edge or corner) without overlapping.
bool touching(const Domain& d, const CellId& a, const CellId& b)
{
    bool any_gap = false;
    for (int ax = 0; ax < d.dim(); ++ax) {
        const double ha = d.cell_size(a.level, ax);
        const double hb = d.cell_size(b.level, ax);
        const double a0 = d.lo()[ax] + a.index[ax] * ha;
        const double b0 = d.lo()[ax] + b.index[ax] * hb;
        const double lo = std::max(a0, b0);
        const double hi = std::min(a0 + ha, b0 + hb);
        if (hi < lo - 1e-12) {
            return false;
        }
        any_gap = any_gap || std::abs(hi - lo) < 1e-12;
    }
    return any_gap;
}

bool brute_force_graded(const Forest& f)
{
    const std::vector<CellId> leaves = leaves_of(f);
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        for (std::size_t k = i + 1; k < leaves.size(); ++k) {
            if (touching(f.domain(), leaves[i], leaves[k]) && std::abs(leaves[i].level - leaves[k].level) > 1) {
                return false;
            }
        }
    }
    return true;
}

std::uint64_t morton(const CellId& c, int dim)
{
    std::uint64_t code = 0;
    for (int bit = 0; bit < c.level; ++bit) {
        for (int a = 0; a < dim; ++a) {
            code |= static_cast<std::uint64_t>((c.index[a] >> bit) & 1) << (bit * dim + a);
        }
    }
    return code;
}

} // namespace

TEST(CellAddressing, ChildrenOneDimension)
{
    const Domain d(1, {1, 1, 1}, 4);
    const auto ch = d.children(CellId{2, {3, 0, 0}});
    ASSERT_EQ(ch.size(), 2u);
    EXPECT_EQ(ch[0], (CellId{3, {6, 0, 0}}));
    EXPECT_EQ(ch[1], (CellId{3, {7, 0, 0}}));
}

TEST(CellAddressing, ChildrenTwoDimensionsLexicographic)
{
    const Domain d(2, {1, 1, 1}, 3);
    const auto ch = d.children(CellId{0, {0, 0, 0}});
    ASSERT_EQ(ch.size(), 4u);
    EXPECT_EQ(ch[0], (CellId{1, {0, 0, 0}}));
    EXPECT_EQ(ch[1], (CellId{1, {1, 0, 0}}));
    EXPECT_EQ(ch[2], (CellId{1, {0, 1, 0}}));
    EXPECT_EQ(ch[3], (CellId{1, {1, 1, 0}}));
}

TEST(CellAddressing, ParentChildInverse)
{
    const Domain d(3, {2, 1, 3}, 3);
    for (int level = 1; level <= 3; ++level) {
        for (int i = 0; i < d.cells_per_axis(level, 0); ++i) {
            for (int k = 0; k < d.cells_per_axis(level, 2); k += 3) {
                const CellId c{level, {i, 1, k}};
                const auto siblings = d.children(d.parent(c));
                EXPECT_NE(std::find(siblings.begin(), siblings.end(), c), siblings.end());
                for (int p = 0; p < d.children_per_cell() && level < 3; ++p) {
                    EXPECT_EQ(d.parent(d.child(c, p)), c);
                }
            }
        }
    }
}

TEST(CellAddressing, LevelOverflowThrows)
{
    const Domain d(2, {1, 1, 1}, 2);
    EXPECT_THROW((void)d.children(CellId{2, {0, 0, 0}}), GridError);
    EXPECT_THROW((void)d.parent(CellId{0, {0, 0, 0}}), GridError);
}

TEST(CellAddressing, KeyRoundTrip)
{
    const Domain d(3, {3, 2, 5}, 6);
    const CellId c{5, {77, 20, 150}};
    EXPECT_EQ(Domain::from_key(Domain::key(c)), c);
}

TEST(Neighbor, DomainEdgeIsBoundary)
{
    const Domain d(1, {1, 1, 1}, 2);
    EXPECT_FALSE(d.neighbor(CellId{2, {0, 0, 0}}, 0, Side::minus).has_value());
}

TEST(Neighbor, IndexIncrement)
{
    const Domain d(1, {1, 1, 1}, 2);
    const auto n = d.neighbor(CellId{2, {1, 0, 0}}, 0, Side::plus);
    ASSERT_TRUE(n.has_value());
    EXPECT_EQ(*n, (CellId{2, {2, 0, 0}}));
}

TEST(Neighbor, CrossesRootBoundary)
{
    const Domain d(2, {2, 1, 1}, 2);
    const CellId last_column{2, {3, 1, 0}};
    EXPECT_EQ(d.root_of(last_column), (IVec{0, 0, 0}));
    const auto n = d.neighbor(last_column, 0, Side::plus);
    ASSERT_TRUE(n.has_value());
    EXPECT_EQ(d.root_of(*n), (IVec{1, 0, 0}));
    EXPECT_EQ(d.local_index(*n), (IVec{0, 1, 0}));
}

TEST(Grading, UniformForestIsFixpoint)
{
    const Domain d(2, {2, 2, 1}, 4);
    const Forest uniform = Forest::uniform(d, 3);
    EXPECT_TRUE(is_graded(uniform));
    EXPECT_TRUE(ensure_graded(uniform) == uniform);
}

TEST(Grading, InsertsIntermediateLevel)
{
    // Leaves (2,0) (3,2) (3,3) (1,1): the level-3 leaf touches the level-1 leaf.
    const Domain d(1, {1, 1, 1}, 3);
    Forest f(d);
    f.refine(CellId{0, {0, 0, 0}});
    f.refine(CellId{1, {0, 0, 0}});
    f.refine(CellId{2, {1, 0, 0}});
    EXPECT_FALSE(brute_force_graded(f));
    const Forest g = ensure_graded(f);
    const std::set<CellKey> expected =
        keys_of({CellId{2, {0, 0, 0}}, CellId{3, {2, 0, 0}}, CellId{3, {3, 0, 0}}, CellId{2, {2, 0, 0}},
                 CellId{2, {3, 0, 0}}});
    EXPECT_EQ(keys_of(leaves_of(g)), expected);
    EXPECT_TRUE(brute_force_graded(g));
}

TEST(Grading, RandomForestsSatisfyCornerRule)
{
    for (int dim = 1; dim <= 3; ++dim) {
        const Domain d(dim, {2, dim >= 2 ? 2 : 1, 1}, dim == 3 ? 4 : 6);
        for (unsigned seed = 0; seed < 6; ++seed) {
            const Forest f = random_forest(d, dim == 3 ? 12 : 25, seed);
            const Forest g = ensure_graded(f);
            EXPECT_TRUE(is_graded(g));
            EXPECT_TRUE(brute_force_graded(g)) << "dim " << dim << " seed " << seed;
            // Monotone: every tree cell of f stays in the tree.
            for (const auto& [key, rec] : f.cells()) {
                EXPECT_TRUE(g.in_tree(Domain::from_key(key)));
            }
            EXPECT_TRUE(ensure_graded(g) == g);
        }
    }
}

TEST(Phantoms, UniformGridHasNone)
{
    const Domain d(2, {2, 1, 1}, 4);
    EXPECT_EQ(insert_phantoms(Forest::uniform(d, 3)).phantom_count(), 0u);
}

TEST(Phantoms, CoarseLeafBesideFineLeaves)
{
    // Level-1 leaf (1,0) beside level-2 leaves (2,2), (2,3).
    const Domain d(1, {1, 1, 1}, 3);
    Forest f(d);
    f.refine(CellId{0, {0, 0, 0}});
    f.refine(CellId{1, {1, 0, 0}});
    const Forest p = insert_phantoms(f);
    EXPECT_EQ(p.phantom_count(), 2u);
    EXPECT_TRUE(p.is_phantom(CellId{2, {0, 0, 0}}));
    EXPECT_TRUE(p.is_phantom(CellId{2, {1, 0, 0}}));
    EXPECT_TRUE(insert_phantoms(p) == p);
}

TEST(Phantoms, FluxStencilsResolve)
{
    for (int dim = 1; dim <= 3; ++dim) {
        const Domain d(dim, {2, 1, 2}, dim == 3 ? 4 : 6);
        for (unsigned seed = 0; seed < 4; ++seed) {
            const Forest f = insert_phantoms(ensure_graded(random_forest(d, 20, seed)));
            for (const CellId& c : leaves_of(f)) {
                for (int a = 0; a < dim; ++a) {
                    for (Side s : {Side::minus, Side::plus}) {
                        const auto n = d.neighbor(c, a, s);
                        if (n) {
                            EXPECT_NE(f.find(*n), nullptr);
                        }
                    }
                }
            }
            // Phantoms are children of leaves.
            for (const auto& [key, rec] : f.cells()) {
                if (rec.kind == CellKind::phantom) {
                    EXPECT_TRUE(f.is_leaf(d.parent(Domain::from_key(key))));
                }
            }
        }
    }
}

TEST(Phantoms, RefinePromotesPhantoms)
{
    const Domain d(1, {1, 1, 1}, 3);
    Forest f(d);
    f.refine(CellId{0, {0, 0, 0}});
    f.refine(CellId{1, {1, 0, 0}});
    add_phantoms(f);
    f.refine(CellId{1, {0, 0, 0}});
    EXPECT_EQ(f.phantom_count(), 0u);
    EXPECT_EQ(f.leaf_count(), 4u);
}

TEST(LeafEnumeration, Bijection)
{
    const Domain d(2, {3, 2, 1}, 5);
    const Forest f = insert_phantoms(ensure_graded(random_forest(d, 30, 7)));
    const LeafMap m = enumerate_leaves(f);
    ASSERT_EQ(m.size(), f.leaf_count());
    for (std::size_t i = 0; i < m.size(); ++i) {
        EXPECT_EQ(m.index(m.cell(i)), static_cast<int>(i));
        EXPECT_TRUE(f.is_leaf(m.cell(i)));
    }
    EXPECT_EQ(m.index(CellId{0, {0, 0, 0}}) < 0, f.is_inner(CellId{0, {0, 0, 0}}));
}

TEST(LeafEnumeration, Deterministic)
{
    const Domain d(2, {2, 2, 1}, 5);
    const Forest a = ensure_graded(random_forest(d, 30, 3));
    const Forest b = ensure_graded(random_forest(d, 30, 3));
    EXPECT_EQ(enumerate_leaves(a).cells(), enumerate_leaves(b).cells());
}

TEST(LeafEnumeration, OneDimensionalUniformIsSpatialOrder)
{
    const Domain d(1, {1, 1, 1}, 4);
    const LeafMap m = enumerate_leaves(Forest::uniform(d, 4));
    for (std::size_t i = 0; i < m.size(); ++i) {
        EXPECT_EQ(m.cell(i), (CellId{4, {static_cast<int>(i), 0, 0}}));
    }
}

TEST(LeafEnumeration, RootMajorThenZOrder)
{
    const Domain d(2, {2, 1, 1}, 3);
    const LeafMap m = enumerate_leaves(Forest::uniform(d, 3));
    std::vector<CellId> expected = m.cells();
    std::sort(expected.begin(), expected.end(), [&](const CellId& a, const CellId& b) {
        const int ra = d.root_index(a);
        const int rb = d.root_index(b);
        if (ra != rb) {
            return ra < rb;
        }
        return morton(CellId{a.level, d.local_index(a)}, 2) < morton(CellId{b.level, d.local_index(b)}, 2);
    });
    EXPECT_EQ(m.cells(), expected);
}

TEST(LeafEnumeration, LeavesTileDomain)
{
    const Domain d(2, {3, 2, 1}, 5, {-0.5, 0.0, 0.0}, {0.5, 0.5, 1.0});
    const Forest f = ensure_graded(random_forest(d, 40, 11));
    double total = 0.0;
    const LeafMap m = enumerate_leaves(f);
    for (const CellId& c : m.cells()) {
        total += d.cell_measure(c.level);
    }
    EXPECT_NEAR(total / d.measure(), 1.0, 1e-12);
}

TEST(ForestDump, OneLinePerCell)
{
    const Domain d(2, {1, 1, 1}, 2);
    Forest f(d);
    f.refine(CellId{0, {0, 0, 0}});
    std::ostringstream out;
    dump_forest(f, out);
    std::istringstream in(out.str());
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) {
        ++lines;
        std::istringstream fields(line);
        std::string kind;
        int root = -1;
        int level = -1;
        fields >> kind >> root >> level;
        EXPECT_TRUE(kind == "leaf" || kind == "inner" || kind == "phantom");
        EXPECT_EQ(root, 0);
    }
    EXPECT_EQ(lines, f.cell_count());
}
