#include "mrpoisson/resolver.hpp"

#include "mrpoisson/error.hpp"

#include <algorithm>

namespace mrpoisson {

void compress(LeafCombination& terms)
{
    std::sort(terms.begin(), terms.end(), [](const LeafTerm& a, const LeafTerm& b) { return a.leaf < b.leaf; });
    std::size_t out = 0;
    for (std::size_t i = 0; i < terms.size();) {
        LeafTerm t = terms[i];
        std::size_t k = i + 1;
        for (; k < terms.size() && terms[k].leaf == t.leaf; ++k) {
            t.weight += terms[k].weight;
        }
        if (t.weight != 0.0) {
            terms[out++] = t;
        }
        i = k;
    }
    terms.resize(out);
}

LeafResolver::LeafResolver(const Forest& forest, const LeafMap& leaves) : forest_(forest), leaves_(leaves)
{
    memo_.reserve(leaves.size() * 2);
}

const LeafCombination& LeafResolver::resolve(const CellId& c)
{
    const CellKey key = Domain::key(c);
    if (const auto it = memo_.find(key); it != memo_.end()) {
        return it->second;
    }
    LeafCombination terms = compute(c);
    return memo_.emplace(key, std::move(terms)).first->second;
}

double LeafResolver::evaluate(const CellId& c, std::span<const double> leaf_values)
{
    double v = 0.0;
    for (const LeafTerm& t : resolve(c)) {
        v += t.weight * leaf_values[static_cast<std::size_t>(t.leaf)];
    }
    return v;
}

LeafCombination LeafResolver::compute(const CellId& c)
{
    const Domain& domain = forest_.domain();
    if (!domain.contains(c)) {
        throw GridError("resolve: cell outside the domain");
    }
    LeafCombination out;
    const CellRecord* rec = forest_.find(c);
    if (rec != nullptr && rec->kind == CellKind::leaf) {
        const int idx = leaves_.index(c);
        if (idx < 0) {
            throw GridError("resolve: leaf missing from the leaf map");
        }
        out.push_back(LeafTerm{idx, 1.0});
        return out;
    }
    if (rec != nullptr && rec->kind == CellKind::inner) {
        const double w = 1.0 / domain.children_per_cell();
        for (int p = 0; p < domain.children_per_cell(); ++p) {
            for (const LeafTerm& t : resolve(domain.child(c, p))) {
                out.push_back(LeafTerm{t.leaf, w * t.weight});
            }
        }
        compress(out);
        return out;
    }
    if (c.level == 0) {
        throw GridError("resolve: missing root cell");
    }
    std::vector<StencilTerm> stencil;
    prediction_stencil(domain, c, stencil);
    for (const StencilTerm& s : stencil) {
        for (const LeafTerm& t : resolve(s.cell)) {
            out.push_back(LeafTerm{t.leaf, s.weight * t.weight});
        }
    }
    compress(out);
    return out;
}

} // namespace mrpoisson
