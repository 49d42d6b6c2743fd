#include "mrpoisson/mra.hpp"

#include "mrpoisson/error.hpp"
#include "mrpoisson/resolver.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace mrpoisson {

LevelField::LevelField(const Domain& domain, int lvl) : level(lvl)
{
    std::size_t n = 1;
    for (int a = 0; a < kMaxDim; ++a) {
        extent[a] = domain.cells_per_axis(lvl, a);
        n *= static_cast<std::size_t>(extent[a]);
    }
    values.assign(n, 0.0);
}

IVec LevelField::position(std::size_t i) const noexcept
{
    const auto n = static_cast<std::size_t>(i);
    const auto ex = static_cast<std::size_t>(extent[0]);
    const auto ey = static_cast<std::size_t>(extent[1]);
    return {static_cast<int>(n % ex), static_cast<int>((n / ex) % ey), static_cast<int>(n / (ex * ey))};
}

double ThresholdSpec::epsilon(int level, int max_level, int dim) const
{
    return std::exp2(0.5 * dim * (level - max_level)) * eta;
}

LevelField sample_midpoints(const Domain& domain, int level, const std::function<double(const RVec&)>& f)
{
    LevelField out(domain, level);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.values[i] = f(domain.cell_center(CellId{level, out.position(i)}));
    }
    return out;
}

LevelField project_level(const Domain& domain, const LevelField& fine)
{
    if (fine.level == 0) {
        throw GridError("project_level: level 0 has no parent level");
    }
    LevelField coarse(domain, fine.level - 1);
    const int dim = domain.dim();
    const double w = 1.0 / domain.children_per_cell();
    for (std::size_t i = 0; i < fine.size(); ++i) {
        IVec k = fine.position(i);
        for (int a = 0; a < dim; ++a) {
            k[a] >>= 1;
        }
        coarse.at(k) += w * fine.values[i];
    }
    return coarse;
}

LevelField predict_level(const Domain& domain, const LevelField& coarse)
{
    LevelField fine(domain, coarse.level + 1);
    std::array<Weights1D, kMaxDim> w;
    for (std::size_t i = 0; i < fine.size(); ++i) {
        const IVec k = fine.position(i);
        for (int a = 0; a < kMaxDim; ++a) {
            w[a] = prediction_weights_1d(k[a] >> 1, coarse.extent[a], k[a] & 1);
        }
        double v = 0.0;
        for (int z = 0; z < w[2].count; ++z) {
            for (int y = 0; y < w[1].count; ++y) {
                const double wyz = w[1].w[y] * w[2].w[z];
                for (int x = 0; x < w[0].count; ++x) {
                    v += w[0].w[x] * wyz * coarse.at(IVec{w[0].first + x, w[1].first + y, w[2].first + z});
                }
            }
        }
        fine.values[i] = v;
    }
    return fine;
}

namespace {

int child_bits(const IVec& k, int dim)
{
    int pos = 0;
    for (int a = 0; a < dim; ++a) {
        pos |= (k[a] & 1) << a;
    }
    return pos;
}

IVec parent_of(IVec k, int dim)
{
    for (int a = 0; a < dim; ++a) {
        k[a] >>= 1;
    }
    return k;
}

std::vector<LevelField> pyramid(const Domain& domain, const LevelField& fine)
{
    std::vector<LevelField> levels(static_cast<std::size_t>(fine.level) + 1);
    levels.back() = fine;
    for (int j = fine.level; j > 0; --j) {
        levels[static_cast<std::size_t>(j) - 1] = project_level(domain, levels[static_cast<std::size_t>(j)]);
    }
    return levels;
}

double max_abs(std::span<const double> v)
{
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m > 0.0 ? m : 1.0;
}

// Refines every cell in `parents` plus their ancestors, then grades and adds phantoms.
Forest build_forest(const Domain& domain, const std::unordered_set<CellKey>& parents, int radius)
{
    std::unordered_set<CellKey> closed;
    for (CellKey key : parents) {
        CellId c = Domain::from_key(key);
        while (closed.insert(Domain::key(c)).second && c.level > 0) {
            c = domain.parent(c);
        }
    }
    std::vector<CellId> order;
    order.reserve(closed.size());
    for (CellKey key : closed) {
        order.push_back(Domain::from_key(key));
    }
    std::sort(order.begin(), order.end(), [](const CellId& a, const CellId& b) {
        return Domain::key(a) < Domain::key(b);
    });
    std::stable_sort(order.begin(), order.end(), [](const CellId& a, const CellId& b) { return a.level < b.level; });
    Forest forest(domain);
    for (const CellId& c : order) {
        forest.refine(c);
    }
    make_graded(forest);
    add_phantoms(forest, radius);
    return forest;
}

} // namespace

MultiScale encode(const Domain& domain, const LevelField& fine)
{
    const int dim = domain.dim();
    const int nc = domain.children_per_cell();
    const std::vector<LevelField> levels = pyramid(domain, fine);
    MultiScale m;
    m.dim = dim;
    m.max_level = fine.level;
    m.coarse = levels.front();
    m.details.resize(static_cast<std::size_t>(fine.level));
    for (int j = 1; j <= fine.level; ++j) {
        const LevelField& parent = levels[static_cast<std::size_t>(j) - 1];
        const LevelField& f = levels[static_cast<std::size_t>(j)];
        const LevelField pred = predict_level(domain, parent);
        std::vector<double>& d = m.details[static_cast<std::size_t>(j) - 1];
        d.assign(parent.size() * static_cast<std::size_t>(nc - 1), 0.0);
        for (std::size_t i = 0; i < f.size(); ++i) {
            const IVec k = f.position(i);
            const int pos = child_bits(k, dim);
            if (pos == nc - 1) {
                continue;
            }
            d[parent.linear(parent_of(k, dim)) * static_cast<std::size_t>(nc - 1) + static_cast<std::size_t>(pos)] =
                f.values[i] - pred.values[i];
        }
    }
    return m;
}

LevelField decode(const Domain& domain, const MultiScale& m)
{
    const int dim = m.dim;
    const int nc = 1 << dim;
    LevelField current = m.coarse;
    for (int j = 1; j <= m.max_level; ++j) {
        LevelField f = predict_level(domain, current);
        const std::vector<double>& d = m.details[static_cast<std::size_t>(j) - 1];
        for (std::size_t i = 0; i < f.size(); ++i) {
            const IVec k = f.position(i);
            const int pos = child_bits(k, dim);
            const std::size_t base = current.linear(parent_of(k, dim)) * static_cast<std::size_t>(nc - 1);
            if (pos < nc - 1) {
                f.values[i] += d[base + static_cast<std::size_t>(pos)];
            } else {
                double sum = 0.0;
                for (int p = 0; p < nc - 1; ++p) {
                    sum += d[base + static_cast<std::size_t>(p)];
                }
                f.values[i] -= sum;
            }
        }
        current = std::move(f);
    }
    return current;
}

Thresholded threshold(const MultiScale& m, const ThresholdSpec& spec, double scale)
{
    Thresholded out;
    out.transform = m;
    out.kept.resize(m.details.size());
    for (std::size_t l = 0; l < m.details.size(); ++l) {
        const double eps = spec.epsilon(static_cast<int>(l) + 1, m.max_level, m.dim) * scale;
        std::vector<double>& d = out.transform.details[l];
        std::vector<std::uint8_t>& kept = out.kept[l];
        kept.assign(d.size(), 0);
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (std::abs(d[i]) >= eps) {
                kept[i] = 1;
                ++out.kept_count;
            } else {
                d[i] = 0.0;
            }
        }
        out.total_count += d.size();
    }
    return out;
}

LevelField approximate(const Domain& domain, const LevelField& fine, const ThresholdSpec& spec, double scale)
{
    return decode(domain, threshold(encode(domain, fine), spec, scale).transform);
}

double norm_l2(const Domain& domain, const LevelField& f)
{
    double sum = 0.0;
    for (double v : f.values) {
        sum += v * v;
    }
    return std::sqrt(sum * domain.cell_measure(f.level) / domain.measure());
}

double norm_l2(const Forest& forest, const LeafMap& leaves, std::span<const double> f)
{
    if (f.size() != leaves.size()) {
        throw GridError("norm_l2: field size does not match the leaf count");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        sum += forest.domain().cell_measure(leaves.cell(i).level) * f[i] * f[i];
    }
    return std::sqrt(sum / forest.domain().measure());
}

AdaptResult adapt_uniform(const Domain& domain, std::span<const LevelField> fields, const ThresholdSpec& spec,
                          const AdaptOptions& options)
{
    if (fields.empty()) {
        throw GridError("adapt_uniform: no fields");
    }
    const int dim = domain.dim();
    const int top = fields.front().level;
    std::vector<std::vector<LevelField>> pyramids;
    std::unordered_set<CellKey> significant;
    for (const LevelField& field : fields) {
        if (field.level != top) {
            throw GridError("adapt_uniform: fields live on different levels");
        }
        const double scale = options.relative ? max_abs(field.values) : 1.0;
        pyramids.push_back(pyramid(domain, field));
        const std::vector<LevelField>& levels = pyramids.back();
        for (int j = 1; j <= top; ++j) {
            const double eps = spec.epsilon(j, top, dim) * scale;
            const LevelField& f = levels[static_cast<std::size_t>(j)];
            const LevelField pred = predict_level(domain, levels[static_cast<std::size_t>(j) - 1]);
            for (std::size_t i = 0; i < f.size(); ++i) {
                if (std::abs(f.values[i] - pred.values[i]) >= eps) {
                    significant.insert(Domain::key(CellId{j - 1, parent_of(f.position(i), dim)}));
                }
            }
        }
    }
    AdaptResult out{build_forest(domain, significant, options.flux_stencil_radius), LeafMap{}, {}};
    out.leaves = enumerate_leaves(out.forest);
    for (const std::vector<LevelField>& levels : pyramids) {
        std::vector<double> v(out.leaves.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            const CellId& c = out.leaves.cell(i);
            v[i] = levels[static_cast<std::size_t>(c.level)].at(c.index);
        }
        out.fields.push_back(std::move(v));
    }
    sync_values(out.forest, out.leaves, out.fields.front());
    return out;
}

namespace {

// Cell averages of every tree cell, with prediction for cells outside the tree.
class TreeValues {
public:
    TreeValues(const Forest& forest, const LeafMap& leaves, std::span<const double> field) : domain_(forest.domain())
    {
        std::vector<CellId> inner;
        for (const auto& [key, rec] : forest.cells()) {
            if (rec.kind == CellKind::inner) {
                inner.push_back(Domain::from_key(key));
            }
        }
        std::sort(inner.begin(), inner.end(), [](const CellId& a, const CellId& b) { return a.level > b.level; });
        for (std::size_t i = 0; i < leaves.size(); ++i) {
            values_[Domain::key(leaves.cell(i))] = field[i];
        }
        const double w = 1.0 / domain_.children_per_cell();
        for (const CellId& c : inner) {
            double v = 0.0;
            for (int p = 0; p < domain_.children_per_cell(); ++p) {
                v += w * values_.at(Domain::key(domain_.child(c, p)));
            }
            values_[Domain::key(c)] = v;
        }
    }

    double operator()(const CellId& c)
    {
        const CellKey key = Domain::key(c);
        if (const auto it = values_.find(key); it != values_.end()) {
            return it->second;
        }
        std::vector<StencilTerm> stencil;
        prediction_stencil(domain_, c, stencil);
        double v = 0.0;
        for (const StencilTerm& s : stencil) {
            v += s.weight * (*this)(s.cell);
        }
        values_[key] = v;
        return v;
    }

private:
    const Domain& domain_;
    std::unordered_map<CellKey, double> values_;
};

} // namespace

AdaptResult adapt(const Forest& forest, const LeafMap& leaves, std::span<const std::vector<double>> fields,
                  const ThresholdSpec& spec, const AdaptOptions& options)
{
    if (fields.empty()) {
        throw GridError("adapt: no fields");
    }
    const Domain& domain = forest.domain();
    const int top = domain.max_level();
    std::vector<CellId> inner;
    for (const auto& [key, rec] : forest.cells()) {
        if (rec.kind == CellKind::inner) {
            inner.push_back(Domain::from_key(key));
        }
    }
    std::vector<TreeValues> values;
    std::unordered_set<CellKey> significant;
    std::vector<StencilTerm> stencil;
    for (const std::vector<double>& field : fields) {
        if (field.size() != leaves.size()) {
            throw GridError("adapt: field size does not match the leaf count");
        }
        const double scale = options.relative ? max_abs(field) : 1.0;
        values.emplace_back(forest, leaves, field);
        TreeValues& tv = values.back();
        for (const CellId& p : inner) {
            const double eps = spec.epsilon(p.level + 1, top, domain.dim()) * scale;
            for (int pos = 0; pos < domain.children_per_cell(); ++pos) {
                const CellId c = domain.child(p, pos);
                prediction_stencil(domain, c, stencil);
                double pred = 0.0;
                for (const StencilTerm& s : stencil) {
                    pred += s.weight * tv(s.cell);
                }
                if (std::abs(tv(c) - pred) >= eps) {
                    significant.insert(Domain::key(p));
                    break;
                }
            }
        }
    }
    AdaptResult out{build_forest(domain, significant, options.flux_stencil_radius), LeafMap{}, {}};
    out.leaves = enumerate_leaves(out.forest);
    for (TreeValues& tv : values) {
        std::vector<double> v(out.leaves.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = tv(out.leaves.cell(i));
        }
        out.fields.push_back(std::move(v));
    }
    sync_values(out.forest, out.leaves, out.fields.front());
    return out;
}

std::vector<double> leaf_averages(const Domain& domain, const LeafMap& leaves, const LevelField& fine)
{
    const std::vector<LevelField> levels = pyramid(domain, fine);
    std::vector<double> out(leaves.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const CellId& c = leaves.cell(i);
        if (c.level > fine.level) {
            throw GridError("leaf_averages: leaf finer than the data");
        }
        out[i] = levels[static_cast<std::size_t>(c.level)].at(c.index);
    }
    return out;
}

void sync_values(Forest& forest, const LeafMap& leaves, std::span<const double> leaf_values)
{
    if (leaf_values.size() != leaves.size()) {
        throw GridError("sync_values: field size does not match the leaf count");
    }
    std::vector<CellId> others;
    for (const auto& [key, rec] : forest.cells()) {
        if (rec.kind != CellKind::leaf) {
            others.push_back(Domain::from_key(key));
        }
    }
    std::vector<double> resolved(others.size());
    {
        LeafResolver resolver(forest, leaves);
        for (std::size_t i = 0; i < others.size(); ++i) {
            resolved[i] = resolver.evaluate(others[i], leaf_values);
        }
    }
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        forest.find(leaves.cell(i))->value = leaf_values[i];
    }
    for (std::size_t i = 0; i < others.size(); ++i) {
        forest.find(others[i])->value = resolved[i];
    }
}

} // namespace mrpoisson
