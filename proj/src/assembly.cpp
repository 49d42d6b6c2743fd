#include "mrpoisson/assembly.hpp"

#include "mrpoisson/error.hpp"
#include "mrpoisson/resolver.hpp"

#include <cmath>
#include <string>

namespace mrpoisson {

int FluxScheme::radius() const
{
    int r = 0;
    for (const Term& t : stencil) {
        r = std::max({r, t.offset <= 0 ? 1 - t.offset : t.offset});
    }
    return r;
}

void FluxScheme::validate() const
{
    double sum = 0.0;
    double moment = 0.0;
    for (const Term& t : stencil) {
        sum += t.weight;
        moment += t.weight * (t.offset - 0.5);
    }
    if (stencil.empty() || std::abs(sum) > 1e-14 || std::abs(moment - 1.0) > 1e-14) {
        throw ConfigError("flux scheme does not approximate a first derivative");
    }
}

BCSpec BCSpec::all(const FaceBC& bc)
{
    return all(BCFunction([bc](const BoundaryFace&) { return bc; }));
}

BCSpec BCSpec::all(BCFunction bc)
{
    BCSpec spec;
    for (auto& axis : spec.sides_) {
        axis = {bc, bc};
    }
    return spec;
}

BCSpec& BCSpec::set(int axis, Side side, BCFunction bc)
{
    sides_.at(static_cast<std::size_t>(axis))[static_cast<std::size_t>(side)] = std::move(bc);
    return *this;
}

BCSpec& BCSpec::set(int axis, Side side, const FaceBC& bc)
{
    return set(axis, side, BCFunction([bc](const BoundaryFace&) { return bc; }));
}

bool BCSpec::has(int axis, Side side) const
{
    return static_cast<bool>(sides_.at(static_cast<std::size_t>(axis))[static_cast<std::size_t>(side)]);
}

FaceBC BCSpec::at(const BoundaryFace& face) const
{
    const BCFunction& fn = sides_.at(static_cast<std::size_t>(face.axis))[static_cast<std::size_t>(face.side)];
    if (!fn) {
        throw ConfigError("no boundary condition on axis " + std::to_string(face.axis) +
                          (face.side == Side::minus ? " (-)" : " (+)"));
    }
    return fn(face);
}

BoundaryGradient boundary_gradient(const FaceBC& bc, double h)
{
    switch (bc.kind) {
    case BCKind::dirichlet:
        return {-2.0 / h, 2.0 * bc.value / h};
    case BCKind::neumann:
        return {0.0, bc.value};
    case BCKind::symmetry:
        return {0.0, 0.0};
    case BCKind::robin: {
        const double denom = 1.0 + 0.5 * bc.robin_a * h;
        return {-bc.robin_a / denom, -bc.value / denom};
    }
    }
    return {};
}

double boundary_face_value(const FaceBC& bc, double u, double h)
{
    switch (bc.kind) {
    case BCKind::dirichlet:
        return bc.value;
    case BCKind::neumann:
        return u + 0.5 * h * bc.value;
    case BCKind::symmetry:
        return u;
    case BCKind::robin:
        return (u - 0.5 * h * bc.value) / (1.0 + 0.5 * bc.robin_a * h);
    }
    return u;
}

namespace {

std::string describe(const CellId& c)
{
    std::string s = "level " + std::to_string(c.level) + " index (";
    s += std::to_string(c.index[0]) + "," + std::to_string(c.index[1]) + "," + std::to_string(c.index[2]) + ")";
    return s;
}

class AdaptedBuilder {
public:
    AdaptedBuilder(const Forest& forest, const LeafMap& leaves, const FluxScheme& scheme, Assembly& out)
        : forest_(forest), domain_(forest.domain()), resolver_(forest, leaves), scheme_(scheme), out_(out)
    {
    }

    // Flux through the face between `lower` and its + neighbour along `axis`,
    // added to row `lo` and subtracted from row `hi`, each scaled by |face| / |cell|.
    void face(const CellId& lower, int axis, int lo, double scale_lo, int hi, double scale_hi)
    {
        const double inv_h = 1.0 / domain_.cell_size(lower.level, axis);
        for (const FluxScheme::Term& t : scheme_.stencil) {
            IVec off{0, 0, 0};
            off[axis] = t.offset;
            const auto member = domain_.shifted(lower, off);
            if (!member) {
                throw GridError("flux stencil of " + describe(lower) + " leaves the domain");
            }
            if (forest_.find(*member) == nullptr) {
                throw GridError("unresolved flux stencil member " + describe(*member));
            }
            const double coef = t.weight * inv_h;
            for (const LeafTerm& term : resolver_.resolve(*member)) {
                out_.matrix.add(lo, term.leaf, scale_lo * coef * term.weight);
                out_.matrix.add(hi, term.leaf, -scale_hi * coef * term.weight);
            }
        }
    }

private:
    const Forest& forest_;
    const Domain& domain_;
    LeafResolver resolver_;
    const FluxScheme& scheme_;
    Assembly& out_;
};

void add_boundary_face(const Domain& domain, const BCSpec& bc, const CellId& cell, int row, int axis, Side side,
                       Assembly& out)
{
    const double h = domain.cell_size(cell.level, axis);
    const BoundaryFace face{cell, row, axis, side, domain.face_center(cell, axis, side)};
    const FaceBC cond = bc.at(face);
    const BoundaryGradient g = boundary_gradient(cond, h);
    const double scale = 1.0 / h;
    if (g.k != 0.0) {
        out.matrix.add(row, row, scale * g.k);
    }
    out.rhs_bc[static_cast<std::size_t>(row)] -= scale * g.c;
    if (cond.kind == BCKind::dirichlet || cond.kind == BCKind::robin) {
        out.eliminated[static_cast<std::size_t>(row)] = 1;
    }
    ++out.counters.boundary_faces;
}

} // namespace

Assembly assemble_adapted(const Forest& forest, const LeafMap& leaves, const FluxScheme& scheme,
                          const OperatorSpec& op, const BCSpec& bc, const AssemblyOptions& options)
{
    scheme.validate();
    const Domain& domain = forest.domain();
    const std::size_t n = leaves.size();
    if (n == 0) {
        throw GridError("assemble_adapted: forest has no leaves");
    }
    Assembly out;
    out.matrix = SparseMatrix(n);
    out.rhs_bc.assign(n, 0.0);
    out.eliminated.assign(n, 0);
    AdaptedBuilder builder(forest, leaves, scheme, out);
    const int nc = domain.children_per_cell();
    for (std::size_t i = 0; i < n; ++i) {
        const int row = static_cast<int>(i);
        const CellId& cell = leaves.cell(i);
        for (int axis = 0; axis < domain.dim(); ++axis) {
            for (Side side : {Side::minus, Side::plus}) {
                if (!domain.neighbor(cell, axis, side)) {
                    add_boundary_face(domain, bc, cell, row, axis, side, out);
                    if (options.record_faces) {
                        out.faces.push_back(FaceKey{cell, axis, side, true});
                    }
                }
            }
            const auto next = domain.neighbor(cell, axis, Side::plus);
            if (!next) {
                continue;
            }
            const double scale = 1.0 / domain.cell_size(cell.level, axis);
            const CellRecord* rec = forest.find(*next);
            if (rec != nullptr && rec->kind == CellKind::leaf) {
                builder.face(cell, axis, row, scale, leaves.index(*next), scale);
                ++out.counters.interior_faces;
                if (options.record_faces) {
                    out.faces.push_back(FaceKey{cell, axis, Side::plus, false});
                }
            } else if (rec != nullptr && rec->kind == CellKind::inner) {
                // Finer neighbour: one subface per pair of touching children.
                const double fine_scale = 1.0 / domain.cell_size(cell.level + 1, axis);
                const double face_ratio = domain.face_measure(cell.level + 1, axis) / domain.face_measure(cell.level, axis);
                for (int pos = 0; pos < nc; ++pos) {
                    if (((pos >> axis) & 1) == 0) {
                        continue;
                    }
                    const CellId lower = domain.child(cell, pos);
                    const CellId upper = domain.child(*next, pos & ~(1 << axis));
                    const int hi = leaves.index(upper);
                    if (hi < 0) {
                        throw GridError("non-leaf cell " + describe(upper) + " across a coarse/fine face");
                    }
                    builder.face(lower, axis, row, scale * face_ratio, hi, fine_scale);
                    ++out.counters.coarse_fine_faces;
                    if (options.record_faces) {
                        out.faces.push_back(FaceKey{lower, axis, Side::plus, false});
                    }
                }
            } else {
                // Coarser neighbour: the face lives at this level, the coarse
                // side is represented by a phantom of the covering leaf.
                const CellId coarse = forest.covering_cell(*next);
                const int hi = leaves.index(coarse);
                if (hi < 0) {
                    throw GridError("no leaf covers " + describe(*next));
                }
                const double face_ratio = domain.face_measure(cell.level, axis) / domain.face_measure(coarse.level, axis);
                const double coarse_scale = face_ratio / domain.cell_size(coarse.level, axis);
                builder.face(cell, axis, row, scale, hi, coarse_scale);
                ++out.counters.coarse_fine_faces;
                if (options.record_faces) {
                    out.faces.push_back(FaceKey{cell, axis, Side::plus, false});
                }
            }
        }
        if (op.kind == OperatorSpec::Kind::screened) {
            out.matrix.add(row, row, -op.mu2);
        }
    }
    out.matrix.finalize();
    return out;
}

Assembly assemble_uniform(const Domain& domain, int level, const OperatorSpec& op, const BCSpec& bc)
{
    const int dim = domain.dim();
    IVec extent{1, 1, 1};
    std::size_t n = 1;
    for (int a = 0; a < dim; ++a) {
        extent[a] = domain.cells_per_axis(level, a);
        n *= static_cast<std::size_t>(extent[a]);
    }
    Assembly out;
    out.matrix = SparseMatrix(n);
    out.rhs_bc.assign(n, 0.0);
    out.eliminated.assign(n, 0);
    auto linear = [&](const IVec& k) { return k[0] + extent[0] * (k[1] + extent[1] * k[2]); };
    IVec k{0, 0, 0};
    for (k[2] = 0; k[2] < extent[2]; ++k[2]) {
        for (k[1] = 0; k[1] < extent[1]; ++k[1]) {
            for (k[0] = 0; k[0] < extent[0]; ++k[0]) {
                const int row = linear(k);
                for (int a = 0; a < dim; ++a) {
                    const double h = domain.cell_size(level, a);
                    const double w = (1.0 / h) * (1.0 / h);
                    for (Side side : {Side::minus, Side::plus}) {
                        IVec nb = k;
                        nb[a] += side == Side::plus ? 1 : -1;
                        if (nb[a] >= 0 && nb[a] < extent[a]) {
                            out.matrix.add(row, row, -w);
                            out.matrix.add(row, linear(nb), w);
                        } else {
                            add_boundary_face(domain, bc, CellId{level, k}, row, a, side, out);
                        }
                    }
                }
                if (op.kind == OperatorSpec::Kind::screened) {
                    out.matrix.add(row, row, -op.mu2);
                }
            }
        }
    }
    out.matrix.finalize();
    return out;
}

std::vector<double> assemble_rhs(std::span<const double> source, std::span<const double> rhs_bc)
{
    if (source.size() != rhs_bc.size()) {
        throw Error("assemble_rhs: source has " + std::to_string(source.size()) + " entries, expected " +
                    std::to_string(rhs_bc.size()));
    }
    std::vector<double> rhs(source.begin(), source.end());
    for (std::size_t i = 0; i < rhs.size(); ++i) {
        rhs[i] += rhs_bc[i];
    }
    return rhs;
}

std::vector<double> sample_leaves(const Forest& forest, const LeafMap& leaves,
                                  const std::function<double(const RVec&)>& f)
{
    std::vector<double> out(leaves.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = f(forest.domain().cell_center(leaves.cell(i)));
    }
    return out;
}

std::array<std::vector<double>, kMaxDim> gradient(const Forest& forest, const LeafMap& leaves,
                                                  std::span<const double> phi, const BCSpec& bc)
{
    if (phi.size() != leaves.size()) {
        throw GridError("gradient: field size does not match the leaf count");
    }
    const Domain& domain = forest.domain();
    LeafResolver resolver(forest, leaves);
    std::array<std::vector<double>, kMaxDim> e;
    for (int a = 0; a < kMaxDim; ++a) {
        e[a].assign(leaves.size(), 0.0);
    }
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        const CellId& cell = leaves.cell(i);
        const double u = phi[i];
        for (int a = 0; a < domain.dim(); ++a) {
            const double h = domain.cell_size(cell.level, a);
            double v[2];
            for (Side side : {Side::minus, Side::plus}) {
                double& out = v[static_cast<int>(side)];
                if (const auto nb = domain.neighbor(cell, a, side)) {
                    out = resolver.evaluate(*nb, phi);
                } else {
                    const BoundaryFace face{cell, static_cast<int>(i), a, side, domain.face_center(cell, a, side)};
                    const BoundaryGradient g = boundary_gradient(bc.at(face), h);
                    out = u + h * (g.k * u + g.c);
                }
            }
            e[a][i] = -(v[1] - v[0]) / (2.0 * h);
        }
    }
    return e;
}

} // namespace mrpoisson
