#include "mrpoisson/sp3.hpp"

#include "mrpoisson/error.hpp"

#include <cmath>

namespace mrpoisson {

Sp3Constants Sp3Constants::standard()
{
    const double r65 = std::sqrt(6.0 / 5.0);
    const double r56 = std::sqrt(5.0 / 6.0);
    Sp3Constants k;
    k.kappa = {(3.0 + 2.0 * r65) / 7.0, (3.0 - 2.0 * r65) / 7.0};
    k.alpha = {5.0 / 96.0 * (34.0 + 11.0 * r65), 5.0 / 96.0 * (34.0 - 11.0 * r65)};
    k.beta = {5.0 / 96.0 * (2.0 + r65), 5.0 / 96.0 * (2.0 - r65)};
    k.gamma = {5.0 / 7.0 * (1.0 + 3.0 * r56), 5.0 / 7.0 * (1.0 - 3.0 * r56)};
    return k;
}

std::array<PhotoGroup, 3> three_group_parameters()
{
    return {PhotoGroup{0.0067, 0.0447}, PhotoGroup{0.0346, 0.1121}, PhotoGroup{0.3059, 0.5994}};
}

void PhysicalParams::validate() const
{
    if (!(p_o2 > 0.0) || !(p > 0.0) || !(p_q > 0.0)) {
        throw ConfigError("pressures must be positive");
    }
    if (!(xi > 0.0) || !(c > 0.0)) {
        throw ConfigError("xi and c must be positive");
    }
}

namespace {

std::size_t face_slot(std::size_t leaf, int axis, Side side)
{
    return leaf * 2 * kMaxDim + static_cast<std::size_t>(axis) * 2 + static_cast<std::size_t>(side);
}

struct Equation {
    double mu2 = 0.0;
    double robin_a = 0.0;
    double rhs_scale = 0.0;
    std::vector<double> coupling;
    std::vector<double> face_values;
};

BCSpec equation_bc(const Equation& eq, Sp3Boundary boundary)
{
    if (boundary == Sp3Boundary::neumann) {
        return BCSpec::all(FaceBC::neumann());
    }
    return BCSpec::all(BCFunction([&eq](const BoundaryFace& f) {
        return FaceBC::robin(eq.robin_a, eq.coupling[face_slot(static_cast<std::size_t>(f.leaf), f.axis, f.side)]);
    }));
}

SolveReport solve_equation(const Forest& forest, const LeafMap& leaves, const Equation& eq,
                           std::span<const double> source, const Sp3Options& options, std::vector<double>& phi)
{
    const BCSpec bc = equation_bc(eq, options.boundary);
    const Assembly sys =
        assemble_adapted(forest, leaves, FluxScheme::centered(), OperatorSpec::screened(eq.mu2), bc);
    std::vector<double> f(source.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        f[i] = eq.rhs_scale * source[i];
    }
    const std::vector<double> rhs = assemble_rhs(f, sys.rhs_bc);
    SolveReport rep = solve(sys.matrix, rhs, phi, options.solver);
    if (!rep.converged) {
        throw SolverError("sp3: screened solve did not converge (" + rep.message + ")");
    }
    return rep;
}

void update_face_values(const Forest& forest, const LeafMap& leaves, Equation& eq, std::span<const double> phi)
{
    const Domain& domain = forest.domain();
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        const CellId& c = leaves.cell(i);
        for (int a = 0; a < domain.dim(); ++a) {
            for (Side side : {Side::minus, Side::plus}) {
                if (!domain.neighbor(c, a, side)) {
                    const std::size_t slot = face_slot(i, a, side);
                    eq.face_values[slot] = boundary_face_value(FaceBC::robin(eq.robin_a, eq.coupling[slot]), phi[i],
                                                               domain.cell_size(c.level, a));
                }
            }
        }
    }
}

double relative_update(std::span<const double> old1, std::span<const double> new1, std::span<const double> old2,
                       std::span<const double> new2)
{
    double diff = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < new1.size(); ++i) {
        diff += (new1[i] - old1[i]) * (new1[i] - old1[i]) + (new2[i] - old2[i]) * (new2[i] - old2[i]);
        norm += new1[i] * new1[i] + new2[i] * new2[i];
    }
    return norm > 0.0 ? std::sqrt(diff / norm) : std::sqrt(diff);
}

} // namespace

GroupSolution sp3_solve_group(const Forest& forest, const LeafMap& leaves, const PhotoGroup& group,
                              const PhysicalParams& params, std::span<const double> source,
                              const Sp3Options& options)
{
    params.validate();
    if (source.size() != leaves.size()) {
        throw Error("sp3: source size does not match the leaf count");
    }
    const Sp3Constants k = Sp3Constants::standard();
    const double lp = group.lambda * params.p_o2;
    std::array<Equation, 2> eq;
    for (int n = 0; n < 2; ++n) {
        const double kappa2 = k.kappa[n] * k.kappa[n];
        eq[n].mu2 = lp * lp / kappa2;
        eq[n].robin_a = lp * k.alpha[n];
        eq[n].rhs_scale = -lp / kappa2 * params.quenching();
        eq[n].coupling.assign(leaves.size() * 2 * kMaxDim, 0.0);
        eq[n].face_values.assign(leaves.size() * 2 * kMaxDim, 0.0);
    }
    GroupSolution out;
    out.reports.push_back(solve_equation(forest, leaves, eq[0], source, options, out.phi1));
    out.reports.push_back(solve_equation(forest, leaves, eq[1], source, options, out.phi2));
    if (options.boundary == Sp3Boundary::neumann) {
        return out;
    }
    update_face_values(forest, leaves, eq[0], out.phi1);
    update_face_values(forest, leaves, eq[1], out.phi2);
    for (int it = 0; it < options.max_corrections; ++it) {
        const std::vector<double> old1 = out.phi1;
        const std::vector<double> old2 = out.phi2;
        for (std::size_t s = 0; s < eq[0].coupling.size(); ++s) {
            eq[0].coupling[s] = lp * k.beta[1] * eq[1].face_values[s];
        }
        out.reports.push_back(solve_equation(forest, leaves, eq[0], source, options, out.phi1));
        update_face_values(forest, leaves, eq[0], out.phi1);
        for (std::size_t s = 0; s < eq[1].coupling.size(); ++s) {
            eq[1].coupling[s] = lp * k.beta[0] * eq[0].face_values[s];
        }
        out.reports.push_back(solve_equation(forest, leaves, eq[1], source, options, out.phi2));
        update_face_values(forest, leaves, eq[1], out.phi2);
        ++out.iterations;
        out.updates.push_back(relative_update(old1, out.phi1, old2, out.phi2));
        if (out.updates.back() < options.update_tol) {
            break;
        }
    }
    return out;
}

std::vector<double> photon_isotropic(std::span<const double> phi1, std::span<const double> phi2)
{
    if (phi1.size() != phi2.size()) {
        throw Error("photon_isotropic: field sizes differ");
    }
    const Sp3Constants k = Sp3Constants::standard();
    const double g1 = k.gamma[0];
    const double g2 = k.gamma[1];
    std::vector<double> psi(phi1.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        psi[i] = (g2 * phi1[i] - g1 * phi2[i]) / (g2 - g1);
    }
    return psi;
}

std::vector<double> photo_source(std::span<const std::vector<double>> psi, std::span<const PhotoGroup> groups,
                                 const PhysicalParams& params)
{
    if (psi.size() != groups.size()) {
        throw Error("photo_source: one field per group expected");
    }
    std::vector<double> s(psi.empty() ? 0 : psi.front().size(), 0.0);
    for (std::size_t l = 0; l < psi.size(); ++l) {
        if (psi[l].size() != s.size()) {
            throw Error("photo_source: field sizes differ");
        }
        const double w = groups[l].a * params.xi * params.p_o2 * params.c;
        for (std::size_t i = 0; i < s.size(); ++i) {
            s[i] += w * psi[l][i];
        }
    }
    return s;
}

} // namespace mrpoisson
