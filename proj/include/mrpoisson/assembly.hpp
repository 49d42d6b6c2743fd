#pragma once

#include "mrpoisson/forest.hpp"
#include "mrpoisson/sparse_matrix.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace mrpoisson {

/// Face-normal gradient stencil. The gradient on the face between the
/// same-level cells at offsets 0 and +1 is sum(w * v(offset)) / h.
struct FluxScheme {
    struct Term {
        int offset;
        double weight;
    };
    std::vector<Term> stencil{{0, -1.0}, {1, 1.0}};

    /// Second-order centred two-point flux.
    [[nodiscard]] static FluxScheme centered() { return {}; }
    /// Farthest same-level cell the stencil reaches from either face cell.
    [[nodiscard]] int radius() const;
    /// Throws ConfigError unless the weights differentiate linears exactly.
    void validate() const;
};

enum class BCKind : std::uint8_t { dirichlet, neumann, symmetry, robin };

/// Boundary data on one face:
///   dirichlet: phi = value
///   neumann:   d phi / dn = value (outward normal)
///   symmetry:  d phi / dn = 0
///   robin:     d phi / dn = -robin_a * phi - value
struct FaceBC {
    BCKind kind = BCKind::neumann;
    double value = 0.0;
    double robin_a = 0.0;

    [[nodiscard]] static FaceBC dirichlet(double v) { return {BCKind::dirichlet, v, 0.0}; }
    [[nodiscard]] static FaceBC neumann(double flux = 0.0) { return {BCKind::neumann, flux, 0.0}; }
    [[nodiscard]] static FaceBC symmetry() { return {BCKind::symmetry, 0.0, 0.0}; }
    [[nodiscard]] static FaceBC robin(double a, double c = 0.0) { return {BCKind::robin, c, a}; }
};

struct BoundaryFace {
    CellId cell;
    int leaf = -1;
    int axis = 0;
    Side side = Side::minus;
    RVec center{0.0, 0.0, 0.0};
};

using BCFunction = std::function<FaceBC(const BoundaryFace&)>;

/// One boundary condition per side of the box.
class BCSpec {
public:
    BCSpec() = default;

    [[nodiscard]] static BCSpec all(const FaceBC& bc);
    [[nodiscard]] static BCSpec all(BCFunction bc);

    BCSpec& set(int axis, Side side, BCFunction bc);
    BCSpec& set(int axis, Side side, const FaceBC& bc);

    /// Throws ConfigError when the side has no condition.
    [[nodiscard]] FaceBC at(const BoundaryFace& face) const;
    [[nodiscard]] bool has(int axis, Side side) const;

private:
    std::array<std::array<BCFunction, 2>, kMaxDim> sides_;
};

/// Outward face gradient written as k * u + c, u the adjacent cell value and
/// h the cell width normal to the face.
struct BoundaryGradient {
    double k = 0.0;
    double c = 0.0;
};

[[nodiscard]] BoundaryGradient boundary_gradient(const FaceBC& bc, double h);
/// Face value implied by the condition and the adjacent cell value.
[[nodiscard]] double boundary_face_value(const FaceBC& bc, double u, double h);

struct OperatorSpec {
    enum class Kind : std::uint8_t { laplace, screened };
    Kind kind = Kind::laplace;
    /// Screening coefficient: the operator is Laplacian - mu2 * identity.
    double mu2 = 0.0;

    [[nodiscard]] static OperatorSpec laplace() { return {}; }
    [[nodiscard]] static OperatorSpec screened(double mu2) { return {Kind::screened, mu2}; }
};

/// A physical face identified by the lower-side cell at the face level.
/// Boundary faces carry their side; interior faces use Side::plus.
struct FaceKey {
    CellId cell;
    int axis = 0;
    Side side = Side::plus;
    bool boundary = false;
};

struct AssemblyCounters {
    std::size_t interior_faces = 0;
    std::size_t coarse_fine_faces = 0;
    std::size_t boundary_faces = 0;
};

struct AssemblyOptions {
    bool record_faces = false;
};

struct Assembly {
    SparseMatrix matrix;
    /// Known boundary terms, already moved to the right-hand side.
    std::vector<double> rhs_bc;
    /// 1 for rows that received a Dirichlet or Robin diagonal term.
    std::vector<std::uint8_t> eliminated;
    AssemblyCounters counters;
    std::vector<FaceKey> faces;
};

/// Operator on the leaves of a graded forest with phantoms. Every face is
/// visited once: same-level faces from the lower cell, coarse/fine faces at
/// the fine level (from the coarse cell when the fine side is above, from
/// the fine cell otherwise). Stencil values of inner cells, phantoms and
/// absent cells are expanded onto leaves by projection and prediction.
[[nodiscard]] Assembly assemble_adapted(const Forest& forest, const LeafMap& leaves, const FluxScheme& scheme,
                                        const OperatorSpec& op, const BCSpec& bc,
                                        const AssemblyOptions& options = {});

/// Direct 3-point (1D) / 5-point (2D) / 7-point (3D) assembly on the full
/// level grid, rows in lexicographic order (x fastest).
[[nodiscard]] Assembly assemble_uniform(const Domain& domain, int level, const OperatorSpec& op, const BCSpec& bc);

/// rhs = source + rhs_bc.
[[nodiscard]] std::vector<double> assemble_rhs(std::span<const double> source, std::span<const double> rhs_bc);

/// Per-leaf cell averages sampled at leaf centres.
[[nodiscard]] std::vector<double> sample_leaves(const Forest& forest, const LeafMap& leaves,
                                                const std::function<double(const RVec&)>& f);

/// E = -grad(phi) per leaf, one vector per axis, from centred differences
/// of same-level neighbour values (boundary ghosts follow `bc`).
[[nodiscard]] std::array<std::vector<double>, kMaxDim> gradient(const Forest& forest, const LeafMap& leaves,
                                                                std::span<const double> phi, const BCSpec& bc);

} // namespace mrpoisson
