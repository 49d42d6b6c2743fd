#pragma once

#include "mrpoisson/geometry.hpp"

#include <array>
#include <span>
#include <vector>

namespace mrpoisson {

/// Third-order (s = 1) average-interpolating prediction. Exact for
/// polynomials of degree 2 and consistent with projection: the mean of the
/// predicted children is the parent value.
///
/// Interior rule along one axis:
///   child 2k   = f_k + (f_{k-1} - f_{k+1}) / 8
///   child 2k+1 = f_k + (f_{k+1} - f_{k-1}) / 8
/// Next to the domain boundary the 3-cell stencil is shifted inwards
/// (one-sided, still third order). Grids with fewer than 3 cells along an
/// axis fall back to the widest stencil that fits.
struct Weights1D {
    int first = 0; ///< parent-level index of the first stencil cell
    int count = 0;
    std::array<double, 3> w{0.0, 0.0, 0.0};
};

[[nodiscard]] Weights1D prediction_weights_1d(int parent_index, int parent_cells, int child_bit);

struct StencilTerm {
    CellId cell;
    double weight;
};

/// Coarse-level stencil R_I(child) with tensor-product weights.
void prediction_stencil(const Domain& domain, const CellId& child, std::vector<StencilTerm>& out);

/// Interior prediction from a full (3)^dim stencil given in lexicographic
/// order (x fastest, offsets -1,0,+1). Bit a of `child_position` selects the
/// upper child along axis a.
[[nodiscard]] double predict(std::span<const double> stencil_values, int dim, int child_position);

/// Measure-weighted mean (projection of children onto the parent).
[[nodiscard]] double project(std::span<const double> values, std::span<const double> measures);

} // namespace mrpoisson
