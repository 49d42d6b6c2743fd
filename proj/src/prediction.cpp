#include "mrpoisson/prediction.hpp"

#include <algorithm>
#include <cassert>

namespace mrpoisson {

namespace {

// Rows: child bit (0 = lower half, 1 = upper half). All entries are exact in binary.
constexpr double kCentered[2][3] = {{0.125, 1.0, -0.125}, {-0.125, 1.0, 0.125}};
constexpr double kLowerEdge[2][3] = {{1.375, -0.5, 0.125}, {0.625, 0.5, -0.125}};
constexpr double kUpperEdge[2][3] = {{-0.125, 0.5, 0.625}, {0.125, -0.5, 1.375}};
constexpr double kTwoCells[2][2][2] = {{{1.25, -0.25}, {0.75, 0.25}}, {{0.25, 0.75}, {-0.25, 1.25}}};

} // namespace

Weights1D prediction_weights_1d(int parent_index, int parent_cells, int child_bit)
{
    Weights1D out;
    if (parent_cells == 1) {
        out.first = 0;
        out.count = 1;
        out.w = {1.0, 0.0, 0.0};
        return out;
    }
    if (parent_cells == 2) {
        out.first = 0;
        out.count = 2;
        out.w = {kTwoCells[parent_index][child_bit][0], kTwoCells[parent_index][child_bit][1], 0.0};
        return out;
    }
    const int centre = std::clamp(parent_index, 1, parent_cells - 2);
    out.first = centre - 1;
    out.count = 3;
    const double(*table)[3] = kCentered;
    if (parent_index < centre) {
        table = kLowerEdge;
    } else if (parent_index > centre) {
        table = kUpperEdge;
    }
    out.w = {table[child_bit][0], table[child_bit][1], table[child_bit][2]};
    return out;
}

void prediction_stencil(const Domain& domain, const CellId& child, std::vector<StencilTerm>& out)
{
    out.clear();
    const int dim = domain.dim();
    const int parent_level = child.level - 1;
    std::array<Weights1D, kMaxDim> w;
    for (int a = 0; a < kMaxDim; ++a) {
        if (a < dim) {
            w[a] = prediction_weights_1d(child.index[a] >> 1, domain.cells_per_axis(parent_level, a),
                                         child.index[a] & 1);
        } else {
            w[a] = Weights1D{0, 1, {1.0, 0.0, 0.0}};
        }
    }
    for (int k = 0; k < w[2].count; ++k) {
        for (int j = 0; j < w[1].count; ++j) {
            for (int i = 0; i < w[0].count; ++i) {
                const double weight = w[0].w[i] * w[1].w[j] * w[2].w[k];
                out.push_back(StencilTerm{
                    CellId{parent_level, {w[0].first + i, w[1].first + j, w[2].first + k}}, weight});
            }
        }
    }
}

double predict(std::span<const double> stencil_values, int dim, int child_position)
{
    assert(static_cast<int>(stencil_values.size()) == (dim == 1 ? 3 : dim == 2 ? 9 : 27));
    double sum = 0.0;
    const int ny = dim >= 2 ? 3 : 1;
    const int nz = dim >= 3 ? 3 : 1;
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < 3; ++i) {
                double weight = kCentered[child_position & 1][i];
                if (dim >= 2) {
                    weight *= kCentered[(child_position >> 1) & 1][j];
                }
                if (dim >= 3) {
                    weight *= kCentered[(child_position >> 2) & 1][k];
                }
                sum += weight * stencil_values[static_cast<std::size_t>(i + 3 * (j + 3 * k))];
            }
        }
    }
    return sum;
}

double project(std::span<const double> values, std::span<const double> measures)
{
    double total = 0.0;
    double weighted = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        weighted += measures[i] * values[i];
        total += measures[i];
    }
    return weighted / total;
}

} // namespace mrpoisson
