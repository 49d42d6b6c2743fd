#pragma once

#include "mrpoisson/forest.hpp"
#include "mrpoisson/prediction.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace mrpoisson {

/// Cell averages on the complete level-`level` grid, x fastest.
struct LevelField {
    int level = 0;
    IVec extent{1, 1, 1};
    std::vector<double> values;

    LevelField() = default;
    LevelField(const Domain& domain, int level);

    [[nodiscard]] std::size_t linear(const IVec& k) const noexcept
    {
        return static_cast<std::size_t>(k[0] + extent[0] * (k[1] + extent[1] * k[2]));
    }
    [[nodiscard]] IVec position(std::size_t i) const noexcept;
    [[nodiscard]] double& at(const IVec& k) noexcept { return values[linear(k)]; }
    [[nodiscard]] double at(const IVec& k) const noexcept { return values[linear(k)]; }
    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
};

/// Level-dependent thresholds eps_j = 2^{d (j - J) / 2} * eta.
struct ThresholdSpec {
    double eta = 0.0;

    [[nodiscard]] double epsilon(int level, int max_level, int dim) const;
};

/// m_J = (f_0, d_1, ..., d_J). Per parent only the first 2^d - 1 child
/// details are kept; the last one follows from the zero-sum property.
struct MultiScale {
    int dim = 1;
    int max_level = 0;
    LevelField coarse;
    /// details[j - 1] holds the level-j details, parent-major.
    std::vector<std::vector<double>> details;
};

struct Thresholded {
    MultiScale transform;
    /// kept[j - 1][i] is 1 when details[j - 1][i] survived.
    std::vector<std::vector<std::uint8_t>> kept;
    std::size_t kept_count = 0;
    std::size_t total_count = 0;
};

[[nodiscard]] LevelField sample_midpoints(const Domain& domain, int level,
                                          const std::function<double(const RVec&)>& f);

[[nodiscard]] LevelField project_level(const Domain& domain, const LevelField& fine);
[[nodiscard]] LevelField predict_level(const Domain& domain, const LevelField& coarse);

[[nodiscard]] MultiScale encode(const Domain& domain, const LevelField& fine);
[[nodiscard]] LevelField decode(const Domain& domain, const MultiScale& m);

/// Zeroes every detail with |d| < eps_j * scale. `scale` is the field
/// normalisation (1 for absolute thresholds).
[[nodiscard]] Thresholded threshold(const MultiScale& m, const ThresholdSpec& spec, double scale = 1.0);

/// A_Lambda f = decode(threshold(encode(f))).
[[nodiscard]] LevelField approximate(const Domain& domain, const LevelField& fine, const ThresholdSpec& spec,
                                     double scale = 1.0);

/// Normalised L2 norm of the piecewise-constant function:
/// sqrt(sum |cell| f^2 / |domain|).
[[nodiscard]] double norm_l2(const Domain& domain, const LevelField& f);
[[nodiscard]] double norm_l2(const Forest& forest, const LeafMap& leaves, std::span<const double> f);

struct AdaptOptions {
    /// Compare details against eps_j * max|f| instead of eps_j.
    bool relative = true;
    int flux_stencil_radius = 1;
};

struct AdaptResult {
    Forest forest;
    LeafMap leaves;
    /// Input fields transferred to the new leaves, in leaf-map order.
    std::vector<std::vector<double>> fields;
};

/// Coarsens `forest` wherever every field's details fall below the
/// thresholds, then grades the result and inserts phantoms. Values move by
/// projection (coarsening) or prediction (cells added by grading).
[[nodiscard]] AdaptResult adapt(const Forest& forest, const LeafMap& leaves,
                                std::span<const std::vector<double>> fields, const ThresholdSpec& spec,
                                const AdaptOptions& options = {});

/// Same rule applied to complete fine-grid data at the domain's max level.
[[nodiscard]] AdaptResult adapt_uniform(const Domain& domain, std::span<const LevelField> fields,
                                        const ThresholdSpec& spec, const AdaptOptions& options = {});

/// Leaf averages of complete data given on a level at least as fine as
/// every leaf.
[[nodiscard]] std::vector<double> leaf_averages(const Domain& domain, const LeafMap& leaves, const LevelField& fine);

/// Writes leaf values into the forest records, then recomputes inner cells
/// by projection and phantoms by prediction.
void sync_values(Forest& forest, const LeafMap& leaves, std::span<const double> leaf_values);

} // namespace mrpoisson
