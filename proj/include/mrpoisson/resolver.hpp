#pragma once

#include "mrpoisson/forest.hpp"
#include "mrpoisson/prediction.hpp"

#include <span>
#include <unordered_map>
#include <vector>

namespace mrpoisson {

struct LeafTerm {
    int leaf;
    double weight;
};

using LeafCombination = std::vector<LeafTerm>;

/// Writes the cell average of any cell of the domain as a finite linear
/// combination of leaf values:
///   leaf              -> itself
///   inner cell        -> projection of its children
///   phantom / absent  -> prediction from the parent level, recursively
/// Results are memoised, so one resolver per assembly keeps the cost linear
/// in the number of leaves.
class LeafResolver {
public:
    LeafResolver(const Forest& forest, const LeafMap& leaves);

    [[nodiscard]] const LeafCombination& resolve(const CellId& c);
    [[nodiscard]] double evaluate(const CellId& c, std::span<const double> leaf_values);

    [[nodiscard]] std::size_t cached() const noexcept { return memo_.size(); }
    [[nodiscard]] const Forest& forest() const noexcept { return forest_; }
    [[nodiscard]] const LeafMap& leaves() const noexcept { return leaves_; }

private:
    LeafCombination compute(const CellId& c);

    const Forest& forest_;
    const LeafMap& leaves_;
    std::unordered_map<CellKey, LeafCombination> memo_;
};

/// Sorts by leaf index and merges duplicates; exact zeros are dropped.
void compress(LeafCombination& terms);

} // namespace mrpoisson
