#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/learners.hpp"

namespace ratl {

enum class BalanceStrategy { none, under, smote_under };

struct BalanceConfig {
    BalanceStrategy strategy = BalanceStrategy::none;
    int smote_k = 5;         // neighbors considered per minority sample
    int smote_percent = 100; // multiples of 100; 100 = one synthetic per sample
    std::uint64_t seed = 0;
};

// Draws majority samples uniformly without replacement down to the minority
// count; minority samples are all kept. Requires exactly two classes.
Dataset undersample(const Dataset& dataset, std::uint64_t seed);

// x + u*(nn - x) with u in [0,1): a convex combination, so counts stay
// non-negative. Zero coordinates are dropped to keep the sparse invariant.
SparseCountVector interpolate(const SparseCountVector& x, const SparseCountVector& neighbor,
                              double u);

// Appends smote_percent/100 synthetic minority samples per minority sample,
// each interpolated towards one of its k nearest minority neighbors
// (Euclidean). k is clamped to count-1 when the minority class is small.
Dataset smote(const Dataset& dataset, int minority_class, const BalanceConfig& config);

// SMOTE on the minority class, then majority under-sampled to the grown
// minority count. When the majority is already smaller it is kept whole and a
// warning is recorded.
Dataset smote_plus_undersample(const Dataset& dataset, const BalanceConfig& config,
                               std::vector<std::string>* warnings = nullptr);

// Dispatch on config.strategy; none returns the dataset unchanged.
Dataset apply_balance(const Dataset& dataset, const BalanceConfig& config,
                      std::vector<std::string>* warnings = nullptr);

} // namespace ratl
