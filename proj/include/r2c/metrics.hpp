#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "r2c/common.hpp"

namespace r2c {

/// Pair-level agreement counts between two labelings of the same items:
/// a = co-clustered in both, b = first only, c = second only, d_ = neither.
struct PairCounts {
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::int64_t c = 0;
    std::int64_t d_ = 0;

    std::int64_t total() const { return a + b + c + d_; }
};

struct AgreementMetrics {
    double ri = 0.0;
    double ari = 0.0;
    double ji = 0.0;
    double fmi = 0.0;
};

/// Cluster-by-class contingency table. Row i corresponds to the i-th
/// smallest label value, column j to the j-th smallest truth value.
struct ContingencyTable {
    std::vector<int> row_values;
    std::vector<int> col_values;
    std::vector<std::int64_t> counts;  // row-major rows x cols
    std::int64_t n = 0;

    std::int64_t at(std::size_t i, std::size_t j) const { return counts[i * col_values.size() + j]; }
    std::vector<std::int64_t> row_sums() const;
    std::vector<std::int64_t> col_sums() const;
};

/// Exact pair counts via contingency-table combinatorics (no O(n^2) pass).
PairCounts pair_counts(std::span<const int> labels_a, std::span<const int> labels_b);

/// RI, ARI (Hubert-Arabie), JI and FMI. JI and FMI are 0 when their
/// denominators vanish; ARI is computed in exact integer arithmetic.
AgreementMetrics agreement_metrics(std::span<const int> labels_a, std::span<const int> labels_b);

ContingencyTable confusion_matrix(std::span<const int> labels, std::span<const int> truth);

}  // namespace r2c
