#include "r2c/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace r2c {

namespace {

std::int64_t choose2(std::int64_t x) { return x * (x - 1) / 2; }

}  // namespace

std::vector<std::int64_t> ContingencyTable::row_sums() const {
    std::vector<std::int64_t> sums(row_values.size(), 0);
    for (std::size_t i = 0; i < row_values.size(); ++i)
        for (std::size_t j = 0; j < col_values.size(); ++j) sums[i] += at(i, j);
    return sums;
}

std::vector<std::int64_t> ContingencyTable::col_sums() const {
    std::vector<std::int64_t> sums(col_values.size(), 0);
    for (std::size_t i = 0; i < row_values.size(); ++i)
        for (std::size_t j = 0; j < col_values.size(); ++j) sums[j] += at(i, j);
    return sums;
}

ContingencyTable confusion_matrix(std::span<const int> labels, std::span<const int> truth) {
    if (labels.size() != truth.size())
        throw LengthMismatch("confusion_matrix: label vectors differ in length");

    std::map<int, std::size_t> row_index, col_index;
    for (int v : labels) row_index.emplace(v, 0);
    for (int v : truth) col_index.emplace(v, 0);

    ContingencyTable table;
    for (auto& [value, idx] : row_index) {
        idx = table.row_values.size();
        table.row_values.push_back(value);
    }
    for (auto& [value, idx] : col_index) {
        idx = table.col_values.size();
        table.col_values.push_back(value);
    }
    table.counts.assign(table.row_values.size() * table.col_values.size(), 0);
    table.n = static_cast<std::int64_t>(labels.size());
    for (std::size_t l = 0; l < labels.size(); ++l)
        ++table.counts[row_index[labels[l]] * table.col_values.size() + col_index[truth[l]]];
    return table;
}

PairCounts pair_counts(std::span<const int> labels_a, std::span<const int> labels_b) {
    if (labels_a.size() != labels_b.size())
        throw LengthMismatch("pair_counts: label vectors differ in length");
    if (labels_a.size() < 2) throw TooFewObservations("pair_counts: need at least 2 items");

    const ContingencyTable table = confusion_matrix(labels_a, labels_b);

    std::int64_t same_both = 0;
    for (std::int64_t count : table.counts) same_both += choose2(count);
    std::int64_t same_a = 0;
    for (std::int64_t sum : table.row_sums()) same_a += choose2(sum);
    std::int64_t same_b = 0;
    for (std::int64_t sum : table.col_sums()) same_b += choose2(sum);

    PairCounts pairs;
    pairs.a = same_both;
    pairs.b = same_a - same_both;
    pairs.c = same_b - same_both;
    pairs.d_ = choose2(table.n) - same_a - same_b + same_both;
    return pairs;
}

AgreementMetrics agreement_metrics(std::span<const int> labels_a, std::span<const int> labels_b) {
    const PairCounts p = pair_counts(labels_a, labels_b);
    const std::int64_t total = p.total();

    AgreementMetrics m;
    m.ri = static_cast<double>(p.a + p.d_) / static_cast<double>(total);
    const std::int64_t ji_denom = p.a + p.b + p.c;
    m.ji = ji_denom == 0 ? 0.0 : static_cast<double>(p.a) / static_cast<double>(ji_denom);
    // Geometric mean of the two precisions; each factor is <= 1, so the
    // result cannot creep above 1.
    if (p.a + p.b == 0 || p.a + p.c == 0)
        m.fmi = 0.0;
    else
        m.fmi = std::sqrt((static_cast<double>(p.a) / static_cast<double>(p.a + p.b)) *
                          (static_cast<double>(p.a) / static_cast<double>(p.a + p.c)));

    // Hubert-Arabie adjusted index, kept exact in 128-bit integers:
    //   ARI = (N2*sum_nij2 - sum_a2*sum_b2) / (N2*(sum_a2+sum_b2)/2 - sum_a2*sum_b2)
    const auto n2 = static_cast<__int128>(total);
    const auto sa = static_cast<__int128>(p.a + p.b);
    const auto sb = static_cast<__int128>(p.a + p.c);
    const __int128 numerator = 2 * (n2 * p.a - sa * sb);
    const __int128 denominator = n2 * (sa + sb) - 2 * sa * sb;
    if (denominator == 0)
        m.ari = numerator == 0 ? 1.0 : 0.0;  // both partitions degenerate
    else
        m.ari = static_cast<double>(numerator) / static_cast<double>(denominator);
    return m;
}

}  // namespace r2c
