#include "r2c/reign.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace r2c {

std::uint64_t ProtoGrid::index_set_size() const {
    std::uint64_t total = 1;
    for (const auto& centers : centers_per_margin) {
        const auto k = static_cast<std::uint64_t>(centers.size());
        if (k == 0) throw Error("grid margin has no centers");
        if (total > std::numeric_limits<std::uint64_t>::max() / k)
            throw Error("grid index set size overflows 64 bits");
        total *= k;
    }
    return total;
}

std::uint64_t ProtoGrid::linear_index(const CellIndex& cell) const {
    if (cell.size() != dim()) throw DimensionMismatch("cell index has wrong dimension");
    std::uint64_t linear = 0;
    for (std::size_t j = 0; j < cell.size(); ++j) {
        const auto k = static_cast<std::uint64_t>(centers_per_margin[j].size());
        if (cell[j] >= k) throw Error("cell index out of range");
        linear = linear * k + cell[j];
    }
    return linear;
}

CellIndex ProtoGrid::unravel(std::uint64_t linear) const {
    CellIndex cell(dim());
    for (std::size_t j = dim(); j-- > 0;) {
        const auto k = static_cast<std::uint64_t>(centers_per_margin[j].size());
        cell[j] = static_cast<std::uint32_t>(linear % k);
        linear /= k;
    }
    return cell;
}

std::vector<double> ProtoGrid::center_of(const CellIndex& cell) const {
    if (cell.size() != dim()) throw DimensionMismatch("cell index has wrong dimension");
    std::vector<double> center(dim());
    for (std::size_t j = 0; j < dim(); ++j) center[j] = centers_per_margin[j][cell[j]];
    return center;
}

ProtoGrid build_grid(const std::vector<UnivariateGaussianMixture>& margins) {
    if (margins.empty()) throw EmptyMargins("build_grid: no fitted margins");
    ProtoGrid grid;
    grid.centers_per_margin.reserve(margins.size());
    for (const auto& margin : margins) {
        margin.validate();
        const auto& centers = margin.means;  // Gaussian component mean == cluster center
        for (std::size_t i = 1; i < centers.size(); ++i)
            if (!(centers[i] > centers[i - 1]))
                throw Error("build_grid: margin centers must be strictly increasing");
        grid.centers_per_margin.push_back(centers);
    }
    grid.index_set_size();  // overflow check
    return grid;
}

namespace {

/// Nearest center in a sorted list; ties go to the smaller index.
std::uint32_t nearest_center(double x, const std::vector<double>& centers) {
    const auto it = std::lower_bound(centers.begin(), centers.end(), x);
    if (it == centers.begin()) return 0;
    if (it == centers.end()) return static_cast<std::uint32_t>(centers.size() - 1);
    const auto hi = static_cast<std::size_t>(it - centers.begin());
    const std::size_t lo = hi - 1;
    // x - centers[lo] >= 0 and centers[hi] - x >= 0; the tie keeps lo.
    return (x - centers[lo] <= centers[hi] - x) ? static_cast<std::uint32_t>(lo)
                                                : static_cast<std::uint32_t>(hi);
}

}  // namespace

CellIndex assign_cell(std::span<const double> point, const ProtoGrid& grid) {
    if (point.size() != grid.dim())
        throw DimensionMismatch("assign_cell: point dimension does not match grid");
    CellIndex cell(grid.dim());
    for (std::size_t j = 0; j < grid.dim(); ++j) {
        if (!std::isfinite(point[j])) throw NonFiniteInput("assign_cell: point is not finite");
        cell[j] = nearest_center(point[j], grid.centers_per_margin[j]);
    }
    return cell;
}

MassTable estimate_masses(const Matrix& data, const ProtoGrid& grid) {
    if (data.rows() == 0) throw TooFewObservations("estimate_masses: empty data");
    if (data.cols() != grid.dim())
        throw DimensionMismatch("estimate_masses: data dimension does not match grid");
    MassTable table;
    table.n = static_cast<std::int64_t>(data.rows());
    for (std::size_t i = 0; i < data.rows(); ++i)
        ++table.counts[grid.linear_index(assign_cell(data.row(i), grid))];
    return table;
}

std::vector<double> posterior_masses(const MassTable& table, std::span<const double> prior) {
    for (double a : prior)
        if (!(a > 0.0)) throw NonPositivePrior("posterior_masses: prior entries must be positive");
    if (!table.counts.empty()) {
        const auto max_cell = table.counts.rbegin()->first;
        if (max_cell >= prior.size())
            throw LengthMismatch("posterior_masses: prior shorter than the grid");
    }
    std::vector<double> posterior(prior.begin(), prior.end());
    for (const auto& [cell, count] : table.counts)
        posterior[cell] += static_cast<double>(count);
    return posterior;
}

}  // namespace r2c
