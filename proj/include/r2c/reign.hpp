#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "r2c/common.hpp"
#include "r2c/mixture1d.hpp"

namespace r2c {

/// Per-margin component index, 0-based. Coordinate j addresses one of the
/// K_j marginal cluster centers.
using CellIndex = std::vector<std::uint32_t>;

/// Cartesian grid of marginal cluster centers. Cell c covers the points
/// whose nearest grid site (squared Euclidean) is the product center
/// (centers_per_margin[0][c[0]], ..., centers_per_margin[d-1][c[d-1]]).
struct ProtoGrid {
    std::vector<std::vector<double>> centers_per_margin;  // each strictly increasing

    std::size_t dim() const { return centers_per_margin.size(); }
    std::uint64_t index_set_size() const;  // product of margin center counts

    /// Row-major linearization of a multi-index (first coordinate most
    /// significant); monotone in lexicographic order.
    std::uint64_t linear_index(const CellIndex& cell) const;
    CellIndex unravel(std::uint64_t linear) const;
    std::vector<double> center_of(const CellIndex& cell) const;
};

/// Protocluster counts over the grid, stored sparsely: absent cells have
/// zero count. Masses are the multinomial MLE counts/n.
struct MassTable {
    std::map<std::uint64_t, std::int64_t> counts;  // linear cell id -> positive count
    std::int64_t n = 0;

    double mass(std::uint64_t cell) const {
        auto it = counts.find(cell);
        return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(n);
    }
    std::size_t nonempty_cells() const { return counts.size(); }
};

/// Grid of the fitted margins' component means.
ProtoGrid build_grid(const std::vector<UnivariateGaussianMixture>& margins);

/// Nearest protocluster center, computed per coordinate (equivalent to the
/// full-grid argmin because the sites form a Cartesian product). Distance
/// ties go to the smaller index in each coordinate.
CellIndex assign_cell(std::span<const double> point, const ProtoGrid& grid);

/// Counts rows of `data` per protocluster.
MassTable estimate_masses(const Matrix& data, const ProtoGrid& grid);

/// Dirichlet-multinomial conjugate update: prior + counts, cell by cell.
/// `prior` spans every cell of the grid in linear-index order.
std::vector<double> posterior_masses(const MassTable& table, std::span<const double> prior);

}  // namespace r2c
