#include "r2c/conquer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>

namespace r2c {

std::uint64_t ConquerFunction::value(double u) const {
    // First level with mass > u; all cells at or above it are survivors.
    std::uint64_t alive = 0;
    for (std::size_t i = levels(); i-- > 0;) {
        if (level(i) > u)
            alive += static_cast<std::uint64_t>(cells_at_level[i]);
        else
            break;
    }
    return alive;
}

ConquerFunction conquering_function(const MassTable& table, std::uint64_t total_cells) {
    if (table.n <= 0) throw Error("conquering_function: table has no observations");
    if (total_cells < table.counts.size())
        throw Error("conquering_function: total_cells smaller than the nonempty cell count");

    std::map<std::int64_t, std::int64_t> histogram;  // count -> cells with that count
    std::int64_t total_count = 0;
    for (const auto& [cell, count] : table.counts) {
        if (count <= 0) throw Error("conquering_function: nonpositive cell count");
        ++histogram[count];
        total_count += count;
    }
    if (total_count != table.n) throw Error("conquering_function: counts do not sum to n");

    ConquerFunction cf;
    cf.n = table.n;
    cf.total_cells = total_cells;
    cf.nonempty_cells = table.counts.size();
    cf.level_counts.reserve(histogram.size());
    cf.cells_at_level.reserve(histogram.size());
    for (const auto& [count, cells] : histogram) {
        cf.level_counts.push_back(count);
        cf.cells_at_level.push_back(cells);
    }
    return cf;
}

std::string SievePolicy::name() const {
    switch (kind) {
        case Kind::fixed: return "fixed";
        case Kind::plateau: return "plateau";
        case Kind::edge: return "edge";
    }
    return "unknown";
}

SieveSelection select_sieve(const ConquerFunction& cf, const SievePolicy& policy) {
    if (cf.levels() == 0) throw Error("select_sieve: conquering function has no levels");

    if (policy.kind == SievePolicy::Kind::fixed) {
        if (!(policy.u >= 0.0 && policy.u <= 1.0))
            throw ConfigError("select_sieve: fixed sieve size must be in [0, 1]");
        return {policy.u, false, false};
    }

    const std::size_t r = cf.levels();
    if (r == 1) return {0.0, false, true};  // single level: no plateau, no interior jump

    if (policy.kind == SievePolicy::Kind::plateau) {
        // Constant intervals of C on [0, max level): [0, m_1), [m_1, m_2), ...
        // The terminal plateau on [max level, 1] is excluded. Lengths are
        // count differences over a common denominator n, so the comparison
        // is exact and ties genuinely break toward smaller u.
        std::size_t best = 0;
        std::int64_t best_len = cf.level_counts[0];
        for (std::size_t i = 1; i < r; ++i) {
            const std::int64_t len = cf.level_counts[i] - cf.level_counts[i - 1];
            if (len > best_len) {
                best_len = len;
                best = i;
            }
        }
        return {cf.level(best), true, false};
    }

    // Edge: level with the largest drop of C, among levels below the maximum.
    std::size_t best = 0;
    for (std::size_t i = 1; i + 1 < r; ++i)
        if (cf.cells_at_level[i] > cf.cells_at_level[best]) best = i;
    return {cf.level(best), true, false};
}

ConquerResult surviving_centers(const MassTable& table, const ProtoGrid& grid, double u,
                                bool keep_boundary) {
    if (!(u >= 0.0 && u <= 1.0)) throw ConfigError("surviving_centers: u must be in [0, 1]");
    if (table.counts.empty()) throw Error("surviving_centers: empty mass table");

    ConquerResult result;
    result.u_selected = u;
    result.boundary_kept = keep_boundary;

    for (const auto& [cell, count] : table.counts) {
        const double mass = static_cast<double>(count) / static_cast<double>(table.n);
        const bool conquered = keep_boundary ? mass < u : mass <= u;
        if (conquered)
            result.conquered.push_back(cell);
        else
            result.survivor_cells.push_back(cell);
    }

    if (result.survivor_cells.empty()) {
        // Keep the maximum-mass cell (smallest index on ties) so the
        // clustering always yields a partition.
        result.fallback_applied = true;
        std::int64_t best_count = 0;
        std::uint64_t best_cell = 0;
        for (const auto& [cell, count] : table.counts) {
            if (count > best_count) {
                best_count = count;
                best_cell = cell;
            }
        }
        result.survivor_cells.push_back(best_cell);
        result.conquered.erase(
            std::remove(result.conquered.begin(), result.conquered.end(), best_cell),
            result.conquered.end());
    }

    result.survivor_centers = Matrix(result.survivor_cells.size(), grid.dim());
    for (std::size_t s = 0; s < result.survivor_cells.size(); ++s) {
        const auto center = grid.center_of(grid.unravel(result.survivor_cells[s]));
        for (std::size_t j = 0; j < grid.dim(); ++j) result.survivor_centers(s, j) = center[j];
    }
    return result;
}

std::size_t encode(std::span<const double> point, const ConquerResult& result) {
    const std::size_t k = result.survivor_centers.rows();
    if (k == 0) throw Error("encode: no surviving centers");
    if (point.size() != result.survivor_centers.cols())
        throw DimensionMismatch("encode: point dimension does not match centers");

    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < k; ++s) {
        double dist = 0.0;
        for (std::size_t j = 0; j < point.size(); ++j) {
            const double dx = point[j] - result.survivor_centers(s, j);
            dist += dx * dx;
        }
        if (dist < best_dist) {  // strict: ties keep the smaller cell index
            best_dist = dist;
            best = s;
        }
    }
    return best;
}

R2cResult r2c_cluster(const Matrix& data, const R2cConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    if (data.rows() < 2) throw TooFewObservations("r2c_cluster: need at least 2 rows");
    if (data.cols() < 1) throw EmptyMargins("r2c_cluster: need at least 1 column");

    const std::size_t d = data.cols();
    R2cResult result;
    auto& report = result.report;
    report.margin_fits.resize(d);
    report.marginal_labels.resize(d);

    // Step 1: margins, one worker per margin, seeds derived per margin.
    parallel_for(d, config.threads, [&](std::size_t j) {
        FitConfig margin_config = config.fit;
        margin_config.seed = config.fit.seed ^ static_cast<std::uint64_t>(j);
        const std::vector<double> column = data.column(j);
        report.margin_fits[j] = select_k(column, margin_config);

        const Matrix memberships = posterior_memberships(report.margin_fits[j].model, column);
        auto& labels = report.marginal_labels[j];
        labels.resize(data.rows());
        for (std::size_t i = 0; i < data.rows(); ++i) {
            const auto row = memberships.row(i);
            labels[i] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
        }
    });

    // Step 2: reign.
    std::vector<UnivariateGaussianMixture> margins;
    margins.reserve(d);
    for (const auto& fit : report.margin_fits) margins.push_back(fit.model);
    report.grid = build_grid(margins);
    report.masses = estimate_masses(data, report.grid);
    report.conquer_fn = conquering_function(report.masses, report.grid.index_set_size());

    // Step 3: conquer and encode.
    report.sieve = select_sieve(report.conquer_fn, config.policy);
    if (report.sieve.degenerate)
        report.warnings.push_back(
            "sieve selection degenerate: single mass level, fell back to u = 0");
    report.conquer =
        surviving_centers(report.masses, report.grid, report.sieve.u, report.sieve.keep_boundary);
    if (report.conquer.fallback_applied)
        report.warnings.push_back(
            "sieve conquered every cell: kept the maximum-mass cell as the single cluster");

    result.labels.resize(data.rows());
    parallel_for(data.rows(), config.threads, [&](std::size_t i) {
        result.labels[i] = static_cast<int>(encode(data.row(i), report.conquer));
    });

    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace r2c
