#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "r2c/common.hpp"
#include "r2c/mixture1d.hpp"
#include "r2c/reign.hpp"

namespace r2c {

/// Step representation of the conquering function
///   C(u) = #{cells with empirical mass > u},
/// stored as the ascending distinct positive cell counts (exact rationals
/// count/n) together with the number of cells at each count. C drops by
/// cells_at_level[i] at u = level(i) and is zero on [max level, 1].
struct ConquerFunction {
    std::vector<std::int64_t> level_counts;    // ascending, distinct, positive
    std::vector<std::int64_t> cells_at_level;  // jump size at each level
    std::int64_t n = 0;                        // total observations
    std::uint64_t total_cells = 0;             // product of margin center counts
    std::uint64_t nonempty_cells = 0;

    std::size_t levels() const { return level_counts.size(); }
    double level(std::size_t i) const {
        return static_cast<double>(level_counts[i]) / static_cast<double>(n);
    }
    double max_level() const { return level(levels() - 1); }

    /// C(u); exact at the stored levels.
    std::uint64_t value(double u) const;
};

ConquerFunction conquering_function(const MassTable& table, std::uint64_t total_cells);

struct SievePolicy {
    enum class Kind { fixed, plateau, edge };
    Kind kind = Kind::fixed;
    double u = 0.1;  // fixed only

    static SievePolicy fixed(double u) { return {Kind::fixed, u}; }
    static SievePolicy plateau() { return {Kind::plateau, 0.0}; }
    static SievePolicy edge() { return {Kind::edge, 0.0}; }
    std::string name() const;
};

struct SieveSelection {
    double u = 0.0;
    /// Data-driven policies place u at a mass level; the cells sitting
    /// exactly at that level survive the conquest (the sieve is an entry
    /// requirement the boundary cells meet).
    bool keep_boundary = false;
    /// Set when the table has a single mass level, so plateau/edge have no
    /// structure to select from; u is 0 and every nonempty cell survives.
    bool degenerate = false;
};

SieveSelection select_sieve(const ConquerFunction& cf, const SievePolicy& policy);

struct ConquerResult {
    double u_selected = 0.0;
    bool boundary_kept = false;
    bool fallback_applied = false;  // everything was conquered; kept the argmax-mass cell
    std::vector<std::uint64_t> conquered;       // nonempty cells with mass <= u (< u if boundary kept)
    std::vector<std::uint64_t> survivor_cells;  // ascending = lexicographic CellIndex order
    Matrix survivor_centers;                    // final_k x d

    std::size_t final_k() const { return survivor_cells.size(); }
};

/// Splits the nonempty cells into conquered and surviving ones at sieve
/// size u. Empty cells are implicitly conquered. Never returns an empty
/// partition: if u conquers every cell, the maximum-mass cell is kept and
/// fallback_applied is set.
ConquerResult surviving_centers(const MassTable& table, const ProtoGrid& grid, double u,
                                bool keep_boundary = false);

/// Index of the nearest surviving center (squared Euclidean); ties go to
/// the survivor with the lexicographically smallest cell index.
std::size_t encode(std::span<const double> point, const ConquerResult& result);

struct R2cConfig {
    FitConfig fit;
    SievePolicy policy = SievePolicy::fixed(0.1);
    unsigned threads = 0;  // 0 = all hardware threads
};

struct R2cReport {
    std::vector<FitResult> margin_fits;
    ProtoGrid grid;
    MassTable masses;
    ConquerFunction conquer_fn;
    SieveSelection sieve;
    ConquerResult conquer;
    /// marginal_labels[j][l] = argmax posterior membership of row l in margin j.
    std::vector<std::vector<int>> marginal_labels;
    double runtime_seconds = 0.0;
    std::vector<std::string> warnings;

    std::vector<std::size_t> margin_k() const {
        std::vector<std::size_t> k;
        k.reserve(margin_fits.size());
        for (const auto& fit : margin_fits) k.push_back(fit.model.size());
        return k;
    }
};

struct R2cResult {
    std::vector<int> labels;
    R2cReport report;
};

/// Full pipeline: fit every margin, build the protocluster grid, estimate
/// masses, pick the sieve, and encode each row against the survivors.
R2cResult r2c_cluster(const Matrix& data, const R2cConfig& config);

}  // namespace r2c
