#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "r2c/common.hpp"
#include "r2c/conquer.hpp"
#include "r2c/metrics.hpp"
#include "r2c/synthgen.hpp"

namespace r2c {

struct FitOptions {
    std::string input_path;
    std::string output_dir;
    SievePolicy policy = SievePolicy::fixed(0.1);
    FitConfig fit;
    unsigned threads = 0;
    std::string truth_path;  // optional labels CSV; adds confusion matrix + metrics
    std::string reference;   // "", "banknote" or "wine": embeds published values for comparison
};

/// Runs the full clustering pipeline on a CSV file and writes labels.csv,
/// marginal_labels.csv, conquer.csv and report.json into output_dir.
R2cResult run_fit(const FitOptions& options);

struct SimulateOptions {
    ScenarioSpec spec;
    std::string output_path;
    std::string labels_path;  // optional; generating labels
};

void run_simulate(const SimulateOptions& options);

struct BenchOptions {
    Scenario scenario = Scenario::s1;
    std::vector<std::size_t> sizes;  // n values (s1/s2) or d values (s3); empty = defaults
    std::size_t reps = 50;
    std::vector<SievePolicy> policies;  // empty = fixed(0.1), plateau, edge
    double theta = 2.0;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    bool baseline = false;  // also fit the joint GMM comparator
    FitConfig fit;
};

struct BenchRow {
    std::size_t replicate = 0;
    std::size_t size = 0;  // n or d
    std::string policy;
    AgreementMetrics metrics;
    std::size_t final_k = 0;
    double baseline_ari = std::numeric_limits<double>::quiet_NaN();
    int baseline_k = -1;  // -1 when the baseline is disabled
};

struct BenchResult {
    std::vector<BenchRow> rows;
    std::string csv;  // data rows plus aggregate summary rows, byte-stable
};

/// Monte Carlo benchmark: per (size, replicate) the scenario is sampled
/// with a derived seed, margins are fitted once, and every policy is
/// evaluated against the generating labels. Replicates run on the worker
/// pool; output is identical for every thread count.
BenchResult run_bench(const BenchOptions& options);

}  // namespace r2c
