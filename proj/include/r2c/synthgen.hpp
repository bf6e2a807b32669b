#pragma once

#include <cstdint>
#include <vector>

#include "r2c/common.hpp"
#include "r2c/mixture1d.hpp"

namespace r2c {

enum class Scenario { s1, s2, s3 };

/// Simulation scenario descriptor. s1/s2 are bivariate; s3 derives its
/// component count from the dimension (K = round(sqrt(d + 1))) and, when n
/// is left 0, its sample size as floor(10 d^1.5).
struct ScenarioSpec {
    Scenario variant = Scenario::s1;
    std::size_t n = 0;
    std::size_t d = 2;       // s3 only
    double theta = 2.0;      // Clayton dependence, s2 only
    std::uint64_t seed = 0;

    std::size_t dimension() const { return variant == Scenario::s3 ? d : 2; }
    std::size_t components() const;
    std::size_t sample_size() const;
};

struct LabeledSample {
    Matrix points;
    std::vector<int> labels;  // generating component per row
};

/// Draws the scenario sample. Each row consumes its own seeded stream, so
/// the output depends only on the spec.
LabeledSample generate_scenario(const ScenarioSpec& spec);

/// Clayton(theta) pairs via conditional inversion; columns are (u, v) with
/// uniform margins on (0, 1).
Matrix sample_clayton(double theta, std::size_t count, std::uint64_t seed);

/// Analytic margin of the generating joint with coincident components
/// (equal mean and variance) merged.
UnivariateGaussianMixture true_marginal_mixture(const ScenarioSpec& spec, std::size_t margin);

/// Standard normal quantile (Wichura's AS241, double precision).
double normal_quantile(double p);

}  // namespace r2c
