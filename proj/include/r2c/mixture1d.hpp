#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "r2c/common.hpp"

namespace r2c {

/// Univariate Gaussian finite mixture in canonical form: components are
/// sorted by ascending mean, weights sum to one and every variance is
/// positive (at or above the fitted variance floor).
struct UnivariateGaussianMixture {
    std::vector<double> weights;
    std::vector<double> means;
    std::vector<double> variances;

    std::size_t size() const { return means.size(); }

    /// Throws Error if the invariants above do not hold.
    void validate() const;
};

struct FitConfig {
    std::size_t k_max = 6;
    std::size_t restarts = 8;
    double tol = 1e-8;              // relative log-likelihood improvement
    std::size_t max_iter = 1000;
    double variance_floor_factor = 1e-3;  // floor = factor * sample variance
    std::uint64_t seed = 0;
};

struct FitResult {
    UnivariateGaussianMixture model;
    double loglik = 0.0;
    double bic = 0.0;
    std::size_t n = 0;
    /// Log-likelihood after each EM iteration of the winning restart,
    /// restarted from scratch whenever an empty-component rescue fires.
    std::vector<double> loglik_trace;
};

/// ln sum_k w_k phi(x; mu_k, var_k), stabilized with log-sum-exp.
double log_density(const UnivariateGaussianMixture& model, double x);

/// Maximum-likelihood EM fit with k components; best of config.restarts
/// seeded initializations. BIC = -2 loglik + (3k - 1) ln n.
FitResult em_fit(std::span<const double> data, std::size_t k, const FitConfig& config);

/// Fits k = 1..min(k_max, n) and returns the BIC-minimizing result;
/// ties break toward smaller k.
FitResult select_k(std::span<const double> data, const FitConfig& config);

/// n x k matrix of posterior component memberships; each row sums to 1.
Matrix posterior_memberships(const UnivariateGaussianMixture& model, std::span<const double> data);

}  // namespace r2c
