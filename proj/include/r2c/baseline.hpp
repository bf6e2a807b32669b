#pragma once

#include <cstdint>
#include <vector>

#include "r2c/common.hpp"
#include "r2c/mixture1d.hpp"

namespace r2c {

/// Full-covariance d-dimensional Gaussian mixture.
struct JointGaussianMixture {
    std::size_t dim = 0;
    std::vector<double> weights;
    Matrix means;                     // k x d
    std::vector<Matrix> covariances;  // k symmetric positive-definite d x d

    std::size_t size() const { return weights.size(); }
};

struct JointFitResult {
    JointGaussianMixture model;
    std::vector<int> labels;  // argmax responsibility
    double loglik = 0.0;
    double bic = 0.0;
    std::size_t n = 0;
    std::vector<double> loglik_trace;
};

/// Joint Gaussian mixture comparator: EM over k = 1..k_max with k-means++
/// style seeding and BIC model selection. Parameter count per k is
/// (k - 1) + k d + k d (d + 1) / 2.
JointFitResult fit_gmm_joint(const Matrix& data, std::size_t k_max, const FitConfig& config);

}  // namespace r2c
