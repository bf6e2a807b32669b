#include "r2c/baseline.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace r2c {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

using EMatrix = Eigen::MatrixXd;
using EVector = Eigen::VectorXd;

struct ComponentCache {
    Eigen::LLT<EMatrix> llt;
    double log_det = 0.0;  // log det Sigma
};

/// Cholesky with ridge retries; throws SingularCovariance when the matrix
/// stays indefinite after 3 escalations.
ComponentCache factor_covariance(EMatrix& cov, double avg_variance) {
    ComponentCache cache;
    double ridge = 1e-6 * avg_variance;
    for (int attempt = 0; attempt <= 3; ++attempt) {
        cache.llt.compute(cov);
        if (cache.llt.info() == Eigen::Success) {
            cache.log_det = 0.0;
            for (Eigen::Index i = 0; i < cov.rows(); ++i)
                cache.log_det += 2.0 * std::log(cache.llt.matrixLLT()(i, i));
            return cache;
        }
        if (attempt == 3) break;
        cov.diagonal().array() += ridge;
        ridge *= 100.0;
    }
    throw SingularCovariance("fit_gmm_joint: covariance not positive definite after ridge retries");
}

struct EmState {
    EVector weights;
    EMatrix means;                // k x d
    std::vector<EMatrix> covs;    // k of d x d
    std::vector<ComponentCache> cache;
};

/// Row-wise log densities: out(i, k) = log w_k + log N(x_i; mu_k, Sigma_k).
void log_weighted_densities(const EMatrix& data, const EmState& state, EMatrix& out) {
    const auto d = data.cols();
    const auto k = state.weights.size();
    for (Eigen::Index c = 0; c < k; ++c) {
        EMatrix centered = data.rowwise() - state.means.row(c);
        // Solve L y = (x - mu)^T per observation; squared norms give the quadratic form.
        EMatrix y = state.cache[c].llt.matrixL().solve(centered.transpose());
        out.col(c) = (-0.5 * (static_cast<double>(d) * kLogTwoPi + state.cache[c].log_det)) -
                     0.5 * y.colwise().squaredNorm().transpose().array() +
                     std::log(state.weights[c]);
    }
}

double log_sum_exp_rows(const EMatrix& logp, EMatrix& resp) {
    const EVector row_max = logp.rowwise().maxCoeff();
    resp = (logp.colwise() - row_max).array().exp();
    const EVector row_sum = resp.rowwise().sum();
    resp.array().colwise() /= row_sum.array();
    return (row_max.array() + row_sum.array().log()).sum();
}

/// k-means++ seeding followed by a few Lloyd sweeps.
EMatrix seed_means(const EMatrix& data, std::size_t k, std::mt19937_64& rng) {
    const auto n = data.rows();
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    EMatrix centers(k, data.cols());
    centers.row(0) = data.row(static_cast<Eigen::Index>(unif(rng) * static_cast<double>(n)) % n);

    EVector dist2 = (data.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (std::size_t c = 1; c < k; ++c) {
        const double total = dist2.sum();
        Eigen::Index pick = 0;
        if (total > 0.0) {
            double target = unif(rng) * total;
            for (; pick + 1 < n; ++pick) {
                target -= dist2[pick];
                if (target <= 0.0) break;
            }
        } else {
            pick = static_cast<Eigen::Index>(unif(rng) * static_cast<double>(n)) % n;
        }
        centers.row(c) = data.row(pick);
        dist2 = dist2.cwiseMin((data.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }

    std::vector<Eigen::Index> assign(n, 0);
    for (int sweep = 0; sweep < 5; ++sweep) {
        for (Eigen::Index i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double dd = (data.row(i) - centers.row(c)).squaredNorm();
                if (dd < best) {
                    best = dd;
                    assign[i] = static_cast<Eigen::Index>(c);
                }
            }
        }
        for (std::size_t c = 0; c < k; ++c) {
            EVector sum = EVector::Zero(data.cols());
            Eigen::Index count = 0;
            for (Eigen::Index i = 0; i < n; ++i)
                if (assign[i] == static_cast<Eigen::Index>(c)) {
                    sum += data.row(i).transpose();
                    ++count;
                }
            if (count > 0) centers.row(c) = sum.transpose() / static_cast<double>(count);
        }
    }
    return centers;
}

struct JointRestartOutcome {
    EmState state;
    double loglik = -std::numeric_limits<double>::infinity();
    std::vector<double> trace;
    bool ok = false;
};

JointRestartOutcome run_joint_em(const EMatrix& data, std::size_t k, const FitConfig& config,
                                 std::uint64_t restart, const EMatrix& sample_cov,
                                 double avg_variance) {
    const auto n = data.rows();
    std::mt19937_64 rng(mix_seed(config.seed, k * 7919ULL + restart));

    JointRestartOutcome out;
    EmState state;
    state.weights = EVector::Constant(k, 1.0 / static_cast<double>(k));
    state.means = seed_means(data, k, rng);
    state.covs.assign(k, sample_cov);
    state.cache.resize(k);
    try {
        for (std::size_t c = 0; c < k; ++c)
            state.cache[c] = factor_covariance(state.covs[c], avg_variance);
    } catch (const SingularCovariance&) {
        return out;
    }

    EMatrix logp(n, static_cast<Eigen::Index>(k)), resp;
    const double empty_mass = 1e-10 * static_cast<double>(n);
    double prev_ll = -std::numeric_limits<double>::infinity();

    for (std::size_t iter = 0; iter < config.max_iter; ++iter) {
        log_weighted_densities(data, state, logp);
        const double ll = log_sum_exp_rows(logp, resp);
        out.trace.push_back(ll);
        out.loglik = ll;
        out.state = state;
        out.ok = true;

        if (iter > 0 && ll - prev_ll <= config.tol * (std::abs(ll) + 1.0)) break;
        prev_ll = ll;

        const EVector mass = resp.colwise().sum();
        if ((mass.array() < empty_mass).any()) {
            out.ok = false;  // degenerate restart; let another seeding try
            break;
        }

        try {
            for (std::size_t c = 0; c < k; ++c) {
                const auto ci = static_cast<Eigen::Index>(c);
                state.weights[ci] = mass[ci] / static_cast<double>(n);
                state.means.row(ci) = (resp.col(ci).transpose() * data) / mass[ci];
                EMatrix centered = data.rowwise() - state.means.row(ci);
                EMatrix weighted = centered.array().colwise() * resp.col(ci).array();
                state.covs[c] = (weighted.transpose() * centered) / mass[ci];
                state.cache[c] = factor_covariance(state.covs[c], avg_variance);
            }
        } catch (const SingularCovariance&) {
            out.ok = false;
            break;
        }
    }
    return out;
}

}  // namespace

JointFitResult fit_gmm_joint(const Matrix& data, std::size_t k_max, const FitConfig& config) {
    const std::size_t n = data.rows();
    const std::size_t d = data.cols();
    if (n <= d + 1) throw TooFewObservations("fit_gmm_joint: need n > d + 1");
    if (k_max == 0) throw ConfigError("fit_gmm_joint: k_max must be at least 1");
    for (double v : data.data())
        if (!std::isfinite(v)) throw NonFiniteInput("fit_gmm_joint: data contains NaN or infinity");

    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> mapped(
        data.data().data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    const EMatrix points = mapped;

    const Eigen::RowVectorXd mean = points.colwise().mean();
    EMatrix centered = points.rowwise() - mean;
    EMatrix sample_cov = (centered.transpose() * centered) / static_cast<double>(n);
    const double avg_variance = std::max(sample_cov.diagonal().mean(), 1e-12);
    sample_cov.diagonal().array() += 1e-10 * avg_variance;

    JointRestartOutcome best;
    std::size_t best_k = 0;
    double best_bic = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= std::min(k_max, n); ++k) {
        JointRestartOutcome best_for_k;
        for (std::size_t r = 0; r < config.restarts; ++r) {
            JointRestartOutcome cand = run_joint_em(points, k, config, r, sample_cov, avg_variance);
            if (cand.ok && cand.loglik > best_for_k.loglik) best_for_k = std::move(cand);
            if (k == 1) break;
        }
        if (!best_for_k.ok) continue;
        const double dd = static_cast<double>(d);
        const double kk = static_cast<double>(k);
        const double params = (kk - 1.0) + kk * dd + kk * dd * (dd + 1.0) / 2.0;
        const double bic = -2.0 * best_for_k.loglik + params * std::log(static_cast<double>(n));
        if (bic < best_bic) {
            best_bic = bic;
            best_k = k;
            best = std::move(best_for_k);
        }
    }
    if (best_k == 0) throw SingularCovariance("fit_gmm_joint: every fit degenerated");

    JointFitResult result;
    result.n = n;
    result.loglik = best.loglik;
    result.bic = best_bic;
    result.loglik_trace = std::move(best.trace);
    result.model.dim = d;
    result.model.weights.assign(best.state.weights.data(), best.state.weights.data() + best_k);
    result.model.means = Matrix(best_k, d);
    for (std::size_t c = 0; c < best_k; ++c)
        for (std::size_t j = 0; j < d; ++j)
            result.model.means(c, j) = best.state.means(static_cast<Eigen::Index>(c),
                                                        static_cast<Eigen::Index>(j));
    result.model.covariances.reserve(best_k);
    for (std::size_t c = 0; c < best_k; ++c) {
        Matrix cov(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                cov(i, j) = best.state.covs[c](static_cast<Eigen::Index>(i),
                                               static_cast<Eigen::Index>(j));
        result.model.covariances.push_back(std::move(cov));
    }

    EMatrix logp(points.rows(), static_cast<Eigen::Index>(best_k)), resp;
    log_weighted_densities(points, best.state, logp);
    log_sum_exp_rows(logp, resp);
    result.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::Index arg = 0;
        resp.row(static_cast<Eigen::Index>(i)).maxCoeff(&arg);
        result.labels[i] = static_cast<int>(arg);
    }
    return result;
}

}  // namespace r2c
