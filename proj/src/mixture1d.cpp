#include "r2c/mixture1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace r2c {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

bool all_finite(std::span<const double> data) {
    return std::all_of(data.begin(), data.end(), [](double v) { return std::isfinite(v); });
}

double sample_mean(std::span<const double> data) {
    return std::accumulate(data.begin(), data.end(), 0.0) / static_cast<double>(data.size());
}

double sample_variance(std::span<const double> data, double mean) {
    double acc = 0.0;
    for (double v : data) acc += (v - mean) * (v - mean);
    return acc / static_cast<double>(data.size());
}

struct Components {
    std::vector<double> weights, means, variances;
    std::size_t k() const { return means.size(); }
};

/// Per-point log densities and responsibilities folded into running sums.
struct EStepStats {
    double loglik = 0.0;
    std::vector<double> resp_mass;     // N_k
    std::vector<double> centered_sum;  // sum_i r_ik (x_i - mu_k)
    std::vector<double> centered_sq;   // sum_i r_ik (x_i - mu_k)^2
};

EStepStats e_step(const Components& c, std::span<const double> data) {
    const std::size_t k = c.k();
    EStepStats s;
    s.resp_mass.assign(k, 0.0);
    s.centered_sum.assign(k, 0.0);
    s.centered_sq.assign(k, 0.0);

    std::vector<double> log_const(k), inv_two_var(k), p(k);
    for (std::size_t j = 0; j < k; ++j) {
        log_const[j] = std::log(c.weights[j]) - 0.5 * (kLogTwoPi + std::log(c.variances[j]));
        inv_two_var[j] = 0.5 / c.variances[j];
    }

    for (double x : data) {
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j) {
            const double dx = x - c.means[j];
            p[j] = log_const[j] - dx * dx * inv_two_var[j];
            m = std::max(m, p[j]);
        }
        double denom = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            p[j] = std::exp(p[j] - m);
            denom += p[j];
        }
        s.loglik += m + std::log(denom);
        const double inv_denom = 1.0 / denom;
        for (std::size_t j = 0; j < k; ++j) {
            const double r = p[j] * inv_denom;
            const double dx = x - c.means[j];
            s.resp_mass[j] += r;
            s.centered_sum[j] += r * dx;
            s.centered_sq[j] += r * dx * dx;
        }
    }
    return s;
}

void canonicalize(UnivariateGaussianMixture& model) {
    const std::size_t k = model.size();
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (model.means[a] != model.means[b]) return model.means[a] < model.means[b];
        if (model.variances[a] != model.variances[b]) return model.variances[a] < model.variances[b];
        return model.weights[a] < model.weights[b];
    });
    UnivariateGaussianMixture sorted;
    for (std::size_t idx : order) {
        sorted.weights.push_back(model.weights[idx]);
        sorted.means.push_back(model.means[idx]);
        sorted.variances.push_back(model.variances[idx]);
    }
    model = std::move(sorted);
}

struct RestartOutcome {
    Components components;
    double loglik = -std::numeric_limits<double>::infinity();
    std::vector<double> trace;
    bool failed = false;  // rescue budget exhausted
};

RestartOutcome run_em(std::span<const double> data, std::span<const double> sorted, std::size_t k,
                      const FitConfig& config, std::uint64_t restart, double data_var,
                      double floor) {
    const auto n = static_cast<double>(data.size());
    auto quantile = [&](double q) {
        q = std::clamp(q, 0.0, 1.0);
        const auto idx = static_cast<std::size_t>(q * (sorted.size() - 1));
        return sorted[idx];
    };

    std::mt19937_64 rng(mix_seed(config.seed, k * 1000003ULL + restart));
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    RestartOutcome out;
    Components c;
    c.weights.assign(k, 1.0 / static_cast<double>(k));
    c.variances.assign(k, std::max(data_var, floor));
    c.means.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        const double pos = restart == 0 ? (static_cast<double>(j) + 0.5) / static_cast<double>(k)
                                        : (static_cast<double>(j) + unif(rng)) / static_cast<double>(k);
        c.means[j] = quantile(pos);
    }

    std::vector<bool> rescued(k, false);
    const double empty_mass = 1e-10 * n;
    double prev_ll = -std::numeric_limits<double>::infinity();

    for (std::size_t iter = 0; iter < config.max_iter; ++iter) {
        EStepStats s = e_step(c, data);
        out.trace.push_back(s.loglik);
        out.loglik = s.loglik;
        out.components = c;

        if (iter > 0 && s.loglik - prev_ll <= config.tol * (std::abs(s.loglik) + 1.0)) break;
        prev_ll = s.loglik;

        auto empty = std::find_if(s.resp_mass.begin(), s.resp_mass.end(),
                                  [&](double m) { return m < empty_mass; });
        if (empty != s.resp_mass.end()) {
            const auto j = static_cast<std::size_t>(empty - s.resp_mass.begin());
            if (rescued[j]) {
                out.failed = true;
                break;
            }
            rescued[j] = true;
            // Restart the dead component at the worst-covered observation.
            double low_density = std::numeric_limits<double>::infinity();
            double low_point = c.means[j];
            UnivariateGaussianMixture current{c.weights, c.means, c.variances};
            for (double x : data) {
                const double ld = log_density(current, x);
                if (ld < low_density) {
                    low_density = ld;
                    low_point = x;
                }
            }
            c.means[j] = low_point;
            c.variances[j] = std::max(data_var, floor);
            c.weights[j] = 1.0 / static_cast<double>(k);
            const double total = std::accumulate(c.weights.begin(), c.weights.end(), 0.0);
            for (double& w : c.weights) w /= total;
            out.trace.clear();
            prev_ll = -std::numeric_limits<double>::infinity();
            continue;
        }

        for (std::size_t j = 0; j < k; ++j) {
            const double mass = s.resp_mass[j];
            const double shift = s.centered_sum[j] / mass;
            const double mean_new = c.means[j] + shift;
            const double var_new = s.centered_sq[j] / mass - shift * shift;
            c.weights[j] = mass / n;
            c.means[j] = mean_new;
            c.variances[j] = std::max(var_new, floor);
        }
    }
    return out;
}

}  // namespace

void UnivariateGaussianMixture::validate() const {
    const std::size_t k = size();
    if (k == 0 || weights.size() != k || variances.size() != k)
        throw Error("mixture has inconsistent component counts");
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        if (!(weights[j] > 0.0)) throw Error("mixture weight must be positive");
        if (!(variances[j] > 0.0)) throw Error("mixture variance must be positive");
        if (j > 0 && means[j] < means[j - 1]) throw Error("mixture means must be sorted ascending");
        total += weights[j];
    }
    if (std::abs(total - 1.0) > 1e-12) throw Error("mixture weights must sum to one");
}

double log_density(const UnivariateGaussianMixture& model, double x) {
    if (!std::isfinite(x)) throw NonFiniteInput("log_density: x is not finite");
    double m = -std::numeric_limits<double>::infinity();
    std::vector<double> logp(model.size());
    for (std::size_t j = 0; j < model.size(); ++j) {
        const double dx = x - model.means[j];
        logp[j] = std::log(model.weights[j]) - 0.5 * (kLogTwoPi + std::log(model.variances[j])) -
                  dx * dx / (2.0 * model.variances[j]);
        m = std::max(m, logp[j]);
    }
    double denom = 0.0;
    for (double lp : logp) denom += std::exp(lp - m);
    return m + std::log(denom);
}

FitResult em_fit(std::span<const double> data, std::size_t k, const FitConfig& config) {
    if (k == 0) throw ConfigError("em_fit: k must be at least 1");
    if (data.size() < k) throw TooFewObservations("em_fit: need at least k observations");
    if (!all_finite(data)) throw NonFiniteInput("em_fit: data contains NaN or infinity");
    if (!(config.tol > 0.0) || !(config.variance_floor_factor > 0.0) || config.restarts == 0 ||
        config.k_max == 0 || config.max_iter == 0)
        throw ConfigError("em_fit: invalid FitConfig");

    const double mean = sample_mean(data);
    const double var = sample_variance(data, mean);
    const double floor = var > 0.0 ? config.variance_floor_factor * var : config.variance_floor_factor;
    std::vector<double> sorted(data.begin(), data.end());
    std::sort(sorted.begin(), sorted.end());

    // Best successful restart by log-likelihood; a failed restart (rescue
    // budget exhausted) is only kept if no restart succeeds.
    RestartOutcome best;
    bool have_any = false;
    for (std::size_t r = 0; r < config.restarts; ++r) {
        RestartOutcome cand = run_em(data, sorted, k, config, r, var, floor);
        const bool upgrade_class = !cand.failed && best.failed;
        const bool same_class = cand.failed == best.failed;
        if (!have_any || upgrade_class || (same_class && cand.loglik > best.loglik)) {
            best = std::move(cand);
            have_any = true;
        }
        if (k == 1) break;  // closed-form fixed point; restarts are redundant
    }

    FitResult result;
    result.model.weights = std::move(best.components.weights);
    result.model.means = std::move(best.components.means);
    result.model.variances = std::move(best.components.variances);
    canonicalize(result.model);
    result.loglik = best.loglik;
    result.n = data.size();
    const double params = 3.0 * static_cast<double>(k) - 1.0;
    result.bic = -2.0 * best.loglik + params * std::log(static_cast<double>(data.size()));
    result.loglik_trace = std::move(best.trace);
    return result;
}

FitResult select_k(std::span<const double> data, const FitConfig& config) {
    if (data.size() < 2) throw TooFewObservations("select_k: need at least 2 observations");
    if (config.k_max == 0) throw ConfigError("select_k: k_max must be at least 1");
    const std::size_t k_hi = std::min<std::size_t>(config.k_max, data.size());
    FitResult best;
    bool first = true;
    for (std::size_t k = 1; k <= k_hi; ++k) {
        FitResult fit = em_fit(data, k, config);
        if (first || fit.bic < best.bic) {
            best = std::move(fit);
            first = false;
        }
    }
    return best;
}

Matrix posterior_memberships(const UnivariateGaussianMixture& model, std::span<const double> data) {
    model.validate();
    if (!all_finite(data)) throw NonFiniteInput("posterior_memberships: data contains NaN or infinity");
    const std::size_t k = model.size();
    Matrix out(data.size(), k);
    std::vector<double> log_const(k), inv_two_var(k), logp(k);
    for (std::size_t j = 0; j < k; ++j) {
        log_const[j] = std::log(model.weights[j]) - 0.5 * (kLogTwoPi + std::log(model.variances[j]));
        inv_two_var[j] = 0.5 / model.variances[j];
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j) {
            const double dx = data[i] - model.means[j];
            logp[j] = log_const[j] - dx * dx * inv_two_var[j];
            m = std::max(m, logp[j]);
        }
        double denom = 0.0;
        for (std::size_t j = 0; j < k; ++j) denom += std::exp(logp[j] - m);
        for (std::size_t j = 0; j < k; ++j) out(i, j) = std::exp(logp[j] - m) / denom;
    }
    return out;
}

}  // namespace r2c
