#include "r2c/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace r2c {

namespace {

/// Uniform draw strictly inside (0, 1), built from the top 53 bits.
double next_uniform(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

double clayton_conditional(double u, double w, double theta) {
    return std::pow(u, -theta) * (std::pow(w, -theta / (theta + 1.0)) - 1.0) + 1.0;
}

struct MarginComponent {
    double weight;
    double mean;
    double variance;
};

UnivariateGaussianMixture merge_components(std::vector<MarginComponent> comps) {
    std::sort(comps.begin(), comps.end(), [](const MarginComponent& a, const MarginComponent& b) {
        if (a.mean != b.mean) return a.mean < b.mean;
        return a.variance < b.variance;
    });
    UnivariateGaussianMixture out;
    for (const auto& c : comps) {
        if (!out.means.empty() && out.means.back() == c.mean && out.variances.back() == c.variance) {
            out.weights.back() += c.weight;
        } else {
            out.weights.push_back(c.weight);
            out.means.push_back(c.mean);
            out.variances.push_back(c.variance);
        }
    }
    return out;
}

constexpr double kS1MeanX[3] = {-3.0, 3.0, 0.0};
constexpr double kS1MeanY[3] = {3.0, 3.0, -3.0};
constexpr double kS1CholYX[3] = {0.5, -0.5, 0.0};  // L21 of the covariance Cholesky
const double kS1CholYY[3] = {std::sqrt(0.75), std::sqrt(0.75), 1.0};

constexpr double kS2MeanX[3] = {-5.0, 3.0, 3.0};
constexpr double kS2MeanY[3] = {-5.0, 2.5, 5.0};
constexpr double kS2SdX = 4.0;
constexpr double kS2SdY = 1.0;

void validate(const ScenarioSpec& spec) {
    switch (spec.variant) {
        case Scenario::s1:
            if (spec.n == 0) throw InvalidSpec("scenario 1 requires n >= 1");
            break;
        case Scenario::s2:
            if (spec.n == 0) throw InvalidSpec("scenario 2 requires n >= 1");
            if (!(spec.theta > 0.0)) throw InvalidSpec("scenario 2 requires theta > 0");
            break;
        case Scenario::s3:
            if (spec.d < 2) throw InvalidSpec("scenario 3 requires d >= 2");
            break;
    }
}

}  // namespace

std::size_t ScenarioSpec::components() const {
    if (variant == Scenario::s3)
        return static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(d) + 1.0)));
    return 3;
}

std::size_t ScenarioSpec::sample_size() const {
    if (n > 0) return n;
    if (variant == Scenario::s3)
        return static_cast<std::size_t>(std::floor(10.0 * std::pow(static_cast<double>(d), 1.5)));
    throw InvalidSpec("scenario requires an explicit n");
}

double normal_quantile(double p) {
    // Wichura (1988), algorithm AS 241, PPND16.
    if (!(p > 0.0 && p < 1.0)) throw Error("normal_quantile: p must be in (0, 1)");
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                  6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
              1.3314166789178437745e2) * r + 3.3871328727963666080e0) * q;
        const double den =
            ((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0;
        return num / den;
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            ((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                 2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
               3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
             4.63033784615654529590e0) * r + 1.42343711074968357734e0;
        const double den =
            ((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                 1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
               6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
             2.05319162663775882187e0) * r + 1.0;
        value = num / den;
    } else {
        r -= 5.0;
        const double num =
            ((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                 1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
               2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
             5.46378491116411436990e0) * r + 6.65790464350110377720e0;
        const double den =
            ((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                 1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
               1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
             5.99832206555887937690e-1) * r + 1.0;
        value = num / den;
    }
    return q < 0.0 ? -value : value;
}

Matrix sample_clayton(double theta, std::size_t count, std::uint64_t seed) {
    if (!(theta > 0.0)) throw InvalidTheta("sample_clayton: theta must be positive");
    Matrix out(count, 2);
    for (std::size_t i = 0; i < count; ++i) {
        std::mt19937_64 rng(mix_seed(seed, i));
        const double u = next_uniform(rng);
        const double w = next_uniform(rng);
        out(i, 0) = u;
        out(i, 1) = std::pow(clayton_conditional(u, w, theta), -1.0 / theta);
    }
    return out;
}

LabeledSample generate_scenario(const ScenarioSpec& spec) {
    validate(spec);
    const std::size_t n = spec.sample_size();
    const std::size_t d = spec.dimension();
    const std::size_t k = spec.components();

    LabeledSample sample;
    sample.points = Matrix(n, d);
    sample.labels.resize(n);

    const double s3_shift = static_cast<double>(spec.d) / std::sqrt(2.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::mt19937_64 rng(mix_seed(spec.seed, i));
        const auto component =
            std::min<std::size_t>(k - 1, static_cast<std::size_t>(next_uniform(rng) * k));
        sample.labels[i] = static_cast<int>(component);
        auto row = sample.points.row(i);

        switch (spec.variant) {
            case Scenario::s1: {
                const double z1 = normal_quantile(next_uniform(rng));
                const double z2 = normal_quantile(next_uniform(rng));
                row[0] = kS1MeanX[component] + z1;
                row[1] = kS1MeanY[component] + kS1CholYX[component] * z1 + kS1CholYY[component] * z2;
                break;
            }
            case Scenario::s2: {
                const double u = next_uniform(rng);
                const double w = next_uniform(rng);
                const double v = std::pow(clayton_conditional(u, w, spec.theta), -1.0 / spec.theta);
                row[0] = kS2MeanX[component] + kS2SdX * normal_quantile(u);
                row[1] = kS2MeanY[component] + kS2SdY * normal_quantile(v);
                break;
            }
            case Scenario::s3: {
                for (std::size_t j = 0; j < d; ++j) row[j] = normal_quantile(next_uniform(rng));
                row[component] += s3_shift;
                break;
            }
        }
    }
    return sample;
}

UnivariateGaussianMixture true_marginal_mixture(const ScenarioSpec& spec, std::size_t margin) {
    validate(spec);
    if (margin >= spec.dimension())
        throw DimensionMismatch("true_marginal_mixture: margin out of range");

    std::vector<MarginComponent> comps;
    switch (spec.variant) {
        case Scenario::s1:
            for (std::size_t c = 0; c < 3; ++c)
                comps.push_back({1.0 / 3.0, margin == 0 ? kS1MeanX[c] : kS1MeanY[c], 1.0});
            break;
        case Scenario::s2:
            for (std::size_t c = 0; c < 3; ++c)
                comps.push_back({1.0 / 3.0, margin == 0 ? kS2MeanX[c] : kS2MeanY[c],
                                 margin == 0 ? kS2SdX * kS2SdX : kS2SdY * kS2SdY});
            break;
        case Scenario::s3: {
            const std::size_t k = spec.components();
            const double shift = static_cast<double>(spec.d) / std::sqrt(2.0);
            for (std::size_t c = 0; c < k; ++c)
                comps.push_back({1.0 / static_cast<double>(k), margin == c ? shift : 0.0, 1.0});
            break;
        }
    }
    return merge_components(std::move(comps));
}

}  // namespace r2c
