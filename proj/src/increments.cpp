#include "fptsim/increments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "fptsim/errors.hpp"
#include "fptsim/gaussian.hpp"
#include "fptsim/rng.hpp"

namespace fptsim {

namespace {

// E|Z|^3 for Z ~ N(0, 1).
const double kNormalAbsThird = 2.0 * std::sqrt(2.0 / std::numbers::pi);
// E|E - 1|^3 for E ~ Exp(1): int_0^1 (1-x)^3 e^-x dx + int_1^inf (x-1)^3 e^-x dx.
const double kExponentialAbsThird = 12.0 / std::numbers::e - 2.0;

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw DomainError(std::string(what) + " must be finite");
}

}  // namespace

std::string_view to_string(Family family) {
    switch (family) {
        case Family::shifted_normal: return "shifted-normal";
        case Family::standardized_exponential: return "standardized-exponential";
        case Family::two_point: return "two-point";
        case Family::custom_discrete: return "custom-discrete";
    }
    return "unknown";
}

Family parse_family(std::string_view name) {
    if (name == "shifted-normal") return Family::shifted_normal;
    if (name == "standardized-exponential") return Family::standardized_exponential;
    if (name == "two-point") return Family::two_point;
    if (name == "custom-discrete") return Family::custom_discrete;
    throw UnsupportedFamilyError("unsupported distribution family '" + std::string(name) + "'");
}

IncrementSpec IncrementSpec::shifted_normal(double mean, double variance) {
    require_finite(mean, "normal mean");
    require_finite(variance, "normal variance");
    if (variance < 0) throw DomainError("normal variance must be non-negative");
    IncrementSpec s;
    s.family_ = Family::shifted_normal;
    s.location_ = mean;
    s.scale_ = std::sqrt(variance);
    s.mean_ = mean;
    s.variance_ = variance;
    s.raw_sigma_ = s.scale_;
    s.beta3_ = kNormalAbsThird * s.scale_ * s.scale_ * s.scale_;
    s.standardized_ = variance == 1.0;
    return s;
}

IncrementSpec IncrementSpec::exponential(double rate, double shift) {
    require_finite(rate, "exponential rate");
    require_finite(shift, "exponential shift");
    if (rate <= 0) throw DomainError("exponential rate must be positive");
    IncrementSpec s;
    s.family_ = Family::standardized_exponential;
    s.location_ = shift;
    s.scale_ = 1.0 / rate;
    s.mean_ = shift + s.scale_;
    s.variance_ = s.scale_ * s.scale_;
    s.raw_sigma_ = s.scale_;
    s.beta3_ = kExponentialAbsThird * s.scale_ * s.scale_ * s.scale_;
    s.standardized_ = rate == 1.0;
    return s;
}

IncrementSpec IncrementSpec::two_point(double low, double high, double p_high) {
    if (!(p_high >= 0.0 && p_high <= 1.0)) throw DomainError("two-point probability must lie in [0, 1]");
    require_finite(low, "two-point value");
    require_finite(high, "two-point value");
    IncrementSpec s;
    s.family_ = Family::two_point;
    s.values_ = {low, high};
    s.probs_ = {1.0 - p_high, p_high};
    s.finish_discrete();
    return s;
}

IncrementSpec IncrementSpec::discrete(std::vector<double> values, std::vector<double> probs) {
    if (values.empty() || values.size() != probs.size())
        throw DomainError("custom-discrete needs matching non-empty values and probs");
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        require_finite(values[i], "custom-discrete value");
        if (!(probs[i] >= 0.0) || !std::isfinite(probs[i]))
            throw DomainError("custom-discrete probabilities must be non-negative");
        total += probs[i];
    }
    if (!(total > 0.0)) throw DomainError("custom-discrete probabilities sum to zero");
    for (double& p : probs) p /= total;
    IncrementSpec s;
    s.family_ = Family::custom_discrete;
    s.values_ = std::move(values);
    s.probs_ = std::move(probs);
    s.finish_discrete();
    return s;
}

IncrementSpec IncrementSpec::constant(double c) { return discrete({c}, {1.0}); }

void IncrementSpec::finish_discrete() {
    cumulative_.resize(probs_.size());
    std::partial_sum(probs_.begin(), probs_.end(), cumulative_.begin());
    cumulative_.back() = 1.0;
    double mean = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) mean += probs_[i] * values_[i];
    double var = 0.0;
    double third = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double d = std::abs(values_[i] - mean);
        var += probs_[i] * d * d;
        third += probs_[i] * d * d * d;
    }
    location_ = 0.0;
    scale_ = 1.0;
    mean_ = mean;
    variance_ = var;
    raw_sigma_ = std::sqrt(var);
    beta3_ = third;
    standardized_ = var == 1.0;
}

double IncrementSpec::absolute_mean() const {
    switch (family_) {
        case Family::shifted_normal: {
            if (scale_ == 0.0) return std::abs(location_);
            const double r = location_ / scale_;
            return location_ * (1.0 - 2.0 * phi_cdf(-r)) + 2.0 * scale_ * phi_pdf(r);
        }
        case Family::standardized_exponential: {
            // location + scale * E; the negative part lives on E < d = -location / scale.
            const double d = -location_ / scale_;
            if (d <= 0.0) return mean_;
            return mean_ + 2.0 * scale_ * (d - 1.0 + std::exp(-d));
        }
        case Family::two_point:
        case Family::custom_discrete: {
            double e = 0.0;
            for (std::size_t i = 0; i < values_.size(); ++i)
                e += probs_[i] * std::abs(location_ + scale_ * values_[i]);
            return e;
        }
    }
    return 0.0;
}

std::vector<double> IncrementSpec::params() const {
    switch (family_) {
        case Family::shifted_normal: return {mean_, variance_};
        case Family::standardized_exponential: return {1.0 / scale_, location_};
        case Family::two_point: {
            const auto pts = support();
            return {pts[0], pts[1], probs_[1]};
        }
        case Family::custom_discrete: {
            std::vector<double> out;
            const auto pts = support();
            for (std::size_t i = 0; i < pts.size(); ++i) {
                out.push_back(pts[i]);
                out.push_back(probs_[i]);
            }
            return out;
        }
    }
    return {};
}

std::vector<double> IncrementSpec::support() const {
    std::vector<double> out;
    out.reserve(values_.size());
    for (double v : values_) out.push_back(location_ + scale_ * v);
    return out;
}

double IncrementSpec::from_uniform(double u) const {
    switch (family_) {
        case Family::standardized_exponential:
            return location_ + scale_ * -std::log(u);
        case Family::two_point:
            return location_ + scale_ * (u < probs_[0] ? values_[0] : values_[1]);
        case Family::custom_discrete: {
            const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
            const auto k = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                                 values_.size() - 1);
            return location_ + scale_ * values_[k];
        }
        case Family::shifted_normal:
            break;
    }
    return 0.0;
}

void IncrementSpec::block(std::uint64_t seed, std::uint64_t b, double& even, double& odd) const {
    const UniformPair u = uniform_pair(seed, b);
    if (family_ == Family::shifted_normal) {
        // Box-Muller: both coordinates of one polar pair.
        const double r = std::sqrt(-2.0 * std::log(u.first));
        const double theta = 2.0 * std::numbers::pi * u.second;
        even = location_ + scale_ * (r * std::cos(theta));
        odd = location_ + scale_ * (r * std::sin(theta));
        return;
    }
    even = from_uniform(u.first);
    odd = from_uniform(u.second);
}

double IncrementSpec::draw(std::uint64_t seed, std::uint64_t index) const {
    double even, odd;
    block(seed, index >> 1, even, odd);
    return index & 1 ? odd : even;
}

void IncrementSpec::fill(std::uint64_t seed, std::uint64_t first, std::span<double> out) const {
    std::size_t k = 0;
    if (first & 1 && k < out.size()) out[k++] = draw(seed, first);
    // out[k] is an even draw from here on.
    const std::size_t blocks = (out.size() - k) / 2;
    constexpr std::size_t kChunk = 64;
    double u[2 * kChunk];
    for (std::size_t done = 0; done < blocks;) {
        const std::size_t m = std::min(kChunk, blocks - done);
        uniform_pairs(seed, (first + k) >> 1, m, u);
        double* dst = out.data() + k;
        if (family_ == Family::shifted_normal) {
            for (std::size_t b = 0; b < m; ++b) {
                const double r = std::sqrt(-2.0 * std::log(u[2 * b]));
                const double theta = 2.0 * std::numbers::pi * u[2 * b + 1];
                dst[2 * b] = location_ + scale_ * (r * std::cos(theta));
                dst[2 * b + 1] = location_ + scale_ * (r * std::sin(theta));
            }
        } else if (family_ == Family::standardized_exponential) {
            for (std::size_t t = 0; t < 2 * m; ++t) dst[t] = location_ + scale_ * -std::log(u[t]);
        } else if (family_ == Family::two_point) {
            const double low = location_ + scale_ * values_[0];
            const double high = location_ + scale_ * values_[1];
            for (std::size_t t = 0; t < 2 * m; ++t) dst[t] = u[t] < probs_[0] ? low : high;
        } else {
            for (std::size_t t = 0; t < 2 * m; ++t) dst[t] = from_uniform(u[t]);
        }
        k += 2 * m;
        done += m;
    }
    if (k < out.size()) out[k] = draw(seed, first + k);
}

IncrementSpec standardize(const IncrementSpec& raw) {
    if (raw.standardized_) return raw;
    if (!std::isfinite(raw.variance_) || !(raw.variance_ > 0.0))
        throw StandardizationError("cannot standardize: variance is zero or not finite");
    if (!std::isfinite(raw.mean_)) throw StandardizationError("cannot standardize: mean is not finite");
    const double sigma = std::sqrt(raw.variance_);
    IncrementSpec s = raw;
    s.location_ = raw.location_ / sigma;
    s.scale_ = raw.scale_ / sigma;
    s.mean_ = raw.mean_ / sigma;
    s.variance_ = 1.0;
    s.raw_sigma_ = sigma;
    s.beta3_ = raw.beta3_ / (sigma * sigma * sigma);
    s.standardized_ = true;
    return s;
}

std::vector<double> sample_stream(const IncrementSpec& spec, std::uint64_t seed, std::size_t count) {
    std::vector<double> out(count);
    spec.fill(seed, 0, out);
    return out;
}

double beta3(const IncrementSpec& spec) { return spec.beta3(); }

}  // namespace fptsim
