#include "fptsim/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fptsim/errors.hpp"

namespace fptsim {

StepBoundary::StepBoundary(std::vector<std::int64_t> checkpoints, std::vector<double> levels)
    : checkpoints_(std::move(checkpoints)), levels_(std::move(levels)) {
    if (checkpoints_.empty() || checkpoints_.size() != levels_.size())
        throw DomainError("step boundary: checkpoints and levels must be non-empty and of equal length");
    std::int64_t previous = 0;
    for (std::int64_t n : checkpoints_) {
        if (n < previous) throw DomainError("step boundary: checkpoints must be non-decreasing from 0");
        previous = n;
    }
    if (checkpoints_.back() < 1) throw DomainError("step boundary: horizon must be at least 1");
    for (std::size_t l = 0; l < levels_.size(); ++l) {
        if (!std::isfinite(levels_[l])) throw DomainError("step boundary: levels must be finite");
        if (l > 0 && levels_[l] < levels_[l - 1]) throw DomainError("step boundary: levels must be non-decreasing");
    }
}

double StepBoundary::level_at_step(std::int64_t j) const {
    if (j < 1 || j > horizon()) throw DomainError("step boundary: step outside [1, n]");
    const auto it = std::lower_bound(checkpoints_.begin(), checkpoints_.end(), j);
    return levels_[static_cast<std::size_t>(it - checkpoints_.begin())];
}

double StepBoundary::evaluate(double t) const {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("step boundary: t outside [0, 1]");
    if (t == 0.0) return 0.0;
    const double n = static_cast<double>(horizon());
    for (std::size_t l = 0; l < checkpoints_.size(); ++l) {
        if (t <= static_cast<double>(checkpoints_[l]) / n) return levels_[l];
    }
    return levels_.back();
}

namespace {

void require_drift(double a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("drift a must be positive and finite");
}

// a^{-3/2} sqrt(g): the scale of tau around g / a.
double passage_scale(double g, double a) { return std::sqrt(g) / (a * std::sqrt(a)); }

}  // namespace

NormalizationConstants normalization_constants(const StepBoundary& b, double a) {
    require_drift(a);
    NormalizationConstants out;
    const auto N = b.checkpoints();
    const auto g = b.levels();
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (!(g[i] > 0.0)) throw DomainError("normalization: level " + std::to_string(i + 1) + " is not positive");
        out.V.push_back((static_cast<double>(N[i]) - g[i] / a) / passage_scale(g[i], a));
    }
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        out.Delta.push_back((g[i + 1] - g[i]) / std::sqrt(g[i + 1] / a));
    }
    return out;
}

std::optional<double> normalize_tau(std::optional<std::int64_t> tau, const StepBoundary& b, double a,
                                    std::size_t i) {
    require_drift(a);
    if (i < 1 || i > b.size()) throw DomainError("normalize_tau: reference index out of range");
    const double g = b.levels()[i - 1];
    if (!(g > 0.0)) throw DomainError("normalize_tau: reference level is not positive");
    if (!tau) return std::nullopt;
    return (static_cast<double>(*tau) - g / a) / passage_scale(g, a);
}

double denormalize_tau(double normalized, const StepBoundary& b, double a, std::size_t i) {
    require_drift(a);
    if (i < 1 || i > b.size()) throw DomainError("denormalize_tau: reference index out of range");
    const double g = b.levels()[i - 1];
    if (!(g > 0.0)) throw DomainError("denormalize_tau: reference level is not positive");
    return normalized * passage_scale(g, a) + g / a;
}

namespace {

// Positive root of t^2 + p t - q = 0 with q > 0, without cancellation.
double positive_root(double p, double q) {
    const double disc = std::sqrt(p * p + 4.0 * q);
    return p > 0.0 ? 2.0 * q / (p + disc) : (disc - p) / 2.0;
}

}  // namespace

StepBoundary design_boundary(const BoundaryTargets& targets, double a, std::vector<std::int64_t> checkpoints) {
    require_drift(a);
    const std::size_t k = checkpoints.size();
    if (k == 0) throw InfeasibleTargetError("design_boundary: no checkpoints");
    if (targets.V.size() > k || targets.Delta.size() + 1 > std::max<std::size_t>(k, 1))
        throw InfeasibleTargetError("design_boundary: more targets than checkpoints");

    auto v_target = [&](std::size_t i) -> std::optional<double> {
        return i < targets.V.size() ? targets.V[i] : std::nullopt;
    };
    auto delta_target = [&](std::size_t i) -> std::optional<double> {  // step from level i to i+1
        return i < targets.Delta.size() ? targets.Delta[i] : std::nullopt;
    };

    std::vector<double> levels(k);
    const double sqrt_a = std::sqrt(a);
    for (std::size_t i = 0; i < k; ++i) {
        const auto v = v_target(i);
        const auto d = i > 0 ? delta_target(i - 1) : std::nullopt;
        if (v && d)
            throw InfeasibleTargetError("design_boundary: level " + std::to_string(i + 1) +
                                        " is anchored by both V and Delta");
        if (v) {
            if (!std::isfinite(*v)) throw InfeasibleTargetError("design_boundary: V target must be finite");
            const double n = static_cast<double>(checkpoints[i]);
            if (!(n > 0.0)) throw InfeasibleTargetError("design_boundary: V anchor at an empty checkpoint");
            // s = sqrt(g):  s^2 + (V / sqrt(a)) s - a N = 0
            const double s = positive_root(*v / sqrt_a, a * n);
            levels[i] = s * s;
        } else if (d) {
            if (!std::isfinite(*d)) throw InfeasibleTargetError("design_boundary: Delta target must be finite");
            // t = sqrt(g'):  t^2 - (Delta / sqrt(a)) t - g = 0
            const double t = positive_root(-*d / sqrt_a, levels[i - 1]);
            levels[i] = t * t;
        } else {
            throw InfeasibleTargetError("design_boundary: level " + std::to_string(i + 1) + " has no anchor");
        }
        if (!(levels[i] > 0.0) || !std::isfinite(levels[i]))
            throw InfeasibleTargetError("design_boundary: no positive root for level " + std::to_string(i + 1));
        if (i > 0 && levels[i] < levels[i - 1])
            throw InfeasibleTargetError("design_boundary: targets force a decreasing boundary at level " +
                                        std::to_string(i + 1));
    }
    try {
        return StepBoundary(std::move(checkpoints), std::move(levels));
    } catch (const DomainError& e) {
        throw InfeasibleTargetError(std::string("design_boundary: ") + e.what());
    }
}

LimitProfile LimitProfile::unit_lambda(std::vector<ExtendedReal> V, std::vector<ExtendedReal> Delta) {
    LimitProfile p;
    p.V = std::move(V);
    p.Delta = std::move(Delta);
    if (p.V.empty()) throw ShapeError("limit profile: empty V");
    p.Delta.resize(p.V.size() - 1, ExtendedReal(0.0));
    p.adjacent_lambda.assign(p.V.size() - 1, 1.0);
    p.alpha.assign(p.V.size() - 1, 1.0);
    p.k0 = 0;
    while (p.k0 < p.V.size() && p.V[p.k0].is_finite()) ++p.k0;
    return p;
}

double LimitProfile::lambda(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    if (i == 0) return 1.0;
    if (j > V.size()) throw DomainError("limit profile: lambda index out of range");
    double prod = 1.0;
    for (std::size_t s = i; s < j; ++s) prod *= adjacent_lambda.at(s - 1);
    return prod;
}

double LimitProfile::level_ratio(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    if (i == 0) return 1.0;
    if (j > V.size()) throw DomainError("limit profile: ratio index out of range");
    double prod = 1.0;
    for (std::size_t s = i; s < j; ++s) prod *= alpha.at(s - 1);
    return prod;
}

void LimitProfile::validate() const {
    if (V.empty()) throw ShapeError("limit profile: empty V");
    if (adjacent_lambda.size() + 1 != V.size() || alpha.size() + 1 != V.size() || Delta.size() + 1 < V.size())
        throw ShapeError("limit profile: inconsistent sizes");
    for (std::size_t i = 1; i < V.size(); ++i) {
        if (V[i - 1].is_finite() && V[i].is_finite() && !(V[i - 1].value() < V[i].value()))
            throw DomainError("limit profile: V must be strictly increasing where finite");
        if (V[i - 1].is_infinite() && V[i].is_finite())
            throw DomainError("limit profile: finite V after an infinite one");
    }
    for (double l : adjacent_lambda)
        if (!(l > 0.0 && l <= 1.0)) throw DomainError("limit profile: lambda must lie in (0, 1]");
    for (double al : alpha)
        if (!(al > 0.0 && al <= 1.0)) throw DomainError("limit profile: alpha must lie in (0, 1]");
}

namespace {

struct Estimate {
    ExtendedReal value;
    double residual = 0.0;
};

Estimate extrapolate(std::span<const double> x, std::span<const double> n, double threshold) {
    const std::size_t m = x.size();
    if (m >= 2) {
        bool increasing = true;
        for (std::size_t t = 1; t < m; ++t) increasing = increasing && x[t] > x[t - 1];
        if (increasing && x[m - 1] > threshold) return {ExtendedReal::infinity(), 0.0};
    }
    if (m == 1 || x[m - 1] == x[m - 2]) return {ExtendedReal(x[m - 1]), 0.0};
    const double r1 = std::sqrt(n[m - 2]);
    const double r2 = std::sqrt(n[m - 1]);
    const double limit = (x[m - 1] * r2 - x[m - 2] * r1) / (r2 - r1);
    return {ExtendedReal(limit), std::abs(limit - x[m - 1])};
}

}  // namespace

ExtrapolatedProfile limit_profile_of(std::span<const StepBoundary> boundaries, double a,
                                     double divergence_threshold) {
    require_drift(a);
    if (boundaries.empty()) throw ShapeError("limit_profile_of: no boundaries");
    const std::size_t k = boundaries.front().size();
    for (const auto& b : boundaries) {
        if (b.size() != k) throw ShapeError("limit_profile_of: boundaries differ in the number of checkpoints");
    }
    for (std::size_t t = 1; t < boundaries.size(); ++t) {
        if (boundaries[t].horizon() <= boundaries[t - 1].horizon())
            throw ShapeError("limit_profile_of: horizons must be strictly increasing");
        for (std::size_t l = 0; l < k; ++l) {
            const double f0 = static_cast<double>(boundaries[0].checkpoints()[l]) /
                              static_cast<double>(boundaries[0].horizon());
            const double f1 = static_cast<double>(boundaries[t].checkpoints()[l]) /
                              static_cast<double>(boundaries[t].horizon());
            if (std::abs(f0 - f1) > 1e-3) throw ShapeError("limit_profile_of: checkpoint fractions differ");
        }
    }

    const std::size_t m = boundaries.size();
    std::vector<double> horizons(m);
    std::vector<NormalizationConstants> consts;
    for (std::size_t t = 0; t < m; ++t) {
        horizons[t] = static_cast<double>(boundaries[t].horizon());
        consts.push_back(normalization_constants(boundaries[t], a));
    }

    ExtrapolatedProfile out;
    std::vector<double> series(m);
    auto run = [&](auto&& value_at) {
        for (std::size_t t = 0; t < m; ++t) series[t] = value_at(t);
        Estimate e = extrapolate(series, horizons, divergence_threshold);
        out.residual = std::max(out.residual, e.residual);
        return e.value;
    };
    auto ratio_limit = [&](auto&& value_at) {
        for (std::size_t t = 0; t < m; ++t) series[t] = value_at(t);
        Estimate e = extrapolate(series, horizons, std::numeric_limits<double>::infinity());
        out.residual = std::max(out.residual, e.residual);
        return std::clamp(e.value.value(), std::numeric_limits<double>::min(), 1.0);
    };

    LimitProfile& p = out.profile;
    for (std::size_t i = 0; i < k; ++i) p.V.push_back(run([&](std::size_t t) { return consts[t].V[i]; }));
    for (std::size_t i = 0; i + 1 < k; ++i) {
        p.Delta.push_back(run([&](std::size_t t) { return consts[t].Delta[i]; }));
        p.adjacent_lambda.push_back(ratio_limit([&](std::size_t t) {
            const auto N = boundaries[t].checkpoints();
            return static_cast<double>(N[i]) / static_cast<double>(N[i + 1]);
        }));
        p.alpha.push_back(ratio_limit([&](std::size_t t) {
            const auto g = boundaries[t].levels();
            return g[i] / g[i + 1];
        }));
    }
    while (p.k0 < p.V.size() && p.V[p.k0].is_finite()) ++p.k0;
    return out;
}

}  // namespace fptsim
