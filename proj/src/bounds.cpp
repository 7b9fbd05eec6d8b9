#include "fptsim/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fptsim/errors.hpp"

namespace fptsim {

RateBoundConfig RateBoundConfig::from_spec(const IncrementSpec& spec, std::vector<std::int64_t> checkpoints,
                                           double C1, double C0) {
    RateBoundConfig cfg;
    cfg.C0 = C0;
    cfg.C1 = C1;
    cfg.checkpoints = std::move(checkpoints);
    cfg.abs_mean = spec.absolute_mean();
    cfg.beta3 = spec.beta3();
    cfg.drift = spec.drift();
    return cfg;
}

RateBound theorem3_bound(const RateBoundConfig& cfg) {
    if (!(cfg.C0 > 0.0)) throw DomainError("rate bound: C0 must be positive");
    if (!(cfg.C1 >= 0.0)) throw DomainError("rate bound: C1 must be non-negative");
    if (!(cfg.drift > 0.0)) throw DomainError("rate bound: drift must be positive");
    if (cfg.checkpoints.empty()) throw DomainError("rate bound: no checkpoints");
    std::int64_t previous = 0;
    for (std::int64_t n : cfg.checkpoints) {
        if (n < 1 || n < previous) throw DomainError("rate bound: checkpoints must be positive and non-decreasing");
        previous = n;
    }

    const double m = std::max({cfg.abs_mean, cfg.beta3, cfg.beta3 / cfg.drift});
    RateBound out;
    out.c1_used = cfg.C1;
    out.c1_tilde = cfg.C1 * m * m;

    const std::size_t k = cfg.checkpoints.size();
    double maxima_term = 0.0;
    double weighted_proof = 0.0;
    double weighted_statement = 0.0;
    bool zero_gap = false;
    previous = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const std::int64_t n = cfg.checkpoints[i];
        maxima_term += 1.0 / std::sqrt(static_cast<double>(n));
        const std::int64_t gap = n - previous;
        previous = n;
        if (gap == 0) {
            zero_gap = true;
            continue;
        }
        const double term = 1.0 / std::sqrt(static_cast<double>(gap));
        weighted_proof += std::ldexp(term, static_cast<int>(k - 1 - i));   // 2^{k-i}, i 1-based
        weighted_statement += std::ldexp(term, static_cast<int>(k - 1));  // 2^{k-1}
    }
    if (zero_gap) {
        out.bound_proof = out.bound_statement = std::numeric_limits<double>::infinity();
        return out;
    }
    out.bound_proof = out.c1_tilde * maxima_term + cfg.C0 * cfg.beta3 * weighted_proof;
    out.bound_statement = out.c1_tilde * maxima_term + cfg.C0 * cfg.beta3 * weighted_statement;
    return out;
}

}  // namespace fptsim
