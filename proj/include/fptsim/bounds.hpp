#pragma once

#include <cstdint>
#include <vector>

#include "fptsim/increments.hpp"

namespace fptsim {

/// Inputs of the rate bound for the joint law of normalized running maxima.
/// C1 has no published numeric value; it is a user parameter and is echoed
/// in every result.
struct RateBoundConfig {
    double C0 = 0.82;
    double C1 = 1.0;
    std::vector<std::int64_t> checkpoints;
    double abs_mean = 0.0;  ///< E|xi_1|
    double beta3 = 1.0;     ///< E|xi_1 - a|^3
    double drift = 1.0;     ///< a

    static RateBoundConfig from_spec(const IncrementSpec& spec, std::vector<std::int64_t> checkpoints,
                                     double C1 = 1.0, double C0 = 0.82);
};

struct RateBound {
    /// C1~ sum N_i^{-1/2} + C0 beta3 sum 2^{k-i} (N_i - N_{i-1})^{-1/2}
    double bound_proof = 0.0;
    /// Same with the weight 2^{k-1} on every term.
    double bound_statement = 0.0;
    double c1_used = 0.0;
    double c1_tilde = 0.0;  ///< C1 * max(E|xi|, beta3, beta3/a)^2
};

/// A zero gap N_i = N_{i-1} makes both variants +infinity.
/// Throws DomainError for C0 <= 0, a <= 0 or non-positive checkpoints.
RateBound theorem3_bound(const RateBoundConfig& cfg);

}  // namespace fptsim
