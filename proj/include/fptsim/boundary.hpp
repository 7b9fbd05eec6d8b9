#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fptsim/extended_real.hpp"

namespace fptsim {

/// Non-decreasing step boundary on the grid k/n: level g_{n,l} is active for
/// steps N_{l-1} < j <= N_l, with N_0 = 0 and N_k = n.
class StepBoundary {
public:
    /// Throws DomainError unless checkpoints and levels are non-decreasing,
    /// equally sized and non-empty, and the last checkpoint is >= 1.
    StepBoundary(std::vector<std::int64_t> checkpoints, std::vector<double> levels);

    std::int64_t horizon() const { return checkpoints_.back(); }
    std::size_t size() const { return checkpoints_.size(); }
    std::span<const std::int64_t> checkpoints() const { return checkpoints_; }
    std::span<const double> levels() const { return levels_; }

    /// Level active at step j in [1, n].
    double level_at_step(std::int64_t j) const;
    /// g_n(t) for t in [0, 1]; g_n(0) = 0.
    double evaluate(double t) const;

private:
    std::vector<std::int64_t> checkpoints_;
    std::vector<double> levels_;
};

/// Finite-n normalized offsets V_{n,i} (size k) and step heights
/// Delta_{n,i} (size k-1).
struct NormalizationConstants {
    std::vector<double> V;
    std::vector<double> Delta;
};

/// V_{n,i} = (N_i - g_{n,i}/a) / (a^{-3/2} sqrt(g_{n,i})),
/// Delta_{n,i} = (g_{n,i+1} - g_{n,i}) / sqrt(g_{n,i+1}/a).
/// Throws DomainError when a <= 0 or a level is non-positive.
NormalizationConstants normalization_constants(const StepBoundary& b, double a);

/// tau^{(i)} = (tau - g_{n,i}/a) / (a^{-3/2} sqrt(g_{n,i})), i 1-based.
/// A censored passage (no crossing within the horizon) maps to nullopt.
std::optional<double> normalize_tau(std::optional<std::int64_t> tau, const StepBoundary& b, double a,
                                    std::size_t i);
/// Inverse of normalize_tau for an uncensored value.
double denormalize_tau(double normalized, const StepBoundary& b, double a, std::size_t i);

/// Targets for design_boundary. Level i is fixed by V[i] when present,
/// otherwise by Delta[i-1] relative to level i-1. Exactly one anchor per level.
struct BoundaryTargets {
    std::vector<std::optional<double>> V;
    std::vector<std::optional<double>> Delta;
};

/// Levels realizing the targets exactly at the given checkpoints.
/// Throws InfeasibleTargetError when no positive root exists, an anchor is
/// missing or duplicated, or the levels would decrease.
StepBoundary design_boundary(const BoundaryTargets& targets, double a, std::vector<std::int64_t> checkpoints);

/// Limit parameters of a boundary family. Indices in the accessors are
/// 1-based to follow the usual checkpoint numbering.
struct LimitProfile {
    std::size_t k0 = 0;                  ///< number of leading finite V
    std::vector<ExtendedReal> V;         ///< V_1..V_m
    std::vector<ExtendedReal> Delta;     ///< Delta_1..Delta_{m-1}
    std::vector<double> adjacent_lambda; ///< lambda_{j,j+1}, j = 1..m-1
    std::vector<double> alpha;           ///< lim g_{n,j}/g_{n,j+1}, j = 1..m-1

    /// Builds a profile with lambda == 1 everywhere (finite-Delta regime).
    static LimitProfile unit_lambda(std::vector<ExtendedReal> V, std::vector<ExtendedReal> Delta);

    std::size_t size() const { return V.size(); }
    /// lambda_{ij} for i <= j, mirrored for i > j; lambda_{0,i} = 1.
    double lambda(std::size_t i, std::size_t j) const;
    /// lim g_{n,i}/g_{n,j} for i <= j from alpha, mirrored for i > j;
    /// index 0 gives 1. Equals lambda(i, j) for i, j <= k0 on realizable
    /// profiles; the limit laws use this ratio throughout.
    double level_ratio(std::size_t i, std::size_t j) const;
    ExtendedReal v(std::size_t i) const { return V.at(i - 1); }
    ExtendedReal delta(std::size_t i) const { return Delta.at(i - 1); }

    /// Throws DomainError when V is not strictly increasing where finite,
    /// lambda is outside (0, 1] or alpha outside (0, 1].
    void validate() const;
};

struct ExtrapolatedProfile {
    LimitProfile profile;
    double residual = 0.0;  ///< largest |limit estimate - last finite-n value|
};

/// Estimates limit parameters from boundaries at growing n (ordered by
/// horizon). Finite entries are Richardson-extrapolated assuming
/// O(n^{-1/2}) convergence; an entry growing monotonically past
/// `divergence_threshold` is reported as +infinity.
ExtrapolatedProfile limit_profile_of(std::span<const StepBoundary> boundaries, double a,
                                     double divergence_threshold = 1e6);

}  // namespace fptsim
