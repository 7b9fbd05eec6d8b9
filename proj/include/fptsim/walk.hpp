#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fptsim/boundary.hpp"
#include "fptsim/increments.hpp"

namespace fptsim {

/// A fully recorded walk; only used for debugging and replay checks.
struct WalkPath {
    std::vector<double> increments;
    std::vector<double> partial_sums;  ///< S_0 = 0, S_1, ..., S_n
    std::vector<double> running_max;   ///< index j holds max(S_1..S_j); index 0 unused (-inf)
};

struct PassageOutcome {
    std::optional<std::int64_t> tau;     ///< nullopt when censored
    std::optional<double> crossing_level;
    std::vector<double> max_at_checkpoints;  ///< running max at N_1..N_k
    std::size_t checkpoints_recorded = 0;    ///< leading entries of max_at_checkpoints that are valid

    bool censored() const { return !tau.has_value(); }
};

enum class PassageHorizon {
    full,              ///< simulate to n; every checkpoint maximum is recorded
    stop_at_crossing,  ///< stop at tau; only checkpoints up to tau are recorded
};

/// tau = min{ j in 1..n : S_j >= g_n(j/n) }, streaming over the increments
/// of stream `seed` (draw j-1 is xi_j).
PassageOutcome first_passage(const IncrementSpec& spec, const StepBoundary& b, std::uint64_t seed,
                             PassageHorizon horizon = PassageHorizon::full);

WalkPath record_path(const IncrementSpec& spec, std::int64_t n, std::uint64_t seed);

/// True when `outcome` is exactly what the recorded path implies.
bool replay_consistent(const WalkPath& path, const StepBoundary& b, const PassageOutcome& outcome);

/// (max_{j <= N_l} S_j - N_l a) / sqrt(N_l) for each checkpoint.
std::vector<double> running_max_at_checkpoints(const IncrementSpec& spec, std::int64_t n,
                                               std::span<const std::int64_t> checkpoints, std::uint64_t seed);

/// Exact law of tau for raw +/-1 increments with P(+1) = p.
struct LatticeDistribution {
    std::vector<double> tau_mass;  ///< tau_mass[j-1] = P(tau = j)
    double censored = 0.0;

    double total() const;
};

/// Forward dynamic program over the reachable partial sums with absorption
/// at the boundary. Levels must be integers; n <= 10^4.
LatticeDistribution exact_lattice_distribution(double p, std::int64_t n, const StepBoundary& b);

}  // namespace fptsim
