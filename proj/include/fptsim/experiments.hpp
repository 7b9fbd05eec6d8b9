#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "fptsim/boundary.hpp"
#include "fptsim/bounds.hpp"
#include "fptsim/increments.hpp"
#include "fptsim/limits.hpp"
#include "fptsim/walk.hpp"

namespace fptsim {

struct RunOptions {
    std::size_t reps = 10000;
    std::uint64_t master_seed = 1;
    unsigned workers = 1;
};

/// Calls fn(rep) for rep in [0, reps), splitting contiguous blocks over
/// `workers` threads. fn must only write state owned by its replication.
template <class Fn>
void parallel_replications(std::size_t reps, unsigned workers, Fn&& fn) {
    workers = std::max(1u, workers);
    if (workers == 1 || reps < 2) {
        for (std::size_t r = 0; r < reps; ++r) fn(r);
        return;
    }
    std::vector<std::jthread> pool;
    const std::size_t block = (reps + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = w * block;
        const std::size_t end = std::min(reps, begin + block);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] {
            for (std::size_t r = begin; r < end; ++r) fn(r);
        });
    }
}

/// Empirical distribution of possibly censored samples. Censored samples sit
/// at +infinity: they count toward the total but never toward a finite step.
class EmpiricalCdf {
public:
    explicit EmpiricalCdf(std::span<const std::optional<double>> samples);
    static EmpiricalCdf from_values(std::span<const double> values);

    /// Fraction of samples <= x.
    double operator()(double x) const;
    /// Fraction of samples < x.
    double left_limit(double x) const;
    double censored_mass() const;
    double numeric_mass() const;
    std::size_t total() const { return total_; }
    std::span<const double> sorted_values() const { return sorted_; }

private:
    EmpiricalCdf() = default;
    std::vector<double> sorted_;
    std::size_t total_ = 0;
};

/// sup_x |F_n(x) - law(x)| over both one-sided limits of the ECDF at each
/// sample point; with `include_tails`, also the limits at -/+infinity.
double ks_distance(const EmpiricalCdf& ecdf, const std::function<double(double)>& law, bool include_tails = true);

struct KsComparison {
    double distance = 0.0;
    double law_lower_mass = 0.0;  ///< G(-inf)
    double law_upper_mass = 1.0;  ///< G(+inf)
    double law_deficit = 0.0;     ///< 1 - (G(+inf) - G(-inf))
    double empirical_censored = 0.0;
};

/// KS against a limit law; non-proper laws are compared on their support
/// only and the mass deficits are reported instead.
KsComparison ks_compare(const EmpiricalCdf& ecdf, const LimitLaw& law);

struct GridPoint {
    std::vector<double> u;
    double empirical = 0.0;
    double theory = 0.0;
    double abs_diff = 0.0;
    double std_error = 0.0;  ///< binomial standard error of `empirical`
};

struct Theorem1Report {
    std::vector<std::int64_t> checkpoints;
    RunOptions run;
    std::vector<GridPoint> points;
    double sup_discrepancy = 0.0;
    double max_std_error = 0.0;
    RateBound bound;
};

/// Empirical joint law of the normalized checkpoint maxima of one walk per
/// replication against the ladder normal law, on the product grid `axes`
/// (one axis per checkpoint, or a single axis shared by all).
Theorem1Report run_theorem1(const IncrementSpec& spec, std::vector<std::int64_t> checkpoints,
                            const std::vector<std::vector<double>>& axes, const RunOptions& run,
                            double mvn_tol = 1e-6, double C1 = 1.0);

struct GapMass {
    std::size_t gap = 0;      ///< p: plateau (V_p + D_{p-1}, V_p + D_p] in tau^{(1)} units
    double lower = 0.0;       ///< in tau^{(i)} units
    double upper = 0.0;
    double empirical = 0.0;   ///< fraction with tau > N_p and tau^{(i)} <= upper
};

struct Theorem2Report {
    StepBoundary boundary;
    std::size_t index = 1;
    RunOptions run;
    LawKind law_kind = LawKind::corollary1;
    KsComparison ks;
    std::vector<GapMass> gaps;
    std::vector<std::optional<double>> normalized;  ///< tau^{(i)} per replication, nullopt when censored
    std::vector<std::optional<std::int64_t>> taus;
};

/// Simulates tau against the boundary, normalizes at checkpoint i and
/// compares the ECDF with `law`. Gap masses are reported whenever the law's
/// profile has finite V and Delta.
Theorem2Report run_theorem2(const IncrementSpec& spec, const StepBoundary& boundary, const LimitLaw& law,
                            std::size_t i, const RunOptions& run);
Theorem2Report run_theorem2(const IncrementSpec& spec, const BoundaryTargets& targets,
                            std::vector<std::int64_t> checkpoints, const LimitLaw& law, std::size_t i,
                            const RunOptions& run);

struct SweepRow {
    std::int64_t n = 0;
    std::vector<std::int64_t> checkpoints;
    double sup_discrepancy = 0.0;
    double max_std_error = 0.0;
    double bound_proof = 0.0;
};

struct SweepReport {
    std::vector<SweepRow> rows;
    double fitted_slope = 0.0;  ///< least-squares slope of log(sup discrepancy) on log(n)
};

/// Joint-law experiment repeated over horizons; checkpoints are
/// round(fraction * n). fractions = {1} gives the running-maximum check.
SweepReport convergence_sweep(const IncrementSpec& spec, std::span<const double> fractions,
                              const std::vector<std::vector<double>>& axes, std::span<const std::int64_t> n_values,
                              const RunOptions& run, double mvn_tol = 1e-6, double C1 = 1.0);

/// Least-squares slope of log(y) against log(x).
double log_log_slope(std::span<const double> x, std::span<const double> y);

}  // namespace fptsim
