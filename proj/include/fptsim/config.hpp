#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fptsim/boundary.hpp"
#include "fptsim/increments.hpp"
#include "fptsim/limits.hpp"

namespace fptsim {

/// 64-bit FNV-1a digest as 16 lowercase hex digits.
std::string content_digest(std::string_view text);

struct WalkConfig {
    std::int64_t n = 0;
    std::vector<std::int64_t> checkpoints;
    std::optional<std::vector<double>> levels;    ///< explicit boundary
    std::optional<BoundaryTargets> targets;       ///< designed boundary

    /// The boundary for drift a, designing it from targets when needed.
    StepBoundary boundary(double a) const;
};

struct RunConfig {
    std::size_t reps = 10000;
    std::uint64_t master_seed = 1;
    unsigned workers = 1;
    std::optional<double> sup_discrepancy;  ///< threshold for `joint`
    std::optional<double> ks;               ///< threshold for `compare`
    double mvn_tol = 1e-6;
};

struct OutputConfig {
    std::optional<std::string> report;
    std::optional<std::string> csv;
    std::optional<std::string> samples;
};

struct JointConfig {
    std::vector<std::int64_t> checkpoints;
    std::vector<std::vector<double>> u_axes;
};

struct LawConfig {
    LawKind kind = LawKind::corollary1;
    std::optional<std::vector<ExtendedReal>> V;
    std::optional<std::vector<ExtendedReal>> Delta;
    std::optional<std::vector<double>> alpha;
    std::optional<std::vector<double>> lambda;  ///< adjacent lambda_{j,j+1}
};

struct CompareConfig {
    std::size_t index = 1;
    LawConfig law;
    std::vector<double> curve_grid;
};

struct SweepConfig {
    std::vector<double> fractions{1.0};
    std::vector<std::int64_t> n_values;
    std::vector<std::vector<double>> u_axes;
    std::optional<std::pair<double, double>> slope_range;
};

struct BoundConfig {
    double C0 = 0.82;
    double C1 = 1.0;
};

/// Parsed, schema-checked experiment configuration. Unknown keys are
/// rejected at every level.
struct ExperimentConfig {
    std::string text;    ///< the file exactly as read
    std::string digest;  ///< content_digest(text)
    std::optional<IncrementSpec> distribution;
    std::optional<WalkConfig> walk;
    RunConfig run;
    OutputConfig output;
    std::optional<JointConfig> joint;
    std::optional<CompareConfig> compare;
    std::optional<SweepConfig> sweep;
    BoundConfig bound;
};

/// Throws ConfigError with a message naming the offending key.
ExperimentConfig parse_config(std::string text);

/// Parses "a:b:step" into the inclusive grid a, a+step, ..., <= b.
std::vector<double> parse_grid(std::string_view spec);
/// Parses a real or "inf"/"+inf"/"infinity".
ExtendedReal parse_extended(std::string_view text);

/// Builds a profile for `law` over the given finite-n fallbacks.
LimitProfile profile_from_law(const LawConfig& law);

}  // namespace fptsim
