#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fptsim {

enum class Family { shifted_normal, standardized_exponential, two_point, custom_discrete };

std::string_view to_string(Family family);
Family parse_family(std::string_view name);  // throws UnsupportedFamilyError

/// Distribution of the walk increments xi_i.
///
/// Every family is represented as `location + scale * B` where B is a base
/// variable (standard normal, Exp(1), or a finite support). Moments are
/// tracked analytically, so a standardized spec has variance exactly 1.
/// Instances are immutable values.
class IncrementSpec {
public:
    /// Normal(mean, variance).
    static IncrementSpec shifted_normal(double mean, double variance);
    /// shift + Exp(rate).
    static IncrementSpec exponential(double rate, double shift = 0.0);
    /// `high` with probability p_high, `low` otherwise.
    static IncrementSpec two_point(double low, double high, double p_high);
    /// Finite support; probabilities are normalized to sum 1.
    static IncrementSpec discrete(std::vector<double> values, std::vector<double> probs);
    /// Degenerate xi == c (variance 0). Accepted by the simulator only.
    static IncrementSpec constant(double c);

    Family family() const { return family_; }
    /// Drift a = E xi.
    double drift() const { return mean_; }
    double variance() const { return variance_; }
    /// Standard deviation of the distribution this spec was standardized from
    /// (its own standard deviation when never standardized).
    double sigma() const { return raw_sigma_; }
    /// E|xi - a|^3.
    double beta3() const { return beta3_; }
    /// E|xi|.
    double absolute_mean() const;
    bool is_standardized() const { return standardized_; }

    /// Family parameters in the units of this spec: {mean, variance} for the
    /// normal, {rate, shift} for the exponential, {low, high, p} for two-point,
    /// interleaved {value, prob, ...} for custom-discrete.
    std::vector<double> params() const;
    /// Support points (discrete families only; empty otherwise).
    std::vector<double> support() const;
    std::span<const double> probabilities() const { return probs_; }

    /// Draw number `index` of the stream `seed`. Pure function. Draws 2m and
    /// 2m+1 share one generator block.
    double draw(std::uint64_t seed, std::uint64_t index) const;
    /// Draws first, first+1, ... into `out`; same values as repeated draw().
    void fill(std::uint64_t seed, std::uint64_t first, std::span<double> out) const;

    friend IncrementSpec standardize(const IncrementSpec& raw);

private:
    IncrementSpec() = default;
    void finish_discrete();
    void block(std::uint64_t seed, std::uint64_t b, double& even, double& odd) const;
    double from_uniform(double u) const;

    Family family_ = Family::shifted_normal;
    double location_ = 0.0;
    double scale_ = 1.0;
    std::vector<double> values_;  // base support, discrete families
    std::vector<double> probs_;
    std::vector<double> cumulative_;
    double mean_ = 0.0;
    double variance_ = 1.0;
    double raw_sigma_ = 1.0;
    double beta3_ = 0.0;
    bool standardized_ = false;
};

/// Rescale a spec to unit variance: the result samples the raw law divided
/// by its standard deviation, so a = mu / sigma. Idempotent.
/// Throws StandardizationError for zero or non-finite variance.
IncrementSpec standardize(const IncrementSpec& raw);

/// The first `count` draws of stream `seed`.
std::vector<double> sample_stream(const IncrementSpec& spec, std::uint64_t seed, std::size_t count);

/// E|xi - a|^3 of the spec.
double beta3(const IncrementSpec& spec);

}  // namespace fptsim
