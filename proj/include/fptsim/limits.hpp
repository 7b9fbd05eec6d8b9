#pragma once

#include <span>
#include <string_view>

#include "fptsim/boundary.hpp"
#include "fptsim/extended_real.hpp"

namespace fptsim {

/// Sigma_j^{i-1} = sum_{s=j}^{i-1} Delta_s sqrt(alpha_{s+1,i}); zero for an
/// empty range, +infinity when a participating Delta_s is infinite.
ExtendedReal sigma_shift(const LimitProfile& profile, std::size_t j, std::size_t i);

struct LawValue {
    double value = 0.0;
    std::size_t branch = 0;  ///< index j of the piece that produced the value
};

/// Limit law G_i(u) of P{tau^{(i)} < u} for a general profile with
/// V_{k0+1} = +infinity. Each piece j is a complement of a j-dimensional
/// ladder normal distribution function evaluated at
/// (-V_1, ..., -V_{j-1}, -u -/+ shift), with correlations and shifts taken
/// from level ratios. Throws BranchResolutionError when
/// no piece covers u.
LawValue g_i_theorem2(const LimitProfile& profile, std::size_t i, double u, double tol = 1e-6);

/// Closed form for finite V_1 < ... < V_{k0} and finite Delta >= 0 with all
/// lambda = 1: G_1 alternates between Phi(u - D_{p-1}) pieces and flat
/// plateaus Phi(V_p) on (V_p + D_{p-1}, V_p + D_p], D_p = Delta_1 + ... +
/// Delta_p, and G_i(u) = G_1(u + D_{i-1}). Throws WrongRegimeError for
/// infinite inputs.
double g_i_corollary1(std::span<const double> V, std::span<const double> Delta, std::size_t i, double u);

/// Infinite-step regime: all Delta = +infinity and g_{n,j}/g_{n,j+1} ->
/// alpha_j. k0 is the number of leading finite entries of V. The laws are
/// non-proper.
double g_i_corollary2(std::span<const ExtendedReal> V, std::span<const double> alpha, std::size_t i, double u,
                      double tol = 1e-6);

/// Special case alpha == 1: G_i(u) = Phi(clamp(u, V_{i-1}, V_i)).
double g_i_corollary3(std::span<const ExtendedReal> V, std::size_t i, double u);

/// lim P{max(S_1..S_n) < u sqrt(n) + n a}.
double wald_limit(double u);
/// Normalized renewal-count limit for a constant boundary.
double renewal_limit(double u);

/// Sum over i = 1..k0+1 of G_i(+inf) - G_i(-inf) in the infinite-step
/// regime; telescopes to 1.
double total_variation_sum(std::span<const ExtendedReal> V, std::span<const double> alpha, double tol = 1e-6);

enum class LawKind { theorem2, corollary1, corollary2, corollary3, wald, renewal };

std::string_view to_string(LawKind kind);
LawKind parse_law_kind(std::string_view name);  // throws ConfigError

/// A limit law bound to its parameters.
class LimitLaw {
public:
    LimitLaw(LawKind kind, LimitProfile profile, std::size_t i, double tol = 1e-6);
    static LimitLaw standard_normal(LawKind kind = LawKind::wald);

    LawKind kind() const { return kind_; }
    const LimitProfile& profile() const { return profile_; }
    std::size_t index() const { return i_; }

    double cdf(double u) const;
    LawValue evaluate(double u) const;
    /// G(+inf) - G(-inf); 1 for proper laws.
    double total_mass() const;

private:
    LawKind kind_;
    LimitProfile profile_;
    std::size_t i_;
    double tol_;
};

}  // namespace fptsim
