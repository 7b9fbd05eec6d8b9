#include "fptsim/limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fptsim/errors.hpp"
#include "fptsim/gaussian.hpp"

namespace fptsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t leading_finite(std::span<const ExtendedReal> V) {
    std::size_t k0 = 0;
    while (k0 < V.size() && V[k0].is_finite()) ++k0;
    return k0;
}

// Shift for pieces j > i: sum_{s=i}^{j-1} Delta_s / sqrt(lambda_{i,s+1}).
// Ratios in the limit laws are level ratios; see LimitProfile::level_ratio.
double forward_shift(const LimitProfile& p, std::size_t i, std::size_t j) {
    double sum = 0.0;
    for (std::size_t s = i; s < j; ++s) {
        const ExtendedReal d = p.delta(s);
        if (d.is_infinite()) return kInf;
        sum += d.value() / std::sqrt(p.level_ratio(i, s + 1));
    }
    return sum;
}

// 1 - P{Z_1 < t_1, ..., Z_m < t_m} for adjacent correlations rho.
double complement(std::vector<double> rho, const std::vector<double>& thresholds, double tol) {
    if (thresholds.size() == 1) return 1.0 - phi_cdf(thresholds[0]);
    return 1.0 - mvn_cdf_ladder(CorrelationLadder(std::move(rho)), thresholds, tol);
}

}  // namespace

ExtendedReal sigma_shift(const LimitProfile& profile, std::size_t j, std::size_t i) {
    if (j < 1) throw DomainError("sigma_shift: j must be >= 1");
    double sum = 0.0;
    for (std::size_t s = j; s < i; ++s) {
        const ExtendedReal d = profile.delta(s);
        if (d.is_infinite()) return ExtendedReal::infinity();
        sum += d.value() * std::sqrt(profile.level_ratio(s + 1, i));
    }
    return ExtendedReal(sum);
}

LawValue g_i_theorem2(const LimitProfile& profile, std::size_t i, double u, double tol) {
    if (std::isnan(u)) throw DomainError("g_i_theorem2: NaN argument");
    const std::size_t k0 = profile.k0;
    if (profile.size() < k0 + 1 || profile.V[k0].is_finite())
        throw ShapeError("g_i_theorem2: profile must carry V_{k0+1} = +infinity");
    if (profile.Delta.size() < k0) throw ShapeError("g_i_theorem2: profile needs Delta_1..Delta_{k0}");
    if (i < 1 || i > k0 + 1) throw DomainError("g_i_theorem2: index i must lie in 1..k0+1");
    const std::size_t pieces = k0 + 1;

    auto V = [&](std::size_t j) { return profile.v(j).as_double(); };
    auto shift_back = [&](std::size_t j) { return sigma_shift(profile, j, i).as_double(); };

    // Piece j covers (lower(j), upper(j)]; consecutive pieces share endpoints.
    auto upper = [&](std::size_t j) {
        if (j <= i) {
            const double s = shift_back(j);
            if (s == kInf) return -kInf;
            return std::sqrt(profile.level_ratio(j, i)) * V(j) - s;
        }
        const double s = forward_shift(profile, i, j);
        return V(j) / std::sqrt(profile.level_ratio(i, j)) + s;
    };

    std::size_t branch = 0;
    if (u == -kInf) {
        for (std::size_t j = 1; j <= pieces && branch == 0; ++j)
            if (upper(j) > -kInf) branch = j;
    } else {
        double lower = -kInf;
        for (std::size_t j = 1; j <= pieces && branch == 0; ++j) {
            const double up = upper(j);
            if (lower < u && u <= up) branch = j;
            lower = std::max(lower, up);
        }
    }
    if (branch == 0) throw BranchResolutionError("g_i_theorem2: no piece covers u = " + std::to_string(u));

    const std::size_t j = branch;
    std::vector<double> thresholds;
    std::vector<double> rho;
    for (std::size_t r = 1; r < j; ++r) {
        thresholds.push_back(-V(r));
        if (r > 1) rho.push_back(std::sqrt(profile.level_ratio(r - 1, r)));
    }
    // An infinite shift dominates u, including u = +-inf taken as a limit.
    const double shift = j <= i ? -shift_back(j) : forward_shift(profile, i, j);
    const double last = std::isinf(shift) ? shift : -u + shift;
    if (std::isnan(last)) throw BranchResolutionError("g_i_theorem2: undefined threshold");
    thresholds.push_back(last);
    if (j > 1) rho.push_back(std::sqrt(profile.level_ratio(j - 1, i)));
    return {complement(std::move(rho), thresholds, tol), j};
}

double g_i_corollary1(std::span<const double> V, std::span<const double> Delta, std::size_t i, double u) {
    const std::size_t k0 = V.size();
    if (k0 == 0 || Delta.size() < k0) throw ShapeError("g_i_corollary1: needs V_1..V_k0 and Delta_1..Delta_k0");
    for (std::size_t p = 0; p < k0; ++p) {
        if (!std::isfinite(V[p]) || !std::isfinite(Delta[p]))
            throw WrongRegimeError("g_i_corollary1: infinite V or Delta; use corollary2/corollary3");
        if (Delta[p] < 0.0) throw DomainError("g_i_corollary1: Delta must be non-negative");
        if (p > 0 && !(V[p - 1] < V[p])) throw DomainError("g_i_corollary1: V must be strictly increasing");
    }
    if (i < 1 || i > k0 + 1) throw DomainError("g_i_corollary1: index i must lie in 1..k0+1");
    if (std::isnan(u)) throw DomainError("g_i_corollary1: NaN argument");

    double shift = 0.0;
    for (std::size_t s = 0; s + 1 < i; ++s) shift += Delta[s];
    const double v = u + shift;

    if (v <= V[0]) return phi_cdf(v);
    double cumulative = 0.0;  // D_{p-1}
    for (std::size_t p = 0; p < k0; ++p) {
        const double plateau_end = V[p] + cumulative + Delta[p];
        if (v <= plateau_end) return phi_cdf(V[p]);
        cumulative += Delta[p];
        if (p + 1 == k0 || v <= V[p + 1] + cumulative) return phi_cdf(v - cumulative);
    }
    return phi_cdf(v - cumulative);
}

double g_i_corollary2(std::span<const ExtendedReal> V, std::span<const double> alpha, std::size_t i, double u,
                      double tol) {
    const std::size_t k0 = leading_finite(V);
    if (k0 == 0) throw ShapeError("g_i_corollary2: needs at least one finite V");
    if (alpha.size() < k0) throw ShapeError("g_i_corollary2: needs alpha_1..alpha_k0");
    for (std::size_t r = 0; r < k0; ++r) {
        if (!(alpha[r] > 0.0 && alpha[r] <= 1.0)) throw DomainError("g_i_corollary2: alpha must lie in (0, 1]");
        if (r > 0 && !(V[r - 1].value() < V[r].value()))
            throw DomainError("g_i_corollary2: V must be strictly increasing");
    }
    if (i < 1 || i > k0 + 1) throw DomainError("g_i_corollary2: index i must lie in 1..k0+1");
    if (std::isnan(u)) throw DomainError("g_i_corollary2: NaN argument");

    std::vector<double> thresholds;
    std::vector<double> rho;
    for (std::size_t r = 1; r < i; ++r) {
        thresholds.push_back(-V[r - 1].value());
        rho.push_back(std::sqrt(alpha[r - 1]));
    }
    thresholds.push_back(i <= k0 ? -std::min(u, V[i - 1].value()) : -u);
    return complement(std::move(rho), thresholds, tol);
}

double g_i_corollary3(std::span<const ExtendedReal> V, std::size_t i, double u) {
    const std::size_t k0 = leading_finite(V);
    if (k0 == 0) throw ShapeError("g_i_corollary3: needs at least one finite V");
    if (i < 1 || i > k0 + 1) throw DomainError("g_i_corollary3: index i must lie in 1..k0+1");
    if (std::isnan(u)) throw DomainError("g_i_corollary3: NaN argument");
    const double lower = i == 1 ? -kInf : V[i - 2].value();
    const double upper = i <= k0 ? V[i - 1].value() : kInf;
    return phi_cdf(std::clamp(u, lower, upper));
}

double wald_limit(double u) { return phi_cdf(u); }
double renewal_limit(double u) { return phi_cdf(u); }

double total_variation_sum(std::span<const ExtendedReal> V, std::span<const double> alpha, double tol) {
    const std::size_t k0 = leading_finite(V);
    double sum = 0.0;
    for (std::size_t i = 1; i <= k0 + 1; ++i)
        sum += g_i_corollary2(V, alpha, i, kInf, tol) - g_i_corollary2(V, alpha, i, -kInf, tol);
    return sum;
}

std::string_view to_string(LawKind kind) {
    switch (kind) {
        case LawKind::theorem2: return "theorem2";
        case LawKind::corollary1: return "corollary1";
        case LawKind::corollary2: return "corollary2";
        case LawKind::corollary3: return "corollary3";
        case LawKind::wald: return "wald";
        case LawKind::renewal: return "renewal";
    }
    return "unknown";
}

LawKind parse_law_kind(std::string_view name) {
    for (LawKind k : {LawKind::theorem2, LawKind::corollary1, LawKind::corollary2, LawKind::corollary3,
                      LawKind::wald, LawKind::renewal}) {
        if (to_string(k) == name) return k;
    }
    throw ConfigError("unknown law kind '" + std::string(name) + "'");
}

LimitLaw::LimitLaw(LawKind kind, LimitProfile profile, std::size_t i, double tol)
    : kind_(kind), profile_(std::move(profile)), i_(i), tol_(tol) {}

LimitLaw LimitLaw::standard_normal(LawKind kind) {
    return LimitLaw(kind, LimitProfile::unit_lambda({ExtendedReal::infinity()}, {}), 1);
}

LawValue LimitLaw::evaluate(double u) const {
    switch (kind_) {
        case LawKind::theorem2: return g_i_theorem2(profile_, i_, u, tol_);
        case LawKind::corollary1: {
            std::vector<double> V;
            std::vector<double> D;
            for (std::size_t p = 0; p < profile_.k0; ++p) {
                V.push_back(profile_.V[p].value());
                D.push_back(profile_.Delta.at(p).value());
            }
            return {g_i_corollary1(V, D, i_, u), 0};
        }
        case LawKind::corollary2: return {g_i_corollary2(profile_.V, profile_.alpha, i_, u, tol_), 0};
        case LawKind::corollary3: return {g_i_corollary3(profile_.V, i_, u), 0};
        case LawKind::wald: return {wald_limit(u), 0};
        case LawKind::renewal: return {renewal_limit(u), 0};
    }
    return {};
}

double LimitLaw::cdf(double u) const { return evaluate(u).value; }

double LimitLaw::total_mass() const { return cdf(kInf) - cdf(-kInf); }

}  // namespace fptsim
