#include "fptsim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fptsim/errors.hpp"
#include "fptsim/gaussian.hpp"
#include "fptsim/rng.hpp"

namespace fptsim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

EmpiricalCdf::EmpiricalCdf(std::span<const std::optional<double>> samples) {
    if (samples.empty()) throw EmptySampleError("ecdf: no samples");
    total_ = samples.size();
    for (const auto& s : samples) {
        if (!s) continue;
        if (std::isnan(*s)) throw DomainError("ecdf: NaN sample");
        sorted_.push_back(*s);
    }
    std::sort(sorted_.begin(), sorted_.end());
}

EmpiricalCdf EmpiricalCdf::from_values(std::span<const double> values) {
    std::vector<std::optional<double>> wrapped(values.begin(), values.end());
    return EmpiricalCdf(wrapped);
}

double EmpiricalCdf::operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(total_);
}

double EmpiricalCdf::left_limit(double x) const {
    const auto it = std::lower_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(total_);
}

double EmpiricalCdf::censored_mass() const {
    return static_cast<double>(total_ - sorted_.size()) / static_cast<double>(total_);
}

double EmpiricalCdf::numeric_mass() const {
    return static_cast<double>(sorted_.size()) / static_cast<double>(total_);
}

double ks_distance(const EmpiricalCdf& ecdf, const std::function<double(double)>& law, bool include_tails) {
    const auto xs = ecdf.sorted_values();
    const auto n = static_cast<double>(ecdf.total());
    double d = 0.0;
    std::size_t m = 0;
    while (m < xs.size()) {
        std::size_t next = m;
        while (next < xs.size() && xs[next] == xs[m]) ++next;
        const double g = law(xs[m]);
        const double below = static_cast<double>(m) / n;
        const double at = static_cast<double>(next) / n;
        d = std::max({d, std::abs(below - g), std::abs(at - g)});
        m = next;
    }
    if (include_tails) {
        d = std::max(d, std::abs(law(-kInf)));
        d = std::max(d, std::abs(ecdf.numeric_mass() - law(kInf)));
    }
    return std::min(d, 1.0);
}

KsComparison ks_compare(const EmpiricalCdf& ecdf, const LimitLaw& law) {
    KsComparison out;
    out.law_lower_mass = law.cdf(-kInf);
    out.law_upper_mass = law.cdf(kInf);
    out.law_deficit = 1.0 - (out.law_upper_mass - out.law_lower_mass);
    out.empirical_censored = ecdf.censored_mass();
    const bool proper = std::abs(out.law_deficit) < 1e-9;
    out.distance = ks_distance(ecdf, [&](double u) { return law.cdf(u); }, proper);
    return out;
}

namespace {

void product_grid(const std::vector<std::vector<double>>& axes, std::size_t k, std::vector<double>& current,
                  std::vector<std::vector<double>>& out) {
    const std::size_t d = current.size();
    if (d == k) {
        out.push_back(current);
        return;
    }
    const auto& axis = axes.size() == 1 ? axes[0] : axes[d];
    for (double x : axis) {
        current.push_back(x);
        product_grid(axes, k, current, out);
        current.pop_back();
    }
}

}  // namespace

Theorem1Report run_theorem1(const IncrementSpec& spec, std::vector<std::int64_t> checkpoints,
                            const std::vector<std::vector<double>>& axes, const RunOptions& run, double mvn_tol,
                            double C1) {
    if (checkpoints.empty()) throw ShapeError("joint experiment: no checkpoints");
    if (axes.size() != 1 && axes.size() != checkpoints.size())
        throw ShapeError("joint experiment: need one grid axis per checkpoint or a single shared axis");
    if (run.reps == 0) throw DomainError("joint experiment: reps must be positive");
    const std::size_t k = checkpoints.size();
    const std::int64_t n = checkpoints.back();
    const auto ladder = CorrelationLadder::from_checkpoints(checkpoints);

    std::vector<double> maxima(run.reps * k);
    parallel_replications(run.reps, run.workers, [&](std::size_t rep) {
        const auto z = running_max_at_checkpoints(spec, n, checkpoints, derive_seed(run.master_seed, rep));
        std::copy(z.begin(), z.end(), maxima.begin() + static_cast<std::ptrdiff_t>(rep * k));
    });

    std::vector<std::vector<double>> grid;
    std::vector<double> scratch;
    product_grid(axes, k, scratch, grid);

    Theorem1Report report;
    report.checkpoints = checkpoints;
    report.run = run;
    const auto reps = static_cast<double>(run.reps);
    for (auto& u : grid) {
        std::size_t hits = 0;
        for (std::size_t rep = 0; rep < run.reps; ++rep) {
            bool inside = true;
            for (std::size_t l = 0; l < k && inside; ++l) inside = maxima[rep * k + l] < u[l];
            hits += inside ? 1 : 0;
        }
        GridPoint gp;
        gp.empirical = static_cast<double>(hits) / reps;
        gp.theory = mvn_cdf_ladder(ladder, u, mvn_tol);
        gp.abs_diff = std::abs(gp.empirical - gp.theory);
        gp.std_error = std::sqrt(gp.empirical * (1.0 - gp.empirical) / reps);
        gp.u = std::move(u);
        report.sup_discrepancy = std::max(report.sup_discrepancy, gp.abs_diff);
        report.max_std_error = std::max(report.max_std_error, gp.std_error);
        report.points.push_back(std::move(gp));
    }
    if (spec.drift() > 0.0) report.bound = theorem3_bound(RateBoundConfig::from_spec(spec, checkpoints, C1));
    return report;
}

Theorem2Report run_theorem2(const IncrementSpec& spec, const StepBoundary& boundary, const LimitLaw& law,
                            std::size_t i, const RunOptions& run) {
    if (run.reps == 0) throw DomainError("first-passage experiment: reps must be positive");
    const double a = spec.drift();
    Theorem2Report report{.boundary = boundary, .index = i, .run = run, .law_kind = law.kind(), .ks = {}, .gaps = {}, .normalized = {}, .taus = {}};
    report.taus.resize(run.reps);
    parallel_replications(run.reps, run.workers, [&](std::size_t rep) {
        report.taus[rep] =
            first_passage(spec, boundary, derive_seed(run.master_seed, rep), PassageHorizon::stop_at_crossing).tau;
    });
    report.normalized.reserve(run.reps);
    for (const auto& tau : report.taus) report.normalized.push_back(normalize_tau(tau, boundary, a, i));

    const EmpiricalCdf ecdf(report.normalized);
    report.ks = ks_compare(ecdf, law);

    // Plateaus exist when the law's profile has finite V and Delta.
    const LimitProfile& p = law.profile();
    const std::size_t k0 = std::min(p.k0, boundary.size());
    bool finite_regime = k0 > 0 && p.Delta.size() >= k0;
    for (std::size_t s = 0; finite_regime && s < k0; ++s) finite_regime = p.Delta[s].is_finite();
    if (finite_regime && (law.kind() == LawKind::corollary1 || law.kind() == LawKind::theorem2)) {
        double shift = 0.0;  // D_{i-1}
        for (std::size_t s = 0; s + 1 < i && s < k0; ++s) shift += p.Delta[s].value();
        double cumulative = 0.0;
        for (std::size_t gap = 1; gap <= k0; ++gap) {
            GapMass gm;
            gm.gap = gap;
            gm.lower = p.V[gap - 1].value() + cumulative - shift;
            cumulative += p.Delta[gap - 1].value();
            gm.upper = p.V[gap - 1].value() + cumulative - shift;
            const std::int64_t checkpoint = boundary.checkpoints()[gap - 1];
            std::size_t hits = 0;
            for (std::size_t rep = 0; rep < run.reps; ++rep) {
                const auto& tau = report.taus[rep];
                if (tau && *tau > checkpoint && *report.normalized[rep] <= gm.upper) ++hits;
            }
            gm.empirical = static_cast<double>(hits) / static_cast<double>(run.reps);
            report.gaps.push_back(gm);
        }
    }
    return report;
}

Theorem2Report run_theorem2(const IncrementSpec& spec, const BoundaryTargets& targets,
                            std::vector<std::int64_t> checkpoints, const LimitLaw& law, std::size_t i,
                            const RunOptions& run) {
    return run_theorem2(spec, design_boundary(targets, spec.drift(), std::move(checkpoints)), law, i, run);
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ShapeError("log_log_slope: need at least two points");
    double mx = 0.0, my = 0.0;
    const auto m = static_cast<double>(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) {
        mx += std::log(x[t]) / m;
        my += std::log(y[t]) / m;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double dx = std::log(x[t]) - mx;
        sxy += dx * (std::log(y[t]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

SweepReport convergence_sweep(const IncrementSpec& spec, std::span<const double> fractions,
                              const std::vector<std::vector<double>>& axes, std::span<const std::int64_t> n_values,
                              const RunOptions& run, double mvn_tol, double C1) {
    if (n_values.size() < 2) throw ShapeError("convergence sweep: need at least two horizons");
    if (fractions.empty()) throw ShapeError("convergence sweep: no checkpoint fractions");
    SweepReport report;
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::int64_t n : n_values) {
        std::vector<std::int64_t> checkpoints;
        for (double f : fractions) {
            if (!(f > 0.0 && f <= 1.0)) throw DomainError("convergence sweep: fractions must lie in (0, 1]");
            checkpoints.push_back(std::max<std::int64_t>(1, std::llround(f * static_cast<double>(n))));
        }
        checkpoints.back() = n;
        const auto t1 = run_theorem1(spec, checkpoints, axes, run, mvn_tol, C1);
        report.rows.push_back({n, checkpoints, t1.sup_discrepancy, t1.max_std_error, t1.bound.bound_proof});
        xs.push_back(static_cast<double>(n));
        ys.push_back(std::max(t1.sup_discrepancy, std::numeric_limits<double>::min()));
    }
    report.fitted_slope = log_log_slope(xs, ys);
    return report;
}

}  // namespace fptsim
