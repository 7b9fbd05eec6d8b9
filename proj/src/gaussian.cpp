#include "fptsim/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fptsim/errors.hpp"

namespace fptsim {

double phi_cdf(double u) {
    if (std::isnan(u)) throw DomainError("phi_cdf: NaN argument");
    return 0.5 * std::erfc(-u / std::numbers::sqrt2);
}

double phi_pdf(double u) {
    constexpr double kInvSqrt2Pi = 0.39894228040143267794;
    return kInvSqrt2Pi * std::exp(-0.5 * u * u);
}

CorrelationLadder::CorrelationLadder(std::vector<double> rho) : rho_(std::move(rho)) {
    for (double r : rho_) {
        if (!(r >= 0.0 && r <= 1.0)) throw DomainError("correlation ladder: rho must lie in [0, 1]");
    }
}

CorrelationLadder CorrelationLadder::from_checkpoints(std::span<const std::int64_t> checkpoints) {
    if (checkpoints.empty()) throw ShapeError("correlation ladder: no checkpoints");
    std::vector<double> rho;
    for (std::size_t j = 1; j < checkpoints.size(); ++j) {
        if (checkpoints[j - 1] <= 0 || checkpoints[j] < checkpoints[j - 1])
            throw DomainError("correlation ladder: checkpoints must be positive and non-decreasing");
        rho.push_back(std::sqrt(static_cast<double>(checkpoints[j - 1]) / static_cast<double>(checkpoints[j])));
    }
    return CorrelationLadder(std::move(rho));
}

double CorrelationLadder::correlation(std::size_t r, std::size_t s) const {
    if (r > s) std::swap(r, s);
    double c = 1.0;
    for (std::size_t j = r; j < s; ++j) c *= rho_[j];
    return c;
}

LadderProblem collapse_degenerate(const CorrelationLadder& ladder, std::span<const double> u,
                                  double tolerance) {
    if (u.size() != ladder.dimension()) throw ShapeError("collapse_degenerate: threshold count mismatch");
    std::vector<double> rho;
    std::vector<double> thresholds{u[0]};
    const auto r = ladder.rho();
    for (std::size_t j = 0; j < r.size(); ++j) {
        if (r[j] >= 1.0 - tolerance) {
            thresholds.back() = std::min(thresholds.back(), u[j + 1]);
        } else {
            rho.push_back(r[j]);
            thresholds.push_back(u[j + 1]);
        }
    }
    return {CorrelationLadder(std::move(rho)), std::move(thresholds)};
}

namespace {

constexpr double kTruncation = 8.0;
// Below this conditional standard deviation the transition is integrated in
// the innovation variable instead of the state variable.
constexpr double kNarrowKernel = 0.5;

// Equispaced Simpson panel carrying samples of a sub-probability density.
struct Panel {
    double lo = 0.0;
    double h = 0.0;
    std::vector<double> f;

    std::size_t intervals() const { return f.size() - 1; }
    double hi() const { return lo + h * static_cast<double>(intervals()); }
    double node(std::size_t m) const { return lo + h * static_cast<double>(m); }

    double weight(std::size_t m) const {
        const std::size_t n = intervals();
        if (m == 0 || m == n) return h / 3.0;
        return (m % 2 == 1 ? 4.0 : 2.0) * h / 3.0;
    }

    // Cubic Lagrange interpolation on the nearest four nodes.
    double at(double z) const {
        const std::size_t n = intervals();
        const double t = (z - lo) / h;
        if (n < 3) {
            const double tc = std::clamp(t, 0.0, static_cast<double>(n));
            const auto i = std::min<std::size_t>(static_cast<std::size_t>(tc), n - 1);
            const double w = tc - static_cast<double>(i);
            return f[i] * (1.0 - w) + f[i + 1] * w;
        }
        auto base = static_cast<std::ptrdiff_t>(std::floor(t)) - 1;
        base = std::clamp<std::ptrdiff_t>(base, 0, static_cast<std::ptrdiff_t>(n) - 3);
        const double x = t - static_cast<double>(base);  // stencil nodes at 0, 1, 2, 3
        const auto b = static_cast<std::size_t>(base);
        const double l0 = -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0;
        const double l1 = x * (x - 2.0) * (x - 3.0) / 2.0;
        const double l2 = -x * (x - 1.0) * (x - 3.0) / 2.0;
        const double l3 = x * (x - 1.0) * (x - 2.0) / 6.0;
        return l0 * f[b] + l1 * f[b + 1] + l2 * f[b + 2] + l3 * f[b + 3];
    }
};

Panel make_panel(double lo, double hi, double target_step) {
    Panel p;
    auto n = static_cast<std::size_t>(std::ceil((hi - lo) / target_step));
    n = std::max<std::size_t>(n, 2);
    if (n % 2 == 1) ++n;
    p.lo = lo;
    p.h = (hi - lo) / static_cast<double>(n);
    p.f.assign(n + 1, 0.0);
    return p;
}

// A location where the density changes on a scale much finer than the base
// grid: the smoothed image of an earlier truncation through narrow kernels.
struct Feature {
    double center;
    double width;
};

// Density of Z_j on {Z_1 < u_1, ..., Z_j < u_j}, piecewise over panels that
// are refined around narrow features.
struct Stage {
    std::vector<Panel> panels;
    std::vector<Feature> features;

    double lo() const { return panels.front().lo; }
    double hi() const { return panels.back().hi(); }

    double integral() const {
        double s = 0.0;
        for (const Panel& p : panels)
            for (std::size_t m = 0; m < p.f.size(); ++m) s += p.weight(m) * p.f[m];
        return s;
    }

    double at(double z) const {
        for (const Panel& p : panels)
            if (z <= p.hi()) return p.at(z);
        return panels.back().at(z);
    }

    template <class F>
    void fill(F&& density) {
        for (Panel& p : panels)
            for (std::size_t m = 0; m < p.f.size(); ++m) p.f[m] = density(p.node(m));
    }
};

constexpr double kFeatureHalfWidth = 7.0;
constexpr double kFeatureNodesPerWidth = 6.0;

Stage make_stage(double lo, double hi, double step, std::vector<Feature> features) {
    // Refinement windows clipped to [lo, hi], merged when overlapping.
    std::vector<std::pair<double, double>> windows;
    std::vector<Feature> kept;
    for (const Feature& f : features) {
        const double a = std::max(lo, f.center - kFeatureHalfWidth * f.width);
        const double b = std::min(hi, f.center + kFeatureHalfWidth * f.width);
        if (b - a <= 0.0 || step <= f.width / kFeatureNodesPerWidth) continue;
        windows.emplace_back(a, b);
        kept.push_back(f);
    }
    std::sort(windows.begin(), windows.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& w : windows) {
        if (!merged.empty() && w.first <= merged.back().second)
            merged.back().second = std::max(merged.back().second, w.second);
        else
            merged.push_back(w);
    }

    Stage s;
    s.features = std::move(kept);
    double cursor = lo;
    for (const auto& [a, b] : merged) {
        if (a - cursor > 1e-12) s.panels.push_back(make_panel(cursor, a, step));
        double finest = step;
        for (const Feature& f : s.features)
            if (f.center + kFeatureHalfWidth * f.width >= a && f.center - kFeatureHalfWidth * f.width <= b)
                finest = std::min(finest, f.width / kFeatureNodesPerWidth);
        s.panels.push_back(make_panel(a, b, finest));
        cursor = b;
    }
    if (hi - cursor > 1e-12 || s.panels.empty()) s.panels.push_back(make_panel(cursor, hi, step));
    return s;
}

double simpson(double a, double b, double target_step, auto&& g) {
    if (!(b > a)) return 0.0;
    auto n = static_cast<std::size_t>(std::ceil((b - a) / target_step));
    n = std::max<std::size_t>(n, 2);
    if (n % 2 == 1) ++n;
    const double h = (b - a) / static_cast<double>(n);
    double s = g(a) + g(b);
    for (std::size_t m = 1; m < n; ++m) s += (m % 2 == 1 ? 4.0 : 2.0) * g(a + h * static_cast<double>(m));
    return s * h / 3.0;
}

double step_for_tolerance(double tol) {
    return std::clamp(0.025 * std::pow(tol / 1e-6, 0.25), 0.006, 0.1);
}

Stage propagate(const Stage& prev, double rho, double upper, double step) {
    const double sigma = std::sqrt((1.0 - rho) * (1.0 + rho));
    std::vector<Feature> features;
    if (sigma < kNarrowKernel) {
        features.push_back({rho * prev.hi(), sigma});
        for (const Feature& f : prev.features)
            features.push_back({rho * f.center, std::hypot(rho * f.width, sigma)});
    }
    Stage next = make_stage(-kTruncation, upper, step, std::move(features));

    if (sigma >= kNarrowKernel) {
        // f_next(z') = int f_prev(z) phi((z' - rho z) / sigma) / sigma dz
        std::vector<double> nodes;
        std::vector<double> weighted;
        for (const Panel& p : prev.panels) {
            for (std::size_t m = 0; m < p.f.size(); ++m) {
                const double w = p.weight(m) * p.f[m];
                if (w == 0.0) continue;
                nodes.push_back(rho * p.node(m));
                weighted.push_back(w);
            }
        }
        next.fill([&](double zq) {
            double s = 0.0;
            for (std::size_t m = 0; m < nodes.size(); ++m) s += weighted[m] * phi_pdf((zq - nodes[m]) / sigma);
            return s / sigma;
        });
    } else {
        // Substituting z = (z' - sigma w) / rho:
        // f_next(z') = (1 / rho) int f_prev((z' - sigma w) / rho) phi(w) dw
        const double lo = prev.lo();
        const double hi = prev.hi();
        next.fill([&](double zq) {
            const double wa = std::max(-kTruncation, (zq - rho * hi) / sigma);
            const double wb = std::min(kTruncation, (zq - rho * lo) / sigma);
            return simpson(wa, wb, step, [&](double w) {
                       const double z = std::clamp((zq - sigma * w) / rho, lo, hi);
                       return prev.at(z) * phi_pdf(w);
                   }) / rho;
        });
    }
    return next;
}

}  // namespace

double mvn_cdf_ladder(const CorrelationLadder& ladder, std::span<const double> u, double tol) {
    if (u.size() != ladder.dimension()) throw ShapeError("mvn_cdf_ladder: threshold count mismatch");
    for (double x : u) {
        if (std::isnan(x)) throw DomainError("mvn_cdf_ladder: NaN threshold");
        if (x == -std::numeric_limits<double>::infinity()) return 0.0;
    }
    tol = std::max(tol, 1e-8);

    // 1 - rho^2 < 1e-10 is treated as perfect correlation.
    LadderProblem p = collapse_degenerate(ladder, u, 5e-11);
    std::vector<double> rho(p.ladder.rho().begin(), p.ladder.rho().end());
    std::vector<double>& thr = p.u;
    // Trailing unconstrained coordinates marginalize out exactly.
    while (thr.size() > 1 && thr.back() == std::numeric_limits<double>::infinity()) {
        thr.pop_back();
        rho.pop_back();
    }
    if (thr.size() == 1) return phi_cdf(thr[0]);

    const double step = step_for_tolerance(tol);
    auto upper_of = [](double x) { return std::min(x, kTruncation); };
    constexpr double kEmpty = -kTruncation + 1e-9;

    if (upper_of(thr[0]) <= kEmpty) return 0.0;
    Stage stage = make_stage(-kTruncation, upper_of(thr[0]), step, {});
    stage.fill([](double z) { return phi_pdf(z); });

    for (std::size_t j = 1; j < thr.size(); ++j) {
        if (upper_of(thr[j]) <= kEmpty) return 0.0;
        stage = propagate(stage, rho[j - 1], upper_of(thr[j]), step);
    }
    return std::clamp(stage.integral(), 0.0, 1.0);
}

}  // namespace fptsim
