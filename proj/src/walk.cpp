#include "fptsim/walk.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "fptsim/errors.hpp"

namespace fptsim {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Sequential reader over one increment stream, filled in blocks.
class DrawStream {
public:
    DrawStream(const IncrementSpec& spec, std::uint64_t seed) : spec_(spec), seed_(seed) {}

    double next() {
        if (pos_ == buf_.size()) {
            spec_.fill(seed_, offset_, buf_);
            offset_ += buf_.size();
            pos_ = 0;
        }
        return buf_[pos_++];
    }

private:
    const IncrementSpec& spec_;
    std::uint64_t seed_;
    std::uint64_t offset_ = 0;
    std::array<double, 128> buf_{};
    std::size_t pos_ = buf_.size();
};

}  // namespace

PassageOutcome first_passage(const IncrementSpec& spec, const StepBoundary& b, std::uint64_t seed,
                             PassageHorizon horizon) {
    const auto N = b.checkpoints();
    const auto g = b.levels();
    PassageOutcome out;
    out.max_at_checkpoints.assign(b.size(), kNegInf);

    DrawStream stream(spec, seed);
    double s = 0.0;
    double smax = kNegInf;
    std::int64_t j = 0;
    for (std::size_t l = 0; l < b.size(); ++l) {
        const double level = g[l];
        while (j < N[l]) {
            s += stream.next();
            ++j;
            smax = std::max(smax, s);
            if (!out.tau && s >= level) {
                out.tau = j;
                out.crossing_level = level;
                if (horizon == PassageHorizon::stop_at_crossing) {
                    // Checkpoints equal to tau are complete.
                    for (std::size_t r = l; r < b.size() && N[r] == j; ++r) {
                        out.max_at_checkpoints[r] = smax;
                        out.checkpoints_recorded = r + 1;
                    }
                    return out;
                }
            }
        }
        out.max_at_checkpoints[l] = smax;
        out.checkpoints_recorded = l + 1;
    }
    return out;
}

WalkPath record_path(const IncrementSpec& spec, std::int64_t n, std::uint64_t seed) {
    if (n < 0) throw DomainError("record_path: negative horizon");
    WalkPath path;
    path.increments = sample_stream(spec, seed, static_cast<std::size_t>(n));
    path.partial_sums.assign(static_cast<std::size_t>(n) + 1, 0.0);
    path.running_max.assign(static_cast<std::size_t>(n) + 1, kNegInf);
    for (std::size_t j = 1; j <= static_cast<std::size_t>(n); ++j) {
        path.partial_sums[j] = path.partial_sums[j - 1] + path.increments[j - 1];
        path.running_max[j] = std::max(path.running_max[j - 1], path.partial_sums[j]);
    }
    return path;
}

bool replay_consistent(const WalkPath& path, const StepBoundary& b, const PassageOutcome& outcome) {
    const std::int64_t n = b.horizon();
    if (static_cast<std::int64_t>(path.partial_sums.size()) < n + 1) return false;
    std::optional<std::int64_t> tau;
    for (std::int64_t j = 1; j <= n; ++j) {
        if (path.partial_sums[static_cast<std::size_t>(j)] >= b.level_at_step(j)) {
            tau = j;
            break;
        }
    }
    if (tau != outcome.tau) return false;
    if (tau && outcome.crossing_level != b.level_at_step(*tau)) return false;
    for (std::size_t l = 0; l < outcome.checkpoints_recorded; ++l) {
        const auto N = static_cast<std::size_t>(b.checkpoints()[l]);
        if (outcome.max_at_checkpoints[l] != path.running_max[N]) return false;
    }
    return true;
}

std::vector<double> running_max_at_checkpoints(const IncrementSpec& spec, std::int64_t n,
                                               std::span<const std::int64_t> checkpoints, std::uint64_t seed) {
    std::int64_t previous = 0;
    for (std::int64_t c : checkpoints) {
        if (c < 1 || c < previous || c > n)
            throw DomainError("running_max_at_checkpoints: checkpoints must be positive, non-decreasing and <= n");
        previous = c;
    }
    const double a = spec.drift();
    std::vector<double> out(checkpoints.size());
    DrawStream stream(spec, seed);
    double s = 0.0;
    double smax = kNegInf;
    std::int64_t j = 0;
    for (std::size_t l = 0; l < checkpoints.size(); ++l) {
        for (; j < checkpoints[l]; ++j) {
            s += stream.next();
            smax = std::max(smax, s);
        }
        const auto nl = static_cast<double>(checkpoints[l]);
        out[l] = (smax - nl * a) / std::sqrt(nl);
    }
    return out;
}

double LatticeDistribution::total() const {
    // Kahan summation keeps the conservation check at rounding level.
    double sum = 0.0;
    double carry = 0.0;
    auto add = [&](double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    };
    for (double m : tau_mass) add(m);
    add(censored);
    return sum;
}

LatticeDistribution exact_lattice_distribution(double p, std::int64_t n, const StepBoundary& b) {
    if (!(p >= 0.0 && p <= 1.0)) throw OracleDomainError("lattice oracle: p must lie in [0, 1]");
    if (n < 1 || n > 10000) throw OracleDomainError("lattice oracle: horizon must lie in [1, 10^4]");
    if (b.horizon() != n) throw OracleDomainError("lattice oracle: boundary horizon differs from n");
    for (double level : b.levels()) {
        if (level != std::floor(level)) throw OracleDomainError("lattice oracle: levels must be integers");
    }

    // mass[offset + s] = P(S_j = s, tau > j); sums live in [-n, n].
    const std::int64_t offset = n;
    std::vector<double> mass(static_cast<std::size_t>(2 * n + 1), 0.0);
    std::vector<double> next(mass.size(), 0.0);
    mass[static_cast<std::size_t>(offset)] = 1.0;
    LatticeDistribution out;
    out.tau_mass.assign(static_cast<std::size_t>(n), 0.0);
    const double q = 1.0 - p;

    for (std::int64_t j = 1; j <= n; ++j) {
        std::fill(next.begin(), next.end(), 0.0);
        const std::int64_t lo = -(j - 1);
        const std::int64_t hi = j - 1;
        for (std::int64_t s = lo; s <= hi; s += 2) {
            const double m = mass[static_cast<std::size_t>(s + offset)];
            if (m == 0.0) continue;
            next[static_cast<std::size_t>(s + 1 + offset)] += m * p;
            next[static_cast<std::size_t>(s - 1 + offset)] += m * q;
        }
        const double level = b.level_at_step(j);
        double absorbed = 0.0;
        for (std::int64_t s = -j; s <= j; s += 2) {
            auto& cell = next[static_cast<std::size_t>(s + offset)];
            if (static_cast<double>(s) >= level) {
                absorbed += cell;
                cell = 0.0;
            }
        }
        out.tau_mass[static_cast<std::size_t>(j - 1)] = absorbed;
        std::swap(mass, next);
    }
    for (double m : mass) out.censored += m;
    return out;
}

}  // namespace fptsim
