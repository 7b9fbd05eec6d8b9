#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fptsim {

/// Standard normal distribution function, accurate to ~1e-16 absolute.
double phi_cdf(double u);
/// Standard normal density.
double phi_pdf(double u);

/// Markov correlation structure of a Gaussian vector Z_1..Z_k in which
/// corr(Z_r, Z_s) = rho_{r+1} * ... * rho_s for r < s. The running maxima of
/// a random walk at checkpoints N_1 <= ... <= N_k have this limit structure
/// with rho_j = sqrt(N_{j-1} / N_j).
class CorrelationLadder {
public:
    /// Dimension 1 ladder.
    CorrelationLadder() = default;
    /// `rho[j]` links coordinate j to coordinate j+1 (0-based); dimension is
    /// rho.size() + 1. Throws DomainError for rho outside [0, 1].
    explicit CorrelationLadder(std::vector<double> rho);
    static CorrelationLadder from_checkpoints(std::span<const std::int64_t> checkpoints);

    std::size_t dimension() const { return rho_.size() + 1; }
    std::span<const double> rho() const { return rho_; }
    /// corr(Z_r, Z_s), 0-based, symmetric.
    double correlation(std::size_t r, std::size_t s) const;

private:
    std::vector<double> rho_;
};

struct LadderProblem {
    CorrelationLadder ladder;
    std::vector<double> u;
};

/// Merge coordinates linked by rho >= 1 - tolerance, keeping the smaller
/// threshold: perfectly correlated standard normals are almost surely equal.
LadderProblem collapse_degenerate(const CorrelationLadder& ladder, std::span<const double> u,
                                  double tolerance = 1e-12);

/// P{Z_1 < u_1, ..., Z_k < u_k} for the ladder's Gaussian vector.
///
/// Evaluates the nested conditioning integral stage by stage: a
/// sub-probability density of Z_j on the event {Z_1 < u_1, ..., Z_j < u_j}
/// is kept on a grid over [-8, min(u_j, 8)] and pushed through the Gaussian
/// transition with mean rho z and variance 1 - rho^2. Thresholds may be
/// +/-infinity. Absolute error is below `tol` (>= 1e-8) for dimensions <= 8.
double mvn_cdf_ladder(const CorrelationLadder& ladder, std::span<const double> u, double tol = 1e-6);

}  // namespace fptsim
