#include "doctest.h"
#include "fptsim/errors.hpp"
#include "fptsim/increments.hpp"

#include <cmath>
#include <functional>
#include <numbers>

using namespace fptsim;

namespace {

// Adaptive Simpson rule, independent of the library.
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15 * eps) return left + right + (left + right - whole) / 15;
    return simpson(f, a, m, fa, flm, fm, left, eps / 2, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, eps / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double eps = 1e-12) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return simpson(f, a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), eps, 50);
}

struct Moments {
    double mean, var, abs3;
};

Moments sample_moments(const IncrementSpec& spec, std::uint64_t seed, std::size_t n) {
    const auto xs = sample_stream(spec, seed, n);
    double s = 0.0;
    for (double x : xs) s += x;
    const double mean = s / static_cast<double>(n);
    double v = 0.0, t = 0.0;
    for (double x : xs) {
        v += (x - mean) * (x - mean);
        t += std::pow(std::abs(x - spec.drift()), 3);
    }
    return {mean, v / static_cast<double>(n - 1), t / static_cast<double>(n)};
}

}  // namespace

TEST_CASE("family names round-trip") {
    for (Family f : {Family::shifted_normal, Family::standardized_exponential, Family::two_point,
                     Family::custom_discrete})
        CHECK(parse_family(to_string(f)) == f);
    CHECK_THROWS_AS(parse_family("cauchy"), UnsupportedFamilyError);
}

TEST_CASE("standardize examples") {
    const auto normal = standardize(IncrementSpec::shifted_normal(0.5, 1.0));
    CHECK(normal.drift() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normal.variance() == 1.0);

    const auto expo = standardize(IncrementSpec::exponential(1.0));
    CHECK(expo.drift() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(expo.variance() == 1.0);

    const auto tp = standardize(IncrementSpec::two_point(-1.0, 1.0, 0.75));
    const auto support = tp.support();
    REQUIRE(support.size() == 2);
    CHECK(support[0] == doctest::Approx(-1.0 / std::sqrt(0.75)).epsilon(1e-14));
    CHECK(support[1] == doctest::Approx(1.0 / std::sqrt(0.75)).epsilon(1e-14));
    CHECK(tp.drift() == doctest::Approx(0.5 / std::sqrt(0.75)).epsilon(1e-14));
    CHECK(tp.sigma() == doctest::Approx(std::sqrt(0.75)).epsilon(1e-14));
}

TEST_CASE("raw two-point moments") {
    for (double p : {0.1, 0.5, 0.75, 0.9}) {
        const auto raw = IncrementSpec::two_point(-1.0, 1.0, p);
        CHECK(raw.drift() == doctest::Approx(2 * p - 1).epsilon(1e-14));
        CHECK(raw.variance() == doctest::Approx(4 * p * (1 - p)).epsilon(1e-14));
    }
}

TEST_CASE("standardize is idempotent") {
    const auto once = standardize(IncrementSpec::exponential(2.0, 0.3));
    const auto twice = standardize(once);
    CHECK(twice.drift() == once.drift());
    CHECK(twice.variance() == once.variance());
    CHECK(twice.beta3() == once.beta3());
    const auto xs = sample_stream(once, 5, 100);
    const auto ys = sample_stream(twice, 5, 100);
    CHECK(xs == ys);
}

TEST_CASE("standardize rejects degenerate variance") {
    CHECK_THROWS_AS(standardize(IncrementSpec::constant(1.0)), StandardizationError);
    CHECK_THROWS_AS(standardize(IncrementSpec::discrete({2.0, 2.0}, {0.5, 0.5})), StandardizationError);
}

TEST_CASE("standardized sampling equals raw sampling divided by sigma") {
    const auto raw = IncrementSpec::two_point(-1.0, 1.0, 0.6);
    const auto std_spec = standardize(raw);
    const auto xs = sample_stream(raw, 3, 1000);
    const auto ys = sample_stream(std_spec, 3, 1000);
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(ys[i] == doctest::Approx(xs[i] / raw.sigma()).epsilon(1e-14));
}

TEST_CASE("beta3 values") {
    CHECK(beta3(standardize(IncrementSpec::shifted_normal(0.5, 4.0))) ==
          doctest::Approx(2 * std::sqrt(2 / std::numbers::pi)).epsilon(1e-14));
    CHECK(beta3(standardize(IncrementSpec::two_point(-1.0, 1.0, 0.5))) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(beta3(standardize(IncrementSpec::discrete({0.0, 2.0}, {0.5, 0.5}))) ==
          doctest::Approx(1.0).epsilon(1e-14));

    // Exponential(1): E|X - 1|^3 by quadrature.
    const double q = integrate([](double x) { return std::pow(std::abs(x - 1), 3) * std::exp(-x); }, 0.0, 1.0) +
                     integrate([](double x) { return std::pow(std::abs(x - 1), 3) * std::exp(-x); }, 1.0, 60.0);
    const double b = beta3(standardize(IncrementSpec::exponential(1.0)));
    CHECK(b == doctest::Approx(q).epsilon(1e-8));
    CHECK(b == doctest::Approx(12 / std::numbers::e - 2).epsilon(1e-14));
    // Rate and shift affect only location and scale.
    CHECK(beta3(standardize(IncrementSpec::exponential(3.0, 0.7))) == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("beta3 is at least one for unit-variance laws") {
    for (double p : {0.05, 0.3, 0.5, 0.8, 0.99})
        CHECK(beta3(standardize(IncrementSpec::two_point(-1.0, 1.0, p))) >= 1.0 - 1e-12);
    CHECK(beta3(standardize(IncrementSpec::discrete({-1.0, 0.0, 3.0}, {0.2, 0.5, 0.3}))) >= 1.0);
}

TEST_CASE("absolute mean per family") {
    CHECK(standardize(IncrementSpec::exponential(1.0)).absolute_mean() == doctest::Approx(1.0));
    CHECK(standardize(IncrementSpec::two_point(-1.0, 1.0, 0.5)).absolute_mean() == doctest::Approx(1.0));
    // E|Z + m| for Z standard normal.
    const double m = 0.5;
    const double expected = m * (1 - 2 * 0.5 * std::erfc(m / std::sqrt(2.0))) +
                            2 * std::exp(-m * m / 2) / std::sqrt(2 * std::numbers::pi);
    CHECK(standardize(IncrementSpec::shifted_normal(m, 1.0)).absolute_mean() ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("sample_stream determinism and empty count") {
    const auto spec = standardize(IncrementSpec::shifted_normal(0.5, 1.0));
    CHECK(sample_stream(spec, 1, 0).empty());
    CHECK(sample_stream(spec, 11, 500) == sample_stream(spec, 11, 500));
    CHECK(sample_stream(spec, 11, 500) != sample_stream(spec, 12, 500));
}

TEST_CASE("two-point p = 0.5 standardized has mean near zero") {
    const auto spec = standardize(IncrementSpec::two_point(-1.0, 1.0, 0.5));
    const auto xs = sample_stream(spec, 2024, 1000000);
    double s = 0.0;
    for (double x : xs) s += x;
    CHECK(std::abs(s / 1e6) <= 0.005);
}

TEST_CASE("sample moments within five standard errors for every family") {
    const std::size_t n = 1000000;
    const IncrementSpec specs[] = {
        standardize(IncrementSpec::shifted_normal(0.5, 2.0)),
        standardize(IncrementSpec::exponential(1.0)),
        standardize(IncrementSpec::two_point(-1.0, 1.0, 0.7)),
        standardize(IncrementSpec::discrete({-1.0, 0.5, 2.0}, {0.2, 0.3, 0.5})),
    };
    std::uint64_t seed = 100;
    for (const auto& spec : specs) {
        CAPTURE(to_string(spec.family()));
        const Moments m = sample_moments(spec, seed++, n);
        const double se_mean = 1.0 / std::sqrt(static_cast<double>(n));
        CHECK(std::abs(m.mean - spec.drift()) < 5 * se_mean);
        // Var of (X - a)^2 is E(X-a)^4 - 1; use a generous fourth-moment bound of 10.
        CHECK(std::abs(m.var - 1.0) < 5 * std::sqrt(10.0 / static_cast<double>(n)));
        CHECK(std::abs(m.abs3 - spec.beta3()) < 0.03 * spec.beta3());
    }
}

TEST_CASE("block fills agree with single draws at any offset") {
    const IncrementSpec specs[] = {
        standardize(IncrementSpec::shifted_normal(0.5, 2.0)),
        standardize(IncrementSpec::exponential(1.5, 0.2)),
        IncrementSpec::two_point(-1.0, 1.0, 0.3),
        IncrementSpec::discrete({-2.0, 0.0, 1.0, 4.0}, {0.1, 0.2, 0.3, 0.4}),
    };
    for (const auto& spec : specs) {
        for (std::uint64_t first : {0u, 1u, 7u, 130u}) {
            for (std::size_t len : {0u, 1u, 2u, 3u, 17u, 128u, 301u}) {
                std::vector<double> out(len);
                spec.fill(42, first, out);
                for (std::size_t t = 0; t < len; ++t) CHECK(out[t] == spec.draw(42, first + t));
            }
        }
    }
}
