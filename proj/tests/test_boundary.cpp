#include "doctest.h"
#include "fptsim/boundary.hpp"
#include "fptsim/errors.hpp"

#include <cmath>
#include <random>

using namespace fptsim;

TEST_CASE("step boundary validation") {
    CHECK_THROWS_AS(StepBoundary({}, {}), DomainError);
    CHECK_THROWS_AS(StepBoundary({10, 5}, {1.0, 2.0}), DomainError);
    CHECK_THROWS_AS(StepBoundary({5, 10}, {2.0, 1.0}), DomainError);
    CHECK_THROWS_AS(StepBoundary({5, 10}, {1.0}), DomainError);
    CHECK_NOTHROW(StepBoundary({5, 5, 10}, {1.0, 1.0, 3.0}));
}

TEST_CASE("boundary evaluation is right-constant on checkpoint intervals") {
    const StepBoundary b({4, 10}, {2.0, 5.0});
    CHECK(b.horizon() == 10);
    CHECK(b.evaluate(0.0) == 0.0);
    CHECK(b.evaluate(0.1) == 2.0);
    CHECK(b.evaluate(0.4) == 2.0);
    CHECK(b.evaluate(0.41) == 5.0);
    CHECK(b.evaluate(1.0) == 5.0);
    for (std::int64_t j = 1; j <= 4; ++j) CHECK(b.level_at_step(j) == 2.0);
    for (std::int64_t j = 5; j <= 10; ++j) CHECK(b.level_at_step(j) == 5.0);
    double prev = 0.0;
    for (int s = 0; s <= 100; ++s) {
        const double g = b.evaluate(s / 100.0);
        CHECK(g >= prev);
        prev = g;
    }
}

TEST_CASE("normalization constants examples") {
    const auto c = normalization_constants(StepBoundary({100}, {81.0}), 1.0);
    CHECK(c.V[0] == doctest::Approx(19.0 / 9.0).epsilon(1e-15));
    CHECK(c.Delta.empty());

    const double a = 0.5;
    const auto centered = normalization_constants(StepBoundary({100, 300}, {a * 100, a * 300}), a);
    CHECK(centered.V[0] == doctest::Approx(0.0));
    CHECK(centered.V[1] == doctest::Approx(0.0));

    const auto flat = normalization_constants(StepBoundary({100, 300}, {40.0, 40.0}), a);
    CHECK(flat.Delta[0] == 0.0);
    // (g2 - g1) / sqrt(g2 / a)
    const auto step = normalization_constants(StepBoundary({100, 300}, {40.0, 90.0}), a);
    CHECK(step.Delta[0] == doctest::Approx(50.0 / std::sqrt(180.0)).epsilon(1e-15));

    CHECK_THROWS_AS(normalization_constants(StepBoundary({100}, {0.0}), 1.0), DomainError);
    CHECK_THROWS_AS(normalization_constants(StepBoundary({100}, {1.0}), 0.0), DomainError);
}

TEST_CASE("normalize_tau examples and inverse") {
    const StepBoundary b({200}, {100.0});
    CHECK(*normalize_tau(110, b, 1.0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(*normalize_tau(100, b, 1.0, 1) == 0.0);
    CHECK_FALSE(normalize_tau(std::nullopt, b, 1.0, 1).has_value());
    const StepBoundary b2({300, 800}, {120.0, 390.0});
    for (std::int64_t tau : {1, 57, 299, 300, 301, 799, 800}) {
        for (std::size_t i : {1u, 2u}) {
            const double x = *normalize_tau(tau, b2, 0.5, i);
            CHECK(std::abs(denormalize_tau(x, b2, 0.5, i) - static_cast<double>(tau)) < 1e-9);
        }
    }
}

TEST_CASE("design_boundary examples") {
    const auto b = design_boundary({{19.0 / 9.0}, {}}, 1.0, {100});
    CHECK(b.levels()[0] == doctest::Approx(81.0).epsilon(1e-13));

    const double a = 0.7;
    const auto zero = design_boundary({{0.0, 0.0, 0.0}, {}}, a, {100, 250, 400});
    CHECK(zero.levels()[0] == doctest::Approx(a * 100).epsilon(1e-14));
    CHECK(zero.levels()[1] == doctest::Approx(a * 250).epsilon(1e-14));
    CHECK(zero.levels()[2] == doctest::Approx(a * 400).epsilon(1e-14));

    const auto flat = design_boundary({{0.3, std::nullopt}, {0.0}}, a, {100, 400});
    CHECK(flat.levels()[1] == flat.levels()[0]);
}

TEST_CASE("design_boundary rejects infeasible targets") {
    CHECK_THROWS_AS(design_boundary({{0.0, 0.0}, {0.1}}, 1.0, {100, 200}), InfeasibleTargetError);
    CHECK_THROWS_AS(design_boundary({{0.0, std::nullopt}, {}}, 1.0, {100, 200}), InfeasibleTargetError);
    // V far below zero forces the second level below the first.
    CHECK_THROWS_AS(design_boundary({{-2.0, 5.0}, {}}, 1.0, {100, 101}), InfeasibleTargetError);
    CHECK_THROWS_AS(design_boundary({{0.0}, {}}, -1.0, {100}), DomainError);
}

TEST_CASE("design_boundary round-trips through normalization_constants") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> uv(-1.5, 2.5), ud(0.0, 1.5), ua(0.2, 2.0);
    int tested = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const double a = ua(gen);
        const std::size_t k = 1 + trial % 4;
        std::vector<std::int64_t> N;
        for (std::size_t l = 1; l <= k; ++l) N.push_back(static_cast<std::int64_t>(l * 500));
        BoundaryTargets t;
        t.V.resize(k);
        t.Delta.resize(k - 1);
        t.V[0] = uv(gen);
        for (std::size_t l = 1; l < k; ++l) {
            if (gen() % 2)
                t.V[l] = *t.V[0] + static_cast<double>(l);
            else
                t.Delta[l - 1] = ud(gen);
        }
        StepBoundary b({1}, {1.0});
        try {
            b = design_boundary(t, a, N);
        } catch (const InfeasibleTargetError&) {
            continue;
        }
        ++tested;
        const auto c = normalization_constants(b, a);
        for (std::size_t l = 0; l < k; ++l)
            if (t.V[l]) CHECK(std::abs(c.V[l] - *t.V[l]) <= 1e-10 * std::max(1.0, std::abs(*t.V[l])));
        for (std::size_t l = 0; l + 1 < k; ++l)
            if (t.Delta[l]) CHECK(std::abs(c.Delta[l] - *t.Delta[l]) <= 1e-10 * std::max(1.0, *t.Delta[l]));
    }
    CHECK(tested > 250);
}

TEST_CASE("limit profile lambda is ratio-consistent") {
    auto p = LimitProfile::unit_lambda({ExtendedReal(0.0), ExtendedReal(1.0), ExtendedReal(2.0),
                                        ExtendedReal::infinity()},
                                       {ExtendedReal(0.5), ExtendedReal(0.5), ExtendedReal(0.5)});
    p.adjacent_lambda = {0.5, 0.25, 0.8};
    CHECK(p.k0 == 3);
    CHECK(p.lambda(2, 2) == 1.0);
    CHECK(p.lambda(0, 3) == 1.0);
    for (std::size_t i = 1; i <= 4; ++i)
        for (std::size_t j = i; j <= 4; ++j)
            for (std::size_t l = j; l <= 4; ++l)
                CHECK(std::abs(p.lambda(i, j) * p.lambda(j, l) - p.lambda(i, l)) <= 1e-12);
    CHECK_NOTHROW(p.validate());
    p.V[1] = ExtendedReal(-1.0);
    CHECK_THROWS(p.validate());
}

TEST_CASE("limit_profile_of on constant normalized targets") {
    const double a = 0.5;
    std::vector<StepBoundary> seq;
    for (std::int64_t n : {1000, 2000, 4000, 8000})
        seq.push_back(design_boundary({{0.5, std::nullopt}, {0.4}}, a, {n / 2, n}));
    // V_{n,2} grows like sqrt(n) here; a low threshold flags it.
    const auto ex = limit_profile_of(seq, a, 10.0);
    CHECK(ex.profile.V[0].value() == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(ex.profile.V[1].is_infinite());
    CHECK(ex.profile.k0 == 1);
    CHECK(ex.profile.Delta[0].value() == doctest::Approx(0.4).epsilon(1e-9));
    CHECK(ex.profile.lambda(1, 2) == doctest::Approx(0.5).epsilon(1e-12));

    std::vector<StepBoundary> single;
    for (std::int64_t n : {1000, 2000, 4000}) single.push_back(design_boundary({{0.7}, {}}, a, {n}));
    const auto one = limit_profile_of(single, a);
    CHECK(one.profile.V[0].value() == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(one.residual <= 1e-9);
}

TEST_CASE("limit_profile_of on g = aN + c sqrt(N)") {
    // V_n = (N - g/a) / (a^{-3/2} sqrt g) -> -c a^{1/2} / sqrt(a) ... expanded symbolically:
    // N - g/a = -c sqrt(N)/a and a^{-3/2} sqrt(g) -> a^{-1} sqrt(N), so V = -c.
    const double a = 0.8, c = 1.3;
    std::vector<StepBoundary> seq;
    for (std::int64_t n : {1000, 4000, 16000, 64000}) {
        const double N = static_cast<double>(n);
        seq.push_back(StepBoundary({n}, {a * N + c * std::sqrt(N)}));
    }
    const auto ex = limit_profile_of(seq, a);
    REQUIRE(ex.profile.V[0].is_finite());
    CHECK(ex.profile.V[0].value() == doctest::Approx(-c).epsilon(1e-3));
}

TEST_CASE("limit_profile_of flags diverging Delta and reports alpha") {
    const double a = 1.0;
    std::vector<StepBoundary> seq;
    for (std::int64_t n : {1000, 10000, 100000, 1000000, 10000000, 100000000}) {
        const double N = static_cast<double>(n);
        seq.push_back(StepBoundary({n / 2, n}, {a * N / 2, a * N}));
    }
    const auto ex = limit_profile_of(seq, a, 1e3);
    CHECK(ex.profile.Delta[0].is_infinite());
    CHECK(ex.profile.alpha[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("limit_profile_of rejects inconsistent shapes") {
    std::vector<StepBoundary> seq{StepBoundary({50, 100}, {20.0, 50.0}), StepBoundary({100}, {50.0})};
    CHECK_THROWS_AS(limit_profile_of(seq, 0.5), ShapeError);
    std::vector<StepBoundary> frac{StepBoundary({50, 100}, {20.0, 50.0}), StepBoundary({150, 200}, {70.0, 100.0})};
    CHECK_THROWS_AS(limit_profile_of(frac, 0.5), ShapeError);
}
