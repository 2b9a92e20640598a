#include <doctest.h>

#include <cmath>

#include "bgw/mating.hpp"
#include "bgw/rng.hpp"

using namespace bgw;

TEST_CASE("perfect fidelity pairs matching types") {
    auto xi = MatingFunction::perfect_fidelity(1);
    CHECK(xi.apply({3, 5}) == Counts{3});
    CHECK(xi.apply({5, 3}) == Counts{3});

    auto xi2 = MatingFunction::perfect_fidelity(2);
    CHECK(xi2.apply({3, 7, 5, 2}) == Counts{3, 2});
}

TEST_CASE("promiscuous single type needs at least one male") {
    auto xi = MatingFunction::promiscuous_single();
    CHECK(xi.apply({4, 0}) == Counts{0});
    CHECK(xi.apply({4, 1}) == Counts{4});
    CHECK(xi.apply({4, 9}) == Counts{4});
}

TEST_CASE("completely promiscuous gates on every male type") {
    auto xi = MatingFunction::completely_promiscuous(2, 1);
    CHECK(xi.apply({3, 2, 1}) == Counts{3, 2});
    CHECK(xi.apply({3, 2, 0}) == Counts{0, 0});
}

TEST_CASE("polygamous mating caps by d males each") {
    auto xi = MatingFunction::polygamous(1, 3);
    CHECK(xi.apply({10, 2}) == Counts{6});
    CHECK(xi.apply({5, 2}) == Counts{5});
}

TEST_CASE("every catalog function preserves zero") {
    std::vector<MatingFunction> catalog = {
        MatingFunction::identity(2),
        MatingFunction::perfect_fidelity(2),
        MatingFunction::polygamous(2, 2),
        MatingFunction::promiscuous_single(),
        MatingFunction::completely_promiscuous(2, 2),
        MatingFunction::min_of_linear(Matrix::from_rows({{1, 0}, {0, 1}}),
                                      Matrix::from_rows({{2, 0}, {0, 2}})),
        MatingFunction::capped_identity(2, 0.75),
    };
    for (const auto& xi : catalog) {
        Counts zero(xi.arity(), 0);
        CHECK(is_zero(xi.apply(zero)));
        Vec rzero(xi.arity(), 0.0);
        CHECK(l1_norm(xi.apply_real(rzero)) == 0.0);
        CHECK(l1_norm(xi.apply_real(rzero, Extension::Floor)) == 0.0);
    }
}

TEST_CASE("real extensions: floor vs natural") {
    auto id = MatingFunction::identity(2);
    CHECK(id.apply_real({1.7, 2.2}, Extension::Floor) == Vec{1.0, 2.0});
    CHECK(id.apply_real({1.7, 2.2}, Extension::Natural) == Vec{1.7, 2.2});

    auto pf = MatingFunction::perfect_fidelity(1);
    CHECK(pf.apply_real({3.5, 2.25}) == Vec{2.25});
}

TEST_CASE("apply_real restricted to integer points equals apply") {
    // Kinds whose closed form is integer-valued at integer points restrict
    // exactly under both extensions; the residual min-of-linear and capped
    // kinds land within one floor step of the integer map under the natural
    // form and exactly under the floor form.
    std::vector<MatingFunction> exact_catalog = {
        MatingFunction::identity(3),
        MatingFunction::perfect_fidelity(2),
        MatingFunction::polygamous(1, 2),
        MatingFunction::promiscuous_single(),
        MatingFunction::completely_promiscuous(2, 1),
    };
    std::vector<MatingFunction> floored_catalog = {
        MatingFunction::capped_identity(3, 0.6),
        MatingFunction::min_of_linear(Matrix::from_rows({{0.5, 0.1}, {0.2, 0.7}}),
                                      Matrix::from_rows({{0.9, 0.3}, {0.4, 0.8}})),
    };
    SplitMix64 rng(31);
    auto random_point = [&rng](std::size_t q) {
        Counts w(q);
        for (auto& v : w) v = rng() % 20;
        return w;
    };
    for (const auto& xi : exact_catalog) {
        for (int rep = 0; rep < 200; ++rep) {
            Counts w = random_point(xi.arity());
            Counts direct = xi.apply(w);
            for (Extension ext : {Extension::Natural, Extension::Floor}) {
                Vec via_real = xi.apply_real(to_vec(w), ext);
                REQUIRE(via_real.size() == direct.size());
                for (std::size_t i = 0; i < direct.size(); ++i) {
                    CHECK(via_real[i] ==
                          doctest::Approx(static_cast<double>(direct[i])).epsilon(1e-12));
                }
            }
        }
    }
    for (const auto& xi : floored_catalog) {
        for (int rep = 0; rep < 200; ++rep) {
            Counts w = random_point(xi.arity());
            Counts direct = xi.apply(w);
            Vec floor_ext = xi.apply_real(to_vec(w), Extension::Floor);
            Vec natural = xi.apply_real(to_vec(w), Extension::Natural);
            for (std::size_t i = 0; i < direct.size(); ++i) {
                CHECK(floor_ext[i] == static_cast<double>(direct[i]));
                double d = static_cast<double>(direct[i]);
                CHECK(natural[i] >= d - 1e-6);
                CHECK(natural[i] < d + 1.0 + 1e-6);
            }
        }
    }
}

TEST_CASE("monotone in the population componentwise") {
    std::vector<MatingFunction> catalog = {
        MatingFunction::identity(2),
        MatingFunction::perfect_fidelity(2),
        MatingFunction::polygamous(2, 3),
        MatingFunction::promiscuous_single(),
        MatingFunction::completely_promiscuous(2, 2),
        MatingFunction::capped_identity(2, 0.5),
        MatingFunction::min_of_linear(Matrix::from_rows({{1, 0.5}, {0, 1}}),
                                      Matrix::from_rows({{2, 0.2}, {1, 3}})),
    };
    SplitMix64 rng(77);
    for (const auto& xi : catalog) {
        for (int rep = 0; rep < 300; ++rep) {
            Counts x(xi.arity()), y(xi.arity());
            for (std::size_t j = 0; j < xi.arity(); ++j) {
                x[j] = rng() % 30;
                y[j] = x[j] + rng() % 10;
            }
            Counts fx = xi.apply(x), fy = xi.apply(y);
            for (std::size_t i = 0; i < fx.size(); ++i) CHECK(fx[i] <= fy[i]);
        }
    }
}

TEST_CASE("superadditivity checker passes the catalog") {
    auto pf = MatingFunction::perfect_fidelity(2);
    auto report = pf.check_superadditivity(10'000, 50, 7);
    CHECK(report.ok());
    CHECK(report.samples == 10'000);

    auto id = MatingFunction::identity(3);
    CHECK(id.check_superadditivity(10'000, 50, 7).ok());
}

TEST_CASE("superadditivity checker finds the halving counterexample") {
    // ceil(x/2) is subadditive at odd pairs: xi(2) = 1 < xi(1) + xi(1) = 2.
    auto xi = MatingFunction::custom(
        1, 1, [](const Counts& w) { return Counts{(w[0] + 1) / 2}; }, nullptr, "ceil_half");
    CHECK_FALSE(xi.verified());
    auto report = xi.check_superadditivity(10'000, 10, 3);
    CHECK_FALSE(report.ok());
    REQUIRE_FALSE(report.counterexamples.empty());
    const auto& ce = report.counterexamples.front();
    // Recorded counterexample must be a genuine violation.
    bool violated = false;
    for (std::size_t i = 0; i < ce.lhs.size(); ++i) violated |= ce.lhs[i] < ce.rhs[i];
    CHECK(violated);
}

TEST_CASE("min-of-linear with ordered matrices degenerates to the smaller map") {
    Matrix a = Matrix::from_rows({{0.5, 0.1}, {0.2, 0.7}});
    Matrix b = Matrix::from_rows({{0.9, 0.3}, {0.4, 0.8}});  // a <= b componentwise
    auto xi = MatingFunction::min_of_linear(a, b);
    SplitMix64 rng(11);
    for (int rep = 0; rep < 200; ++rep) {
        Vec w = {uniform01(rng) * 40.0, uniform01(rng) * 40.0};
        Vec got = xi.apply_real(w);
        Vec expected = left_multiply(w, a);
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-12));
        }
    }
}
