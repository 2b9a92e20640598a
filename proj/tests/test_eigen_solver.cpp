#include <doctest.h>

#include <cmath>

#include "bgw/eigen_solver.hpp"
#include "models.hpp"
#include "oracles.hpp"

using namespace bgw;

namespace {

ValidatedModel make(const Model& m) { return ValidatedModel::create(m); }

}  // namespace

TEST_CASE("doubly stochastic identity model is critical with uniform direction") {
    auto m = make(testmodels::identity_poisson(Matrix::from_rows({{0.5, 0.5}, {0.5, 0.5}})));
    EigenResult r = solve_eigen(m);
    CHECK(r.lambda_star == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.z_star[0] == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(r.z_star[1] == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(r.residual < 1e-6);
    CHECK(classify(r) == Criticality::Critical);
}

TEST_CASE("affine perfect-fidelity family matches its closed-form eigenpair") {
    struct Case {
        std::size_t p;
        double a, b, a2, b2;
    };
    // lambda* = min{a + b p, a2 + b2 p}, z* uniform.
    for (const Case& c : {Case{2, 0.5, 0.3, 1.0, 0.1}, Case{3, 0.2, 0.4, 0.1, 0.5},
                          Case{2, 0.6, 0.2, 0.3, 0.25}}) {
        auto m = make(testmodels::pf_affine_family(c.p, c.a, c.b, c.a2, c.b2));
        EigenResult r = solve_eigen(m);
        double expected = std::min(c.a + c.b * static_cast<double>(c.p),
                                   c.a2 + c.b2 * static_cast<double>(c.p));
        CHECK(std::abs(r.lambda_star - expected) < 1e-6);
        CHECK(r.residual < 1e-6);
        for (std::size_t i = 0; i < c.p; ++i) {
            CHECK(r.z_star[i] == doctest::Approx(1.0 / static_cast<double>(c.p)).epsilon(1e-6));
        }
    }
}

TEST_CASE("proportional sex assignment scales the total-matrix eigenpair") {
    Matrix u = Matrix::from_rows({{1.0, 2.0}, {1.5, 0.5}});
    double alpha = 0.3;
    Model m;
    m.p = 2;
    m.q = 4;
    m.mating = MatingFunction::perfect_fidelity(2);
    m.offspring = OffspringLaw::total_then_thin(u, alpha, TotalKind::Poisson);
    m.split = BisexualSplit{2, 2};

    auto pr = oracle::dense_power_iteration(u);
    EigenResult r = solve_eigen(make(m));
    CHECK(r.lambda_star == doctest::Approx(alpha * pr.lambda).epsilon(1e-7));
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(r.z_star[i] == doctest::Approx(pr.left[i]).epsilon(1e-6));
    }
}

TEST_CASE("single-type models have the trivial direction and scalar rate") {
    Model m;
    m.p = 1;
    m.q = 2;
    m.mating = MatingFunction::promiscuous_single();
    m.offspring = OffspringLaw::poisson_product(Matrix::from_rows({{0.5, 5.0}}));
    m.split = BisexualSplit{1, 1};
    EigenResult r = solve_eigen(make(m));
    CHECK(r.z_star == Vec{1.0});
    CHECK(r.lambda_star == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(classify(r) == Criticality::Subcritical);
}

TEST_CASE("classification bands") {
    auto super = make(testmodels::pf_affine_family(2, 0.5, 0.3, 1.0, 0.1));
    CHECK(classify_model(super).second == Criticality::Supercritical);

    // Single-type perfect fidelity with Poisson means (0.8, 1.9): the slower
    // sex caps the rate at 0.8.
    auto sub = make(testmodels::single_type_pf_poisson(0.8, 1.9));
    EigenResult r = solve_eigen(sub);
    CHECK(r.lambda_star == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(classify(r) == Criticality::Subcritical);
}

TEST_CASE("linear reductions agree with a dense power-iteration oracle") {
    SplitMix64 rng(2024);
    for (std::size_t n : {3u, 5u}) {
        for (int rep = 0; rep < 5; ++rep) {
            Matrix a(n, n);
            for (double& v : a.data) v = 0.2 + 1.8 * uniform01(rng);

            auto pr = oracle::dense_power_iteration(a);

            // Identity mating: the operator is z -> z a.
            EigenResult rid = solve_eigen(make(testmodels::identity_poisson(a)));
            CHECK(std::abs(rid.lambda_star - pr.lambda) < 1e-6);

            // Gated female-linear mating with positive male block.
            Matrix y(n, 2);
            for (double& v : y.data) v = 0.5 + uniform01(rng);
            EigenResult rcp = solve_eigen(make(testmodels::cp_poisson(a, y)));
            CHECK(std::abs(rcp.lambda_star - pr.lambda) < 1e-6);
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(std::abs(rcp.z_star[i] - pr.left[i]) < 1e-6);
            }
        }
    }
}

TEST_CASE("start-point independence across seeds") {
    auto m = make(testmodels::pf_affine_family(2, 0.5, 0.3, 1.0, 0.1));
    EigenResult a = solve_eigen(m, {}, 1);
    EigenResult b = solve_eigen(m, {}, 999);
    CHECK(l1_dist(a.z_star, b.z_star) < 1e-7);
    CHECK(std::abs(a.lambda_star - b.lambda_star) < 1e-8);
}

TEST_CASE("permutation equivariance of the eigen direction") {
    Matrix x = Matrix::from_rows({{0.9, 0.3}, {0.2, 0.7}});
    Matrix y = Matrix::from_rows({{1.2, 0.1}, {0.4, 1.0}});
    auto permute = [](const Matrix& m) {
        Matrix out(2, 2);
        for (std::size_t i = 0; i < 2; ++i) {
            for (std::size_t j = 0; j < 2; ++j) out(i, j) = m(1 - i, 1 - j);
        }
        return out;
    };
    EigenResult base = solve_eigen(make(testmodels::pf_poisson(x, y)));
    EigenResult swapped = solve_eigen(make(testmodels::pf_poisson(permute(x), permute(y))));
    CHECK(swapped.lambda_star == doctest::Approx(base.lambda_star).epsilon(1e-7));
    CHECK(swapped.z_star[0] == doctest::Approx(base.z_star[1]).epsilon(1e-6));
    CHECK(swapped.z_star[1] == doctest::Approx(base.z_star[0]).epsilon(1e-6));
}

TEST_CASE("a diverging operator classifies as survival from large states") {
    Model m = testmodels::asexual_poisson(1.0);
    m.mating = MatingFunction::custom(
        1, 1, [](const Counts& w) { return Counts{checked_mul(w[0], w[0])}; },
        [](const Vec& w) { return Vec{w[0] * w[0]}; }, "square");
    REQUIRE(m.mating.check_superadditivity(2'000, 30, 11).ok());
    m.mating.mark_verified();

    auto [eigen, crit] = classify_model(make(m));
    CHECK_FALSE(eigen.has_value());
    CHECK(crit == Criticality::SurvivalFromLargeStates);
    CHECK_THROWS_AS(solve_eigen(make(m)), InfiniteOperatorError);
}

TEST_CASE("classification depends only on the model") {
    auto m = make(testmodels::single_type_pf_poisson(1.3, 2.2));
    auto c1 = classify_model(m, {}, 5).second;
    auto c2 = classify_model(m, {}, 500).second;
    CHECK(c1 == c2);
    CHECK(c1 == Criticality::Supercritical);
}

TEST_CASE("norm-ratio growth estimate matches the eigenvalue") {
    auto m = make(testmodels::pf_affine_family(2, 0.5, 0.3, 1.0, 0.1));
    EigenResult r = solve_eigen(m);

    // From the eigen direction the ratio is the eigenvalue immediately.
    CHECK(growth_rate_via_norms(m, r.z_star) == doctest::Approx(1.1).epsilon(1e-8));

    // From a basis direction it stabilizes to the same value.
    CHECK(growth_rate_via_norms(m, {1.0, 0.0}) == doctest::Approx(1.1).epsilon(1e-6));

    // Linear case: plain power iteration on the mean matrix.
    Matrix v = Matrix::from_rows({{0.7, 0.2}, {0.4, 0.9}});
    auto lin = make(testmodels::identity_poisson(v));
    auto pr = oracle::dense_power_iteration(v);
    CHECK(growth_rate_via_norms(lin, {1.0, 1.0}) == doctest::Approx(pr.lambda).epsilon(1e-6));
}

TEST_CASE("non-primitive models are rejected with diagnostics") {
    auto m = make(testmodels::identity_poisson(Matrix::from_rows({{0.0, 1.0}, {1.0, 0.0}})));
    CHECK_THROWS_AS(solve_eigen(m), NotPrimitiveError);
}
