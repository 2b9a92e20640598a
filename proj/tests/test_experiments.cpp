#include <doctest.h>

#include <cmath>

#include "bgw/experiments.hpp"
#include "bgw/report_io.hpp"
#include "models.hpp"

using namespace bgw;

namespace {

ValidatedModel make(const Model& m) { return ValidatedModel::create(m); }

const StatCell* find_cell(const ExperimentReport& r, const std::string& cell,
                          const std::string& stat) {
    for (const auto& c : r.cells) {
        if (c.cell == cell && c.stat == stat) return &c;
    }
    return nullptr;
}

}  // namespace

TEST_CASE("lln with deterministic offspring reports exactly zero error") {
    Model m;
    m.p = 2;
    m.q = 2;
    m.mating = MatingFunction::identity(2);
    m.offspring = OffspringLaw::deterministic({{1, 1}, {0, 1}});
    auto report = lln_experiment(make(m), {1.0, 1.0}, 3, {1, 10, 100}, 20, 5);
    for (const auto& c : report.cells) {
        CHECK(c.value == 0.0);
        CHECK(c.se == 0.0);
    }
    CHECK(report.all_pass);
}

TEST_CASE("lln error decreases in the initial mass for a nonlinear model") {
    auto m = make(testmodels::pf_affine_family(2, 0.5, 0.3, 1.0, 0.1));
    auto report = lln_experiment(m, {0.6, 0.4}, 2, {10, 100, 1000}, 300, 21);
    REQUIRE(report.cells.size() == 3);
    CHECK(report.all_pass);
    CHECK(report.cells[0].value > report.cells[2].value);
}

TEST_CASE("profile of the deterministic fixed point is exact") {
    auto m = make(testmodels::deterministic_pf_single(1, 1));
    EigenResult eigen = solve_eigen(m);
    REQUIRE(eigen.lambda_star == doctest::Approx(1.0));
    auto report = profile_experiment(m, {7}, 12, 50, 3, eigen);
    const StatCell* dir = find_cell(report, "survivors", "median_direction_l1_error");
    REQUIRE(dir);
    CHECK(dir->value == 0.0);
    CHECK(*dir->pass);
    const StatCell* ratio = find_cell(report, "survivors", "median_norm_ratio");
    REQUIRE(ratio);
    CHECK(ratio->value == doctest::Approx(1.0));
    CHECK(*ratio->pass);
    CHECK(report.all_pass);
}

TEST_CASE("profile reports rather than crashes when every trial dies") {
    auto m = make(testmodels::single_type_pf_poisson(0.3, 0.3));
    EigenResult eigen = solve_eigen(m);
    auto report = profile_experiment(m, {1}, 40, 50, 9, eigen);
    bool noted = false;
    for (const auto& n : report.notes) noted |= n == "no_survivors";
    CHECK(noted);
    CHECK_FALSE(report.all_pass);
}

TEST_CASE("profile concentrates near the eigen direction for the supercritical family") {
    auto m = make(testmodels::pf_affine_family(2, 0.5, 0.3, 1.0, 0.1));
    EigenResult eigen = solve_eigen(m);
    auto report = profile_experiment(m, {50, 50}, 25, 300, 31, eigen);
    const StatCell* dir = find_cell(report, "survivors", "median_direction_l1_error");
    REQUIRE(dir);
    CHECK(dir->value < 0.05);
    const StatCell* ratio = find_cell(report, "survivors", "median_norm_ratio");
    REQUIRE(ratio);
    CHECK(ratio->value > 1.05);
    CHECK(ratio->value < 1.15);
    CHECK(report.all_pass);
}

TEST_CASE("deterministic transitions settle into the corridor immediately") {
    auto m = make(testmodels::deterministic_pf_single(1, 1));
    auto report = corridor_experiment(m, {5}, 15, 40, 0.2, 3);
    const StatCell* frac = find_cell(report, "all", "settled_fraction");
    REQUIRE(frac);
    CHECK(frac->value == 1.0);
    const StatCell* max_onset = find_cell(report, "all", "onset_max");
    REQUIRE(max_onset);
    CHECK(max_onset->value == 0.0);
}

TEST_CASE("extinct trials settle into the corridor at their death") {
    auto m = make(testmodels::single_type_pf_poisson(0.5, 0.5));
    auto report = corridor_experiment(m, {4}, 60, 200, 0.3, 13);
    const StatCell* frac = find_cell(report, "all", "settled_fraction");
    REQUIRE(frac);
    CHECK(frac->value == 1.0);  // everything dies well before the horizon
}

TEST_CASE("supermartingale increments vanish identically for the deterministic model") {
    auto m = make(testmodels::deterministic_pf_single(1, 1));
    EigenResult eigen = solve_eigen(m);
    auto report = supermartingale_experiment(m, {7}, 10, 30, 3, eigen);
    for (const auto& c : report.cells) {
        CHECK(c.value == 0.0);
        CHECK(c.se == 0.0);
        CHECK(*c.pass);
    }
}

TEST_CASE("supermartingale holds across strata for linear and nonlinear models") {
    // Asexual Poisson: the normalized process is a martingale, increments
    // with mean zero.
    auto linear = make(testmodels::asexual_poisson(1.3));
    EigenResult le = solve_eigen(linear);
    auto linear_report = supermartingale_experiment(linear, {30}, 12, 2'000, 17, le);
    CHECK(linear_report.all_pass);

    auto nonlinear = make(testmodels::pf_affine_family(2, 0.5, 0.3, 1.0, 0.1));
    EigenResult ne = solve_eigen(nonlinear);
    auto report = supermartingale_experiment(nonlinear, {20, 20}, 12, 2'000, 19, ne);
    CHECK(report.all_pass);
}

TEST_CASE("domination with an empty second population degenerates to equality") {
    auto m = make(testmodels::single_type_pf_poisson(2.0, 2.0));
    auto report = domination_experiment(m, {3}, {0}, {2}, {0}, 2, 2'000, 23);
    const StatCell* margin = find_cell(report, "joint-split", "margin");
    REQUIRE(margin);
    // rhs = P(Z_n >= z1) * P(Z_n >= 0) = lhs in distribution; the margin is
    // zero up to Monte Carlo noise.
    CHECK(std::abs(margin->value) <= 4.0 * std::max(margin->se, 1e-12));
    CHECK(report.all_pass);
}

TEST_CASE("domination holds with equality for deterministic reproduction") {
    Model m;
    m.p = 1;
    m.q = 1;
    m.mating = MatingFunction::identity(1);
    m.offspring = OffspringLaw::deterministic({{2}});
    auto report = domination_experiment(make(m), {2}, {3}, {8}, {12}, 2, 200, 29);
    const StatCell* margin = find_cell(report, "joint-split", "margin");
    REQUIRE(margin);
    CHECK(margin->value == 0.0);  // both probabilities are exactly one
    CHECK(report.all_pass);
}

TEST_CASE("domination inequality holds on the nonlinear model") {
    auto m = make(testmodels::single_type_pf_poisson(2.0, 2.0));
    auto report = domination_experiment(m, {3}, {3}, {2}, {2}, 2, 4'000, 37);
    CHECK(report.all_pass);
    const StatCell* margin = find_cell(report, "joint-split", "margin");
    REQUIRE(margin);
    CHECK(margin->value >= -3.0 * margin->se);
}

TEST_CASE("extinction sweep classifies both sides of the boundary") {
    std::vector<std::pair<std::string, ValidatedModel>> cells;
    for (double mu : {0.6, 1.5}) {
        cells.emplace_back("mu=" + format_double(mu),
                           make(testmodels::single_type_pf_poisson(mu, 2.0)));
    }
    auto report = extinction_sweep(cells, {30}, 80, 400, 41);
    CHECK(report.all_pass);

    const StatCell* sub = find_cell(report, "mu=0.6", "q_hat");
    REQUIRE(sub);
    CHECK(sub->value >= 0.99);
    const StatCell* super = find_cell(report, "mu=1.5", "q_hat");
    REQUIRE(super);
    CHECK(super->value <= 0.9);

    const StatCell* lam = find_cell(report, "mu=0.6", "lambda_star");
    REQUIRE(lam);
    CHECK(lam->value == doctest::Approx(0.6).epsilon(1e-6));
}

TEST_CASE("reports are identical across reruns and thread counts") {
    auto m = make(testmodels::pf_affine_family(2, 0.5, 0.3, 1.0, 0.1));
    auto a = corridor_experiment(m, {20, 20}, 15, 100, 0.25, 71, {}, 1);
    auto b = corridor_experiment(m, {20, 20}, 15, 100, 0.25, 71, {}, 8);
    CHECK(report_csv(a) == report_csv(b));

    EigenResult eigen = solve_eigen(m);
    auto c = supermartingale_experiment(m, {10, 10}, 8, 200, 5, eigen, {}, 1);
    auto d = supermartingale_experiment(m, {10, 10}, 8, 200, 5, eigen, {}, 4);
    CHECK(report_csv(c) == report_csv(d));
}
