#include <doctest.h>

#include <json.hpp>

#include "bgw/config.hpp"

using namespace bgw;
using nlohmann::json;

namespace {

json base_config() {
    return json::parse(R"({
        "seed": 7,
        "model": {
            "p": 2, "q": 4,
            "split": {"females": 2, "males": 2},
            "mating": {"kind": "perfect_fidelity"},
            "offspring": {"kind": "poisson_product",
                          "rates": [[0.8, 0.3, 1.1, 0.1], [0.3, 0.8, 0.1, 1.1]]}
        },
        "simulation": {"z0": [50, 50], "horizon": 25, "trials": 100}
    })");
}

}  // namespace

TEST_CASE("a full config parses with documented defaults") {
    RunConfig cfg = parse_config(base_config());
    CHECK(cfg.seed == 7);
    CHECK(cfg.model.p == 2);
    CHECK(cfg.model.q == 4);
    CHECK(cfg.z0 == Counts{50, 50});
    CHECK(cfg.horizon == 25);
    CHECK(cfg.trials == 100);

    // Solver defaults.
    CHECK(cfg.eigen.tol == 1e-8);
    CHECK(cfg.eigen.growth.r_max == 1099511627776.0);
    CHECK(cfg.eigen.max_iter == 10'000);
    CHECK(cfg.eigen.starts == 5);
    CHECK(cfg.sim.sampling.per_couple_threshold == 1'000'000);
}

TEST_CASE("unknown keys are rejected at every level") {
    json doc = base_config();
    doc["typo_key"] = 1;
    CHECK_THROWS_AS(parse_config(doc), ConfigError);

    doc = base_config();
    doc["model"]["extra"] = 1;
    CHECK_THROWS_AS(parse_config(doc), ConfigError);

    doc = base_config();
    doc["model"]["mating"]["dd"] = 3;
    CHECK_THROWS_AS(parse_config(doc), ConfigError);

    doc = base_config();
    doc["simulation"]["horizont"] = 10;
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
}

TEST_CASE("dimension mismatches are rejected") {
    json doc = base_config();
    doc["model"]["q"] = 3;  // perfect fidelity needs q == 2p
    CHECK_THROWS_AS(parse_config(doc), ConfigError);

    doc = base_config();
    doc["model"]["offspring"]["rates"] = {{1.0, 2.0}, {3.0, 4.0}};  // wrong width
    CHECK_THROWS_AS(parse_config(doc), ConfigError);

    doc = base_config();
    doc["simulation"]["z0"] = {1, 2, 3};
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
}

TEST_CASE("every catalog mating kind builds from config") {
    auto model_of = [](const char* text) { return model_from_json(json::parse(text)); };

    CHECK(model_of(R"({"p":2,"q":2,
        "mating":{"kind":"identity"},
        "offspring":{"kind":"poisson_product","rates":[[1,0.5],[0.5,1]]}})")
              .mating.kind() == MatingKind::Identity);

    CHECK(model_of(R"({"p":1,"q":2,
        "mating":{"kind":"polygamous","d":3},
        "offspring":{"kind":"poisson_product","rates":[[1,0.5]]}})")
              .mating.kind() == MatingKind::Polygamous);

    CHECK(model_of(R"({"p":1,"q":2,
        "mating":{"kind":"promiscuous_single"},
        "offspring":{"kind":"geometric_product","means":[[1,0.5]]}})")
              .mating.kind() == MatingKind::PromiscuousSingle);

    CHECK(model_of(R"({"p":2,"q":3,
        "mating":{"kind":"completely_promiscuous"},
        "offspring":{"kind":"poisson_product","rates":[[1,0.5,1],[0.5,1,1]]}})")
              .mating.kind() == MatingKind::CompletelyPromiscuous);

    CHECK(model_of(R"({"p":2,"q":2,
        "mating":{"kind":"min_of_linear","a":[[1,0],[0,1]],"b":[[2,0],[0,2]]},
        "offspring":{"kind":"deterministic","rows":[[1,1],[1,1]]}})")
              .mating.kind() == MatingKind::MinOfLinear);

    CHECK(model_of(R"({"p":2,"q":2,
        "mating":{"kind":"capped_identity","alpha":0.7},
        "offspring":{"kind":"empirical","rows":[
            {"support":[[1,1]],"weights":[1.0]},
            {"support":[[0,1],[2,0]],"weights":[0.5,0.5]}]}})")
              .mating.kind() == MatingKind::CappedIdentity);

    CHECK(model_of(R"({"p":1,"q":2,
        "mating":{"kind":"perfect_fidelity"},
        "offspring":{"kind":"total_then_thin","totals":[[2.0]],"alpha":0.4}})")
              .offspring.kind() == OffspringKind::TotalThenThin);
}

TEST_CASE("unknown kinds and experiments are rejected") {
    json doc = base_config();
    doc["model"]["mating"]["kind"] = "mystery";
    CHECK_THROWS_AS(parse_config(doc), ConfigError);

    doc = base_config();
    doc["experiment"] = {{"name", "mystery"}};
    CHECK_THROWS_AS(parse_config(doc), ConfigError);

    doc = base_config();
    doc["experiment"] = {{"name", "lln"}, {"z_inf", {1.0, 1.0}}, {"n", 2}, {"m_grid", {10, 100}}};
    RunConfig cfg = parse_config(doc);
    CHECK(cfg.has_experiment);
}
