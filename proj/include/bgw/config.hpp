#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "bgw/eigen_solver.hpp"
#include "bgw/experiments.hpp"
#include "bgw/model.hpp"

namespace bgw {

// Resolved run configuration. The schema is strict: unknown keys are rejected
// everywhere so a typo cannot silently fall back to a default.
struct RunConfig {
    nlohmann::json raw;          // resolved config echoed into every artifact
    nlohmann::json model_block;  // model sub-document (used by sweeps)

    Model model;

    EigenOptions eigen;
    SimOptions sim;

    Counts z0;
    std::uint64_t horizon = 50;
    std::uint64_t trials = 1'000;
    std::uint64_t save_trajectories = 1;

    std::uint64_t seed = 0x5eed;
    std::string out_dir = "out";
    unsigned threads = 0;
    std::string format = "json";  // stdout rendering: json | csv

    bool has_experiment = false;
    nlohmann::json experiment;  // validated experiment block
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const nlohmann::json& doc);

// Builds a model from a model sub-document (strict keys).
Model model_from_json(const nlohmann::json& block);

}  // namespace bgw
