#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bgw/model.hpp"
#include "bgw/rng.hpp"
#include "bgw/stats.hpp"

namespace bgw {

struct SimOptions {
    SamplingPolicy sampling = {};
    // Stop a trial once |Z_n| exceeds this mass and mark it escaped; at that
    // size the chance of ever returning to 0 is negligible at desk scale, and
    // stopping early keeps long-horizon supercritical sweeps inside 64-bit
    // counts. 0 disables the cutoff (Overflow then fails loudly).
    std::uint64_t escape_mass = 1'000'000'000'000ull;
};

struct StepResult {
    Counts children;  // W
    Counts couples;   // Z_next = xi(W)
};

// One generation: draws z_i independent copies of V_{i,.} per type, sums to
// W, applies the mating function. z = 0 returns (0, 0) (empty sum).
StepResult step(const Model& m, const Counts& z, const TrialStream& stream,
                std::uint64_t generation, const SamplingPolicy& policy = {});

// Seeded realization of (Z_0..Z_N, W_1..W_N). Invariant: Z_n = xi(W_n) at
// every recorded step, and absorption is checked after applying xi so that
// extinction caused by mating failure lands on the generation it occurs.
struct Trajectory {
    std::vector<Counts> z_path;  // Z_0 .. Z_N
    std::vector<Counts> w_path;  // W_1 .. W_N (w_path[n-1] is W_n)
    std::optional<std::uint64_t> absorbed_at;
    std::optional<std::uint64_t> escaped_at;
    std::uint64_t master_seed = 0;
    std::uint64_t trial_index = 0;

    std::uint64_t steps() const { return z_path.empty() ? 0 : z_path.size() - 1; }
    const Counts& last() const { return z_path.back(); }
};

// Deterministic given (model, z0, horizon, master_seed, trial_index).
Trajectory simulate(const Model& m, const Counts& z0, std::uint64_t horizon,
                    std::uint64_t master_seed, std::uint64_t trial_index = 0,
                    const SimOptions& opt = {});

struct ExtinctionSummary {
    double q_hat = 0.0;       // fraction of trials absorbed by the horizon
    Interval ci95;            // Wilson
    std::uint64_t extinct = 0;
    std::uint64_t escaped = 0;
    std::uint64_t trials = 0;
    // |Z| among survivors at their last simulated state: {min, q25, median,
    // q75, max}; empty when every trial went extinct. Mass is either 0 or
    // large when the process is transitive, which this reports as a proxy.
    std::vector<double> survivor_mass_quantiles;
};

ExtinctionSummary batch_extinction(const Model& m, const Counts& z0, std::uint64_t horizon,
                                   std::uint64_t trials, std::uint64_t seed,
                                   const SimOptions& opt = {}, unsigned threads = 0);

}  // namespace bgw
