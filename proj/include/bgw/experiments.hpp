#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bgw/eigen_solver.hpp"
#include "bgw/model.hpp"
#include "bgw/simulate.hpp"

namespace bgw {

// One reported statistic. Every value carries its sample size and standard
// error; `bound`/`pass` are set when the cell is checked against a threshold
// coming from the experiment options (thresholds never live in the logic).
struct StatCell {
    std::string cell;   // e.g. "m=100", "n=17", "mu=0.8"
    std::string stat;   // e.g. "l1_error", "increment_mean"
    double value = 0.0;
    double se = 0.0;
    std::uint64_t n = 0;
    std::optional<double> bound;
    std::optional<bool> pass;
};

struct ExperimentReport {
    std::string name;
    std::string fingerprint;
    std::uint64_t seed = 0;
    std::vector<StatCell> cells;
    std::vector<std::string> notes;
    bool all_pass = true;

    StatCell& push(StatCell c);
};

struct LlnOptions {
    double slack_se = 2.0;  // allowed noise when asserting decrease across m
    SimOptions sim = {};
};

// For each m, simulates trials from Z_0 = floor(m z_inf) for n steps and
// reports E |Z_n/m - M^n(z_inf)|_1. The statistic must decrease in m within
// noise; deterministic offspring reports exactly zero error.
ExperimentReport lln_experiment(const ValidatedModel& m, const Vec& z_inf, int n,
                                const std::vector<std::uint64_t>& m_grid, std::uint64_t trials,
                                std::uint64_t seed, const LlnOptions& opt = {},
                                unsigned threads = 0);

struct ProfileOptions {
    double median_dir_bound = 0.05;    // median |Z_N/|Z_N| - z*|_1 among survivors
    double ratio_lo = 0.0;             // band for the median norm ratio;
    double ratio_hi = 0.0;             // 0/0 defaults to lambda* +- 0.05
    double c_floor = 1e-6;             // survivor scale-limit mass below this is flagged
    double scale_tol = 1e-7;
    int scale_max_iter = 400;
    SimOptions sim = {};
};

// Long-run direction and growth among surviving trials: the normalized state
// concentrates near z*, successive norm ratios near lambda*, and the
// empirical scale limit C_N = P(Z_N)/lambda*^N proxies the almost-sure limit
// (extinction coincides with a zero limit). All trials dying is a reported
// note, not a crash.
ExperimentReport profile_experiment(const ValidatedModel& m, const Counts& z0,
                                    std::uint64_t horizon, std::uint64_t trials,
                                    std::uint64_t seed, const EigenResult& eigen,
                                    const ProfileOptions& opt = {}, unsigned threads = 0);

struct CorridorOptions {
    double min_fraction = 0.95;  // trials that settle into the corridor before horizon
    SimOptions sim = {};
};

// Per trial, finds the smallest N after which every transition satisfies
// (1-eps) M(Z_n) <= Z_{n+1} <= (1+eps) M(Z_n); extinct trials settle once
// Z_n = 0. Reports the settled fraction and the distribution of N.
ExperimentReport corridor_experiment(const ValidatedModel& m, const Counts& z0,
                                     std::uint64_t horizon, std::uint64_t trials, double eps,
                                     std::uint64_t seed, const CorridorOptions& opt = {},
                                     unsigned threads = 0);

struct SupermartingaleOptions {
    double sigma = 3.0;     // one-sided band on stratified increment means
    bool fine_bins = false; // additionally bin survivors by |Z_n| decade
    double scale_tol = 1e-7;
    int scale_max_iter = 400;
    SimOptions sim = {};
};

// Estimates E[C_{n+1} - C_n] stratified by n, where C_n = P(Z_n)/lambda*^n.
// Each stratum mean must be <= 0 within sigma standard errors; the linear
// (martingale) cases sit at 0 and the deterministic case is exactly 0.
ExperimentReport supermartingale_experiment(const ValidatedModel& m, const Counts& z0,
                                            std::uint64_t horizon, std::uint64_t trials,
                                            std::uint64_t seed, const EigenResult& eigen,
                                            const SupermartingaleOptions& opt = {},
                                            unsigned threads = 0);

struct DominationOptions {
    double sigma = 3.0;
    SimOptions sim = {};
};

// Superadditive stochastic domination: P(Z_n >= z1 + z1t | Z_0 = z0 + z0t) is
// at least P(Z_n >= z1 | Z_0 = z0) * P(Z_n >= z1t | Z_0 = z0t), checked by
// three independent Monte Carlo batches within combined standard errors.
ExperimentReport domination_experiment(const ValidatedModel& m, const Counts& z0,
                                       const Counts& z0t, const Counts& z1, const Counts& z1t,
                                       std::uint64_t n, std::uint64_t trials, std::uint64_t seed,
                                       const DominationOptions& opt = {}, unsigned threads = 0);

struct SweepOptions {
    double sub_lambda = 0.9;    // cells with lambda* <= this must have q_hat >= sub_qmin
    double sub_qmin = 0.99;
    double super_lambda = 1.2;  // cells with lambda* >= this must have q_hat <= super_qmax
    double super_qmax = 0.9;
    EigenOptions eigen = {};
    SimOptions sim = {};
};

// For each (label, model) cell: lambda* via the eigen solver and q_hat via
// batch extinction. Per-cell failures are recorded and the sweep continues.
ExperimentReport extinction_sweep(const std::vector<std::pair<std::string, ValidatedModel>>& cells,
                                  const Counts& z0, std::uint64_t horizon, std::uint64_t trials,
                                  std::uint64_t seed, const SweepOptions& opt = {},
                                  unsigned threads = 0);

}  // namespace bgw
