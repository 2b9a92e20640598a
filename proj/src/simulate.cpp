#include "bgw/simulate.hpp"

#include <algorithm>

#include "bgw/parallel.hpp"

namespace bgw {

StepResult step(const Model& m, const Counts& z, const TrialStream& stream,
                std::uint64_t generation, const SamplingPolicy& policy) {
    if (z.size() != m.p) throw DimensionError("state vector has wrong length");

    StepResult out;
    out.children.assign(m.q, 0);
    for (std::size_t i = 0; i < m.p; ++i) {
        if (z[i] == 0) continue;  // empty sum
        SplitMix64 rng = stream.substream(generation, i);
        Counts contribution = m.offspring.sample_sum(i, z[i], rng, policy);
        for (std::size_t j = 0; j < m.q; ++j) {
            out.children[j] = checked_add(out.children[j], contribution[j]);
        }
    }
    out.couples = m.mating.apply(out.children);
    return out;
}

Trajectory simulate(const Model& m, const Counts& z0, std::uint64_t horizon,
                    std::uint64_t master_seed, std::uint64_t trial_index, const SimOptions& opt) {
    Trajectory t;
    t.master_seed = master_seed;
    t.trial_index = trial_index;
    t.z_path.push_back(z0);
    if (is_zero(z0)) {
        t.absorbed_at = 0;
        return t;
    }

    TrialStream stream{master_seed, trial_index};
    for (std::uint64_t n = 1; n <= horizon; ++n) {
        StepResult sr = step(m, t.z_path.back(), stream, n, opt.sampling);
        t.w_path.push_back(std::move(sr.children));
        t.z_path.push_back(std::move(sr.couples));
        if (is_zero(t.z_path.back())) {
            t.absorbed_at = n;
            break;
        }
        if (opt.escape_mass != 0 && total_count(t.z_path.back()) > opt.escape_mass) {
            t.escaped_at = n;
            break;
        }
    }
    return t;
}

ExtinctionSummary batch_extinction(const Model& m, const Counts& z0, std::uint64_t horizon,
                                   std::uint64_t trials, std::uint64_t seed, const SimOptions& opt,
                                   unsigned threads) {
    if (trials < 1) throw DimensionError("batch extinction needs at least one trial");

    std::vector<std::uint8_t> extinct(trials, 0);
    std::vector<std::uint8_t> escaped(trials, 0);
    std::vector<double> survivor_mass(trials, 0.0);

    parallel_for(trials, threads, [&](std::size_t t) {
        Trajectory traj = simulate(m, z0, horizon, seed, t, opt);
        if (traj.absorbed_at) {
            extinct[t] = 1;
        } else {
            if (traj.escaped_at) escaped[t] = 1;
            survivor_mass[t] = static_cast<double>(total_count(traj.last()));
        }
    });

    ExtinctionSummary out;
    out.trials = trials;
    std::vector<double> masses;
    for (std::size_t t = 0; t < trials; ++t) {
        out.extinct += extinct[t];
        out.escaped += escaped[t];
        if (!extinct[t]) masses.push_back(survivor_mass[t]);
    }
    out.q_hat = static_cast<double>(out.extinct) / static_cast<double>(trials);
    out.ci95 = wilson_interval(out.extinct, trials);
    if (!masses.empty()) {
        out.survivor_mass_quantiles = quantiles(std::move(masses), {0.0, 0.25, 0.5, 0.75, 1.0});
    }
    return out;
}

}  // namespace bgw
