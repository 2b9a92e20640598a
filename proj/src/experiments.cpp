#include "bgw/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "bgw/growth_operator.hpp"
#include "bgw/parallel.hpp"
#include "bgw/stats.hpp"

namespace bgw {

namespace {

std::string cell_label(const char* prefix, std::uint64_t v) {
    std::ostringstream os;
    os << prefix << "=" << v;
    return os.str();
}

// Computes fn(key) for every distinct key, in parallel, into an ordered map.
// Two-pass structure keeps the reduction deterministic and lock-free.
template <typename T, typename Fn>
std::map<Counts, T> memoized(const std::set<Counts>& keys, unsigned threads, Fn&& fn) {
    std::vector<const Counts*> order;
    order.reserve(keys.size());
    for (const auto& k : keys) order.push_back(&k);
    std::vector<T> values(order.size());
    parallel_for(order.size(), threads, [&](std::size_t i) { values[i] = fn(*order[i]); });
    std::map<Counts, T> out;
    for (std::size_t i = 0; i < order.size(); ++i) out.emplace(*order[i], std::move(values[i]));
    return out;
}

// State at generation n, with absorption padded by zeros.
Counts state_at(const Trajectory& t, std::uint64_t n, std::size_t p) {
    if (n < t.z_path.size()) return t.z_path[n];
    return Counts(p, 0);
}

}  // namespace

StatCell& ExperimentReport::push(StatCell c) {
    if (c.pass && !*c.pass) all_pass = false;
    cells.push_back(std::move(c));
    return cells.back();
}

ExperimentReport lln_experiment(const ValidatedModel& m, const Vec& z_inf, int n,
                                const std::vector<std::uint64_t>& m_grid, std::uint64_t trials,
                                std::uint64_t seed, const LlnOptions& opt, unsigned threads) {
    if (l1_norm(z_inf) <= 0.0) throw DimensionError("lln needs a nonzero direction");
    ExperimentReport report;
    report.name = "lln";
    report.fingerprint = m.fingerprint();
    report.seed = seed;

    Vec reference = iterate_growth(m, z_inf, n);

    double prev_mean = 0.0, prev_se = 0.0;
    bool have_prev = false;
    std::uint64_t escaped_total = 0;
    for (std::size_t g = 0; g < m_grid.size(); ++g) {
        const std::uint64_t mult = m_grid[g];
        Counts z0 = floor_counts(scaled(z_inf, static_cast<double>(mult)));

        std::vector<double> errors(trials, 0.0);
        std::vector<std::uint8_t> escaped(trials, 0);
        std::uint64_t grid_seed = derive_seed(seed, {0x6c6c6eull, g});
        parallel_for(trials, threads, [&](std::size_t t) {
            Trajectory traj = simulate(m.model(), z0, static_cast<std::uint64_t>(n), grid_seed, t,
                                       opt.sim);
            if (traj.escaped_at) escaped[t] = 1;
            Counts zn = state_at(traj, static_cast<std::uint64_t>(n), m.couple_types());
            double err = 0.0;
            for (std::size_t i = 0; i < zn.size(); ++i) {
                err += std::abs(static_cast<double>(zn[i]) / static_cast<double>(mult) -
                                reference[i]);
            }
            errors[t] = err;
        });

        MeanAccumulator acc;
        for (std::size_t t = 0; t < trials; ++t) {
            acc.add(errors[t]);
            escaped_total += escaped[t];
        }

        StatCell c;
        c.cell = cell_label("m", mult);
        c.stat = "l1_error";
        c.value = acc.mean();
        c.se = acc.se();
        c.n = trials;
        if (have_prev) {
            // Decrease across the grid, allowing slack_se combined noise.
            double slack = opt.slack_se * std::sqrt(prev_se * prev_se + c.se * c.se);
            c.bound = prev_mean + slack;
            c.pass = c.value <= *c.bound;
        }
        prev_mean = c.value;
        prev_se = c.se;
        have_prev = true;
        report.push(std::move(c));
    }
    if (escaped_total > 0) {
        report.notes.push_back("escaped_trials=" + std::to_string(escaped_total));
    }
    return report;
}

ExperimentReport profile_experiment(const ValidatedModel& m, const Counts& z0,
                                    std::uint64_t horizon, std::uint64_t trials,
                                    std::uint64_t seed, const EigenResult& eigen,
                                    const ProfileOptions& opt, unsigned threads) {
    ExperimentReport report;
    report.name = "profile";
    report.fingerprint = m.fingerprint();
    report.seed = seed;

    const std::size_t p = m.couple_types();
    double ratio_lo = opt.ratio_lo, ratio_hi = opt.ratio_hi;
    if (ratio_lo == 0.0 && ratio_hi == 0.0) {
        ratio_lo = eigen.lambda_star - 0.05;
        ratio_hi = eigen.lambda_star + 0.05;
    }

    std::vector<Trajectory> trajectories(trials);
    std::uint64_t sim_seed = derive_seed(seed, {0x70726f66ull});
    parallel_for(trials, threads, [&](std::size_t t) {
        trajectories[t] = simulate(m.model(), z0, horizon, sim_seed, t, opt.sim);
    });

    std::set<Counts> final_states;
    std::uint64_t survivors = 0, escaped = 0;
    for (const auto& traj : trajectories) {
        if (traj.absorbed_at) continue;
        ++survivors;
        if (traj.escaped_at) ++escaped;
        final_states.insert(traj.last());
    }

    StatCell count_cell;
    count_cell.cell = "survivors";
    count_cell.stat = "count";
    count_cell.value = static_cast<double>(survivors);
    count_cell.n = trials;
    report.push(std::move(count_cell));
    if (escaped > 0) report.notes.push_back("escaped_trials=" + std::to_string(escaped));

    if (survivors == 0) {
        report.notes.push_back("no_survivors");
        report.all_pass = false;
        return report;
    }

    auto scale_of = memoized<double>(final_states, threads, [&](const Counts& state) {
        return eval_scale(m, to_vec(state), eigen.lambda_star, eigen.z_star, opt.scale_tol,
                          opt.scale_max_iter)
            .value;
    });

    std::vector<double> dir_errors, ratios, c_limits;
    dir_errors.reserve(survivors);
    for (const auto& traj : trajectories) {
        if (traj.absorbed_at) continue;
        const Counts& zn = traj.last();
        double mass = static_cast<double>(total_count(zn));
        double err = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            err += std::abs(static_cast<double>(zn[i]) / mass - eigen.z_star[i]);
        }
        dir_errors.push_back(err);
        if (traj.z_path.size() >= 2) {
            const Counts& prev = traj.z_path[traj.z_path.size() - 2];
            double prev_mass = static_cast<double>(total_count(prev));
            if (prev_mass > 0.0) ratios.push_back(mass / prev_mass);
        }
        double n_gen = static_cast<double>(traj.steps());
        c_limits.push_back(scale_of.at(zn) / std::pow(eigen.lambda_star, n_gen));
    }

    StatCell dir;
    dir.cell = "survivors";
    dir.stat = "median_direction_l1_error";
    dir.value = quantile(dir_errors, 0.5);
    dir.n = survivors;
    dir.bound = opt.median_dir_bound;
    dir.pass = dir.value < *dir.bound;
    report.push(std::move(dir));

    StatCell ratio;
    ratio.cell = "survivors";
    ratio.stat = "median_norm_ratio";
    ratio.value = quantile(ratios, 0.5);
    ratio.n = ratios.size();
    ratio.bound = ratio_hi;
    ratio.pass = ratio.value >= ratio_lo && ratio.value <= ratio_hi;
    report.push(std::move(ratio));
    {
        std::ostringstream os;
        os << "ratio_band=[" << ratio_lo << "," << ratio_hi << "]";
        report.notes.push_back(os.str());
    }

    auto cq = quantiles(c_limits, {0.1, 0.5, 0.9});
    const char* names[3] = {"scale_limit_q10", "scale_limit_q50", "scale_limit_q90"};
    for (int k = 0; k < 3; ++k) {
        StatCell c;
        c.cell = "survivors";
        c.stat = names[k];
        c.value = cq[k];
        c.n = survivors;
        report.push(std::move(c));
    }
    std::uint64_t below = 0;
    for (double c : c_limits) below += c < opt.c_floor ? 1 : 0;
    StatCell floor_cell;
    floor_cell.cell = "survivors";
    floor_cell.stat = "scale_limit_below_floor_fraction";
    floor_cell.value = static_cast<double>(below) / static_cast<double>(survivors);
    floor_cell.n = survivors;
    report.push(std::move(floor_cell));
    if (floor_cell.value > 0.5) {
        // Survivor scale mass collapsing toward zero suggests a degenerate
        // limit; light-tailed catalog laws all have finite V log V moments,
        // so flag loudly for custom laws.
        report.notes.push_back("scale_limit_mass_collapses_toward_zero");
    }

    return report;
}

ExperimentReport corridor_experiment(const ValidatedModel& m, const Counts& z0,
                                     std::uint64_t horizon, std::uint64_t trials, double eps,
                                     std::uint64_t seed, const CorridorOptions& opt,
                                     unsigned threads) {
    if (!(eps > 0.0 && eps < 1.0)) throw DimensionError("corridor epsilon must lie in (0,1)");
    ExperimentReport report;
    report.name = "corridor";
    report.fingerprint = m.fingerprint();
    report.seed = seed;

    std::vector<Trajectory> trajectories(trials);
    std::uint64_t sim_seed = derive_seed(seed, {0x636f7272ull});
    parallel_for(trials, threads, [&](std::size_t t) {
        trajectories[t] = simulate(m.model(), z0, horizon, sim_seed, t, opt.sim);
    });

    std::set<Counts> states;
    for (const auto& traj : trajectories) {
        for (std::size_t n = 0; n + 1 < traj.z_path.size(); ++n) states.insert(traj.z_path[n]);
    }
    auto growth_of = memoized<Vec>(states, threads, [&](const Counts& state) {
        MEvaluation ev = eval_growth(m, to_vec(state));
        if (ev.any_infinite()) {
            throw InfiniteOperatorError("growth operator diverges along a trajectory");
        }
        return ev.value;
    });

    const std::size_t p = m.couple_types();
    std::vector<double> onsets;
    std::uint64_t settled = 0, escaped = 0;
    onsets.reserve(trials);
    for (const auto& traj : trajectories) {
        if (traj.escaped_at) ++escaped;
        // Transitions recorded: z_path[n] -> z_path[n+1]. Past the recorded
        // path the state is frozen at 0 (absorbed), where the corridor holds
        // exactly. Scan backward for the first violation.
        std::size_t onset = 0;
        for (std::size_t n = traj.z_path.size(); n-- > 1;) {
            const Vec& g = growth_of.at(traj.z_path[n - 1]);
            bool inside = true;
            for (std::size_t i = 0; i < p && inside; ++i) {
                double zn = static_cast<double>(traj.z_path[n][i]);
                inside = zn >= (1.0 - eps) * g[i] && zn <= (1.0 + eps) * g[i];
            }
            if (!inside) {
                onset = n;  // corridor holds only from this transition on
                break;
            }
        }
        bool has_settled = onset < horizon;
        settled += has_settled ? 1 : 0;
        onsets.push_back(static_cast<double>(onset));
    }

    StatCell frac;
    frac.cell = "all";
    frac.stat = "settled_fraction";
    frac.value = static_cast<double>(settled) / static_cast<double>(trials);
    frac.se = std::sqrt(frac.value * (1.0 - frac.value) / static_cast<double>(trials));
    frac.n = trials;
    frac.bound = opt.min_fraction;
    frac.pass = frac.value >= *frac.bound;
    report.push(std::move(frac));

    auto oq = quantiles(onsets, {0.5, 0.9, 1.0});
    const char* names[3] = {"onset_q50", "onset_q90", "onset_max"};
    for (int k = 0; k < 3; ++k) {
        StatCell c;
        c.cell = "all";
        c.stat = names[k];
        c.value = oq[k];
        c.n = trials;
        report.push(std::move(c));
    }
    if (escaped > 0) report.notes.push_back("escaped_trials=" + std::to_string(escaped));
    return report;
}

ExperimentReport supermartingale_experiment(const ValidatedModel& m, const Counts& z0,
                                            std::uint64_t horizon, std::uint64_t trials,
                                            std::uint64_t seed, const EigenResult& eigen,
                                            const SupermartingaleOptions& opt, unsigned threads) {
    ExperimentReport report;
    report.name = "supermartingale";
    report.fingerprint = m.fingerprint();
    report.seed = seed;

    std::vector<Trajectory> trajectories(trials);
    std::uint64_t sim_seed = derive_seed(seed, {0x736d6772ull});
    parallel_for(trials, threads, [&](std::size_t t) {
        trajectories[t] = simulate(m.model(), z0, horizon, sim_seed, t, opt.sim);
    });

    std::set<Counts> states;
    std::uint64_t escaped = 0;
    for (const auto& traj : trajectories) {
        if (traj.escaped_at) ++escaped;
        for (const auto& z : traj.z_path) states.insert(z);
    }
    auto scale_of = memoized<double>(states, threads, [&](const Counts& state) {
        if (is_zero(state)) return 0.0;
        return eval_scale(m, to_vec(state), eigen.lambda_star, eigen.z_star, opt.scale_tol,
                          opt.scale_max_iter)
            .value;
    });

    // Normalized scale process C_n = P(Z_n)/lambda*^n; stratified increment
    // means over all trials (absorbed trials contribute zero increments).
    std::vector<MeanAccumulator> increments(horizon);
    std::map<std::pair<std::uint64_t, int>, MeanAccumulator> binned;
    for (const auto& traj : trajectories) {
        std::uint64_t last = traj.escaped_at ? *traj.escaped_at : horizon;
        double lambda_pow = 1.0;
        for (std::uint64_t n = 0; n < last; ++n) {
            Counts zn = state_at(traj, n, m.couple_types());
            Counts znext = state_at(traj, n + 1, m.couple_types());
            double cn = scale_of.at(zn) / lambda_pow;
            lambda_pow *= eigen.lambda_star;
            double cnext = scale_of.at(znext) / lambda_pow;
            increments[n].add(cnext - cn);
            if (opt.fine_bins && !is_zero(zn)) {
                int decade = static_cast<int>(
                    std::floor(std::log10(static_cast<double>(total_count(zn)))));
                binned[{n, decade}].add(cnext - cn);
            }
        }
    }

    for (std::uint64_t n = 0; n < horizon; ++n) {
        StatCell c;
        c.cell = cell_label("n", n);
        c.stat = "increment_mean";
        c.value = increments[n].mean();
        c.se = increments[n].se();
        c.n = increments[n].count();
        c.bound = opt.sigma * c.se;
        c.pass = c.value <= *c.bound;
        report.push(std::move(c));
    }
    if (opt.fine_bins) {
        for (const auto& [key, acc] : binned) {
            StatCell c;
            std::ostringstream os;
            os << "n=" << key.first << ",mass_decade=" << key.second;
            c.cell = os.str();
            c.stat = "increment_mean_binned";
            c.value = acc.mean();
            c.se = acc.se();
            c.n = acc.count();
            report.push(std::move(c));
        }
    }
    if (escaped > 0) report.notes.push_back("escaped_trials=" + std::to_string(escaped));
    return report;
}

ExperimentReport domination_experiment(const ValidatedModel& m, const Counts& z0,
                                       const Counts& z0t, const Counts& z1, const Counts& z1t,
                                       std::uint64_t n, std::uint64_t trials, std::uint64_t seed,
                                       const DominationOptions& opt, unsigned threads) {
    ExperimentReport report;
    report.name = "domination";
    report.fingerprint = m.fingerprint();
    report.seed = seed;

    const std::size_t p = m.couple_types();
    Counts z0_sum(p), z1_sum(p);
    for (std::size_t i = 0; i < p; ++i) {
        z0_sum[i] = checked_add(z0[i], z0t[i]);
        z1_sum[i] = checked_add(z1[i], z1t[i]);
    }

    auto estimate = [&](const Counts& start, const Counts& target, std::uint64_t tag) {
        std::vector<std::uint8_t> hit(trials, 0);
        std::uint64_t batch_seed = derive_seed(seed, {0x646f6dull, tag});
        parallel_for(trials, threads, [&](std::size_t t) {
            Trajectory traj = simulate(m.model(), start, n, batch_seed, t, opt.sim);
            Counts zn = state_at(traj, n, p);
            bool ge = true;
            for (std::size_t i = 0; i < p && ge; ++i) ge = zn[i] >= target[i];
            hit[t] = ge ? 1 : 0;
        });
        std::uint64_t count = 0;
        for (auto h : hit) count += h;
        double prob = static_cast<double>(count) / static_cast<double>(trials);
        double se = std::sqrt(prob * (1.0 - prob) / static_cast<double>(trials));
        return std::make_pair(prob, se);
    };

    auto [lhs, lhs_se] = estimate(z0_sum, z1_sum, 0);
    auto [pb, pb_se] = estimate(z0, z1, 1);
    auto [pc, pc_se] = estimate(z0t, z1t, 2);

    double rhs = pb * pc;
    double rhs_se = std::sqrt(pc * pc * pb_se * pb_se + pb * pb * pc_se * pc_se);

    StatCell a;
    a.cell = "joint";
    a.stat = "p_joint_reach";
    a.value = lhs;
    a.se = lhs_se;
    a.n = trials;
    report.push(std::move(a));

    StatCell b;
    b.cell = "split";
    b.stat = "p_product_reach";
    b.value = rhs;
    b.se = rhs_se;
    b.n = trials;
    report.push(std::move(b));

    StatCell margin;
    margin.cell = "joint-split";
    margin.stat = "margin";
    margin.value = lhs - rhs;
    margin.se = std::sqrt(lhs_se * lhs_se + rhs_se * rhs_se);
    margin.n = trials;
    margin.bound = -opt.sigma * margin.se;
    margin.pass = margin.value >= *margin.bound;
    report.push(std::move(margin));
    return report;
}

ExperimentReport extinction_sweep(const std::vector<std::pair<std::string, ValidatedModel>>& cells,
                                  const Counts& z0, std::uint64_t horizon, std::uint64_t trials,
                                  std::uint64_t seed, const SweepOptions& opt, unsigned threads) {
    ExperimentReport report;
    report.name = "extinction_sweep";
    report.fingerprint = cells.empty() ? "" : cells.front().second.fingerprint();
    report.seed = seed;

    for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto& [label, model] = cells[c];
        std::uint64_t cell_seed = derive_seed(seed, {0x73776565ull, c});
        try {
            auto [eigen, crit] = classify_model(model, opt.eigen, cell_seed);

            StatCell lam;
            lam.cell = label;
            lam.stat = "lambda_star";
            lam.value = eigen ? eigen->lambda_star : std::numeric_limits<double>::infinity();
            lam.n = 1;
            report.push(std::move(lam));

            StatCell cls;
            cls.cell = label;
            cls.stat = std::string("class=") + to_string(crit);
            cls.value = 0.0;
            cls.n = 1;
            report.push(std::move(cls));

            ExtinctionSummary ext =
                batch_extinction(model.model(), z0, horizon, trials, cell_seed, opt.sim, threads);

            StatCell q;
            q.cell = label;
            q.stat = "q_hat";
            q.value = ext.q_hat;
            q.se = std::sqrt(ext.q_hat * (1.0 - ext.q_hat) / static_cast<double>(trials));
            q.n = trials;
            if (eigen && eigen->lambda_star <= opt.sub_lambda) {
                q.bound = opt.sub_qmin;
                q.pass = q.value >= *q.bound;
            } else if (!eigen || eigen->lambda_star >= opt.super_lambda) {
                // An infinite operator guarantees survival from large states,
                // so the supercritical bound applies to it as well.
                q.bound = opt.super_qmax;
                q.pass = q.value <= *q.bound;
            }
            report.push(std::move(q));
        } catch (const Error& e) {
            report.notes.push_back("cell " + label + " failed: " + e.what());
            report.all_pass = false;
        }
    }
    return report;
}

}  // namespace bgw
