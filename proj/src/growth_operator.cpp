#include "bgw/growth_operator.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bgw/parallel.hpp"
#include "bgw/simulate.hpp"
#include "bgw/stats.hpp"

namespace bgw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_input(const ValidatedModel& m, const Vec& z) {
    if (z.size() != m.couple_types()) {
        throw DimensionError("growth operator input has wrong length");
    }
    for (double x : z) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw DimensionError("growth operator input must be finite and nonnegative");
        }
    }
}

}  // namespace

bool MEvaluation::any_infinite() const {
    for (double v : value) {
        if (std::isinf(v)) return true;
    }
    return false;
}

MEvaluation eval_growth(const ValidatedModel& m, const Vec& z, const GrowthEvalOptions& opt) {
    check_input(m, z);
    const Model& model = m.model();
    if (!model.mating.verified()) {
        throw UnverifiedMatingError(
            "mating function must pass check_superadditivity before growth evaluation");
    }

    const std::size_t p = m.couple_types();
    MEvaluation out;

    Vec zv = left_multiply(z, m.mean());
    if (l1_norm(zv) == 0.0) {
        // xi(r * 0) = 0 for every r: the limit is exactly zero.
        out.value.assign(p, 0.0);
        out.converged = true;
        out.schedule.push_back({1.0, out.value});
        return out;
    }

    std::vector<bool> infinite(p, false);
    Vec prev = model.mating.apply_real(zv, opt.extension);
    out.schedule.push_back({1.0, prev});

    // The floor extension moves in staircase steps, so calm increments alone
    // do not certify the limit: the floor resolution 1/r must also be below
    // tol before convergence is declared.
    const bool floor_resolution =
        opt.extension == Extension::Floor || !model.mating.has_natural_form();
    const double r_min =
        floor_resolution ? static_cast<double>(std::max<std::size_t>(m.child_types(), 1)) / opt.tol
                         : 1.0;

    double r = 1.0;
    int calm_streak = 0;
    double gap = kInf;
    while (r < opt.r_max) {
        r *= 2.0;
        Vec cur = model.mating.apply_real(scaled(zv, r), opt.extension);
        for (std::size_t i = 0; i < p; ++i) cur[i] /= r;

        gap = 0.0;
        bool pending_zero = false;
        bool all_infinite = true;
        for (std::size_t i = 0; i < p; ++i) {
            if (infinite[i]) {
                cur[i] = kInf;
                continue;
            }
            if (cur[i] > opt.diverge_cap && cur[i] >= opt.diverge_growth * prev[i]) {
                infinite[i] = true;
                cur[i] = kInf;
                continue;
            }
            all_infinite = false;
            if (cur[i] > 0.0) {
                gap = std::max(gap, (cur[i] - prev[i]) / cur[i]);
            } else {
                // A component still at zero is only certified by exhausting
                // the schedule; the floor extension can leave small values
                // at zero until r grows past their reciprocal.
                pending_zero = true;
            }
        }
        out.schedule.push_back({r, cur});
        prev = std::move(cur);

        if (all_infinite) break;
        calm_streak = gap < opt.tol ? calm_streak + 1 : 0;
        if (calm_streak >= 2 && !pending_zero && r >= r_min) break;
    }

    out.value = std::move(prev);
    out.r_used = r;
    out.gap = std::isfinite(gap) ? gap : 0.0;
    out.converged = calm_streak >= 2 || out.any_infinite();
    return out;
}

Vec iterate_growth(const ValidatedModel& m, Vec z, int n, const GrowthEvalOptions& opt) {
    if (n < 0) throw DimensionError("iteration count must be nonnegative");
    for (int k = 0; k < n; ++k) {
        MEvaluation ev = eval_growth(m, z, opt);
        if (ev.any_infinite()) {
            throw InfiniteOperatorError("growth operator iterate has an infinite component");
        }
        if (!ev.converged) {
            throw NotConvergedError("growth operator evaluation did not converge within r_max",
                                    ev.gap);
        }
        z = std::move(ev.value);
    }
    return z;
}

int primitivity_index(const ValidatedModel& m, const PrimitivityOptions& popt,
                      const GrowthEvalOptions& opt) {
    if (popt.n_max < 1) throw DimensionError("primitivity n_max must be at least 1");
    const std::size_t p = m.couple_types();

    // positive[i][n-1]: all components of M^n(e_i) clear the floor, tracked
    // on simplex-normalized iterates (equivalent by homogeneity).
    std::vector<std::vector<bool>> positive(p, std::vector<bool>(popt.n_max, false));
    for (std::size_t i = 0; i < p; ++i) {
        Vec u(p, 0.0);
        u[i] = 1.0;
        for (int n = 1; n <= popt.n_max; ++n) {
            MEvaluation ev = eval_growth(m, u, opt);
            if (ev.any_infinite()) {
                throw InfiniteOperatorError("growth operator diverges on a basis direction");
            }
            if (!ev.converged) {
                throw NotConvergedError("growth operator evaluation did not converge", ev.gap);
            }
            double s = l1_norm(ev.value);
            if (s <= 0.0) {
                throw NotPrimitiveError("growth operator annihilates basis direction e_" +
                                            std::to_string(i + 1) + " after " +
                                            std::to_string(n) + " steps",
                                        popt.n_max);
            }
            bool all_pos = true;
            for (std::size_t j = 0; j < p; ++j) {
                u[j] = ev.value[j] / s;
                all_pos &= u[j] > popt.positivity_floor;
            }
            positive[i][n - 1] = all_pos;
        }
    }

    for (int n0 = 1; n0 <= popt.n_max; ++n0) {
        bool ok = true;
        for (std::size_t i = 0; i < p && ok; ++i) {
            for (int n = n0; n <= popt.n_max && ok; ++n) ok = positive[i][n - 1];
        }
        if (ok) return n0;
    }
    std::ostringstream os;
    os << "no n0 <= " << popt.n_max << " makes every M^n(e_i) strictly positive";
    throw NotPrimitiveError(os.str(), popt.n_max);
}

ScaleValue eval_scale(const ValidatedModel& m, const Vec& z, double lambda_star,
                      const Vec& z_star, double tol, int n_max, const GrowthEvalOptions& opt) {
    check_input(m, z);
    if (!(lambda_star > 0.0)) throw DimensionError("lambda_star must be positive");
    (void)z_star;  // direction diagnostic only; the accumulator below is exact

    ScaleValue out;
    double a = l1_norm(z);
    if (a == 0.0) {
        out.converged = true;
        return out;
    }

    Vec u = scaled(z, 1.0 / a);
    int calm_streak = 0;
    for (int n = 1; n <= n_max; ++n) {
        MEvaluation ev = eval_growth(m, u, opt);
        if (ev.any_infinite()) {
            throw InfiniteOperatorError("growth operator diverges while evaluating the limit functional");
        }
        if (!ev.converged) {
            throw NotConvergedError("growth operator evaluation did not converge", ev.gap);
        }
        double s = l1_norm(ev.value);
        if (s <= 0.0) {
            throw NotPrimitiveError("limit functional hit a vanishing iterate", n);
        }
        double next = a * (s / lambda_star);
        bool calm = std::abs(next - a) <= tol * std::max(next, 1e-300);
        calm_streak = calm ? calm_streak + 1 : 0;
        a = next;
        u = scaled(ev.value, 1.0 / s);
        out.n_used = n;
        if (calm_streak >= 2) {
            out.converged = true;
            break;
        }
    }
    out.value = a;
    return out;
}

MeanGrowthTable mean_growth_crosscheck(const ValidatedModel& m, const Counts& z,
                                       const std::vector<std::uint64_t>& m_grid,
                                       std::uint64_t trials, std::uint64_t seed,
                                       const GrowthEvalOptions& opt, unsigned threads) {
    if (is_zero(z)) throw DimensionError("crosscheck needs a nonzero base state");
    if (trials < 2) throw DimensionError("crosscheck needs at least 2 trials");

    MeanGrowthTable table;
    table.operator_value = eval_growth(m, to_vec(z), opt).value;

    const std::size_t p = m.couple_types();
    for (std::size_t g = 0; g < m_grid.size(); ++g) {
        std::uint64_t mult = m_grid[g];
        Counts z0(p);
        for (std::size_t i = 0; i < p; ++i) z0[i] = checked_mul(z[i], mult);

        std::vector<Vec> samples(trials);
        std::uint64_t grid_seed = derive_seed(seed, {0x63726f73ull, g});
        parallel_for(trials, threads, [&](std::size_t t) {
            TrialStream stream{grid_seed, t};
            StepResult sr = step(m.model(), z0, stream, 1);
            Vec v = to_vec(sr.couples);
            for (double& x : v) x /= static_cast<double>(mult);
            samples[t] = std::move(v);
        });

        MeanGrowthRow row;
        row.m = mult;
        row.trials = trials;
        row.estimate.resize(p);
        row.se.resize(p);
        for (std::size_t i = 0; i < p; ++i) {
            MeanAccumulator acc;
            for (const auto& s : samples) acc.add(s[i]);
            row.estimate[i] = acc.mean();
            row.se[i] = acc.se();
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace bgw
