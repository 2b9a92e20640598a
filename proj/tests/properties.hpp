#pragma once

// Property drivers shared by the unit and acceptance suites: homogeneity,
// concavity, monotonicity and schedule monotonicity of the growth operator,
// checked on randomized inputs at relative tolerance.

#include <cmath>
#include <string>

#include "bgw/growth_operator.hpp"
#include "bgw/rng.hpp"

namespace props {

struct PropertyOutcome {
    int cases = 0;
    int failures = 0;
    std::string first_failure;
    bool ok() const { return failures == 0; }
};

inline bgw::Vec random_state(std::size_t p, bgw::SplitMix64& rng, double scale = 10.0) {
    bgw::Vec z(p);
    for (auto& x : z) x = bgw::uniform01(rng) * scale;
    return z;
}

// Runs all four invariants on `cases` random states of one model.
inline PropertyOutcome check_operator_properties(const bgw::ValidatedModel& m, int cases,
                                                 std::uint64_t seed, double tol = 1e-6) {
    PropertyOutcome out;
    bgw::SplitMix64 rng(bgw::derive_seed(seed, {0x70726f70ull}));
    const std::size_t p = m.couple_types();
    bgw::GrowthEvalOptions opt;

    auto fail = [&out](const std::string& what) {
        ++out.failures;
        if (out.first_failure.empty()) out.first_failure = what;
    };

    for (int c = 0; c < cases; ++c) {
        ++out.cases;
        bgw::Vec z = random_state(p, rng);
        bgw::MEvaluation mz = eval_growth(m, z, opt);
        if (!mz.converged || mz.any_infinite()) {
            fail("base evaluation did not converge finitely");
            continue;
        }

        // Homogeneity: |M(a z) - a M(z)|_1 <= tol * a * |M(z)|_1.
        for (double a : {0.5, 2.0, 10.0}) {
            bgw::Vec scaled_eval = eval_growth(m, bgw::scaled(z, a), opt).value;
            double err = bgw::l1_dist(scaled_eval, bgw::scaled(mz.value, a));
            if (err > tol * a * std::max(1e-12, bgw::l1_norm(mz.value))) {
                fail("homogeneity violated");
                break;
            }
        }

        // Concavity: M(a x + (1-a) y) >= a M(x) + (1-a) M(y) - slack.
        {
            bgw::Vec y = random_state(p, rng);
            double a = 0.2 + 0.6 * bgw::uniform01(rng);
            bgw::Vec mix = bgw::add(bgw::scaled(z, a), bgw::scaled(y, 1.0 - a));
            bgw::Vec lhs = eval_growth(m, mix, opt).value;
            bgw::Vec my = eval_growth(m, y, opt).value;
            for (std::size_t i = 0; i < p; ++i) {
                double rhs = a * mz.value[i] + (1.0 - a) * my[i];
                if (lhs[i] < rhs - tol * (1.0 + std::abs(rhs))) {
                    fail("concavity violated");
                    break;
                }
            }
        }

        // Monotonicity: x <= y componentwise implies M(x) <= M(y) + slack.
        {
            bgw::Vec y = z;
            for (auto& x : y) x += bgw::uniform01(rng) * 5.0;
            bgw::Vec my = eval_growth(m, y, opt).value;
            for (std::size_t i = 0; i < p; ++i) {
                if (mz.value[i] > my[i] + tol * (1.0 + std::abs(my[i]))) {
                    fail("monotonicity violated");
                    break;
                }
            }
        }

        // Schedule values g(r) nondecreasing in r, exactly (up to rounding).
        for (std::size_t s = 1; s < mz.schedule.size(); ++s) {
            const auto& prev = mz.schedule[s - 1].second;
            const auto& cur = mz.schedule[s].second;
            for (std::size_t i = 0; i < p; ++i) {
                if (std::isinf(cur[i]) || std::isinf(prev[i])) continue;
                if (cur[i] < prev[i] - 1e-9 * (1.0 + prev[i])) {
                    fail("schedule not monotone");
                    break;
                }
            }
        }
    }
    return out;
}

// Floor vs natural extension agreement of the operator limit.
inline PropertyOutcome check_extension_independence(const bgw::ValidatedModel& m, int cases,
                                                    std::uint64_t seed, double tol = 1e-5) {
    PropertyOutcome out;
    bgw::SplitMix64 rng(bgw::derive_seed(seed, {0x65787431ull}));
    bgw::GrowthEvalOptions natural;
    bgw::GrowthEvalOptions floor;
    floor.extension = bgw::Extension::Floor;
    for (int c = 0; c < cases; ++c) {
        ++out.cases;
        // States bounded away from zero: the floor extension resolves a
        // component of size a only once r exceeds 1/(a tol), and the schedule
        // is capped at r_max.
        bgw::Vec z = random_state(m.couple_types(), rng);
        for (double& x : z) x += 0.5;
        bgw::Vec a = eval_growth(m, z, natural).value;
        bgw::Vec b = eval_growth(m, z, floor).value;
        double err = bgw::l1_dist(a, b);
        if (err > tol * (1.0 + bgw::l1_norm(a))) {
            ++out.failures;
            if (out.first_failure.empty()) out.first_failure = "extensions disagree";
        }
    }
    return out;
}

}  // namespace props
