#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bgw/model.hpp"
#include "bgw/types.hpp"

namespace bgw {

struct GrowthEvalOptions {
    double tol = 1e-8;                 // relative increment threshold
    double r_max = 1099511627776.0;    // 2^40, end of the doubling schedule
    double diverge_cap = 1e12;         // component flagged +inf beyond this
    double diverge_growth = 1.02;      // ...while still growing this much per doubling
    Extension extension = Extension::Natural;
};

// One evaluation of the mean growth operator M(z) = lim_r xi(r z V) / r.
// The schedule values g(r) are nondecreasing in r (Fekete), which callers
// rely on for the monotonicity property checks.
struct MEvaluation {
    Vec value;            // length p, entries may be +inf
    double r_used = 1.0;  // final scaling factor
    bool converged = false;
    double gap = 0.0;     // last relative increment over finite entries
    std::vector<std::pair<double, Vec>> schedule;  // (r, g(r)) diagnostics

    bool any_infinite() const;
};

struct ScaleValue {
    double value = 0.0;  // lim |M^n(z)| / lambda*^n
    int n_used = 0;
    bool converged = false;
};

// Evaluates g(r) = xi(r z V) / r on the doubling schedule r = 1, 2, 4, ...
// Returns once the componentwise relative increment stays below tol on two
// consecutive doublings. Components exceeding diverge_cap while still growing
// are flagged +inf. Never throws for non-convergence: the caller reads
// `converged` and `gap` and decides.
MEvaluation eval_growth(const ValidatedModel& m, const Vec& z,
                        const GrowthEvalOptions& opt = {});

// M composed n times; n = 0 is the identity. Throws InfiniteOperatorError if
// any intermediate component is flagged +inf and NotConvergedError if an
// evaluation fails to converge.
Vec iterate_growth(const ValidatedModel& m, Vec z, int n, const GrowthEvalOptions& opt = {});

struct PrimitivityOptions {
    int n_max = 64;
    double positivity_floor = 1e-12;  // on simplex-normalized iterates
};

// Smallest n0 <= n_max such that every component of M^n(e_i) stays strictly
// positive for all i and all n in [n0, n_max]; iterates are renormalized to
// the simplex, which is equivalent by homogeneity. Throws NotPrimitiveError.
int primitivity_index(const ValidatedModel& m, const PrimitivityOptions& popt = {},
                      const GrowthEvalOptions& opt = {});

// The limit functional P(z) = lim_n |M^n(z)| / lambda*^n, evaluated by
// normalized iteration with a running scale accumulator. z_star is used only
// as a consistency diagnostic. converged = false when n_max is reached.
ScaleValue eval_scale(const ValidatedModel& m, const Vec& z, double lambda_star,
                      const Vec& z_star, double tol = 1e-8, int n_max = 400,
                      const GrowthEvalOptions& opt = {});

struct MeanGrowthRow {
    std::uint64_t m = 0;
    Vec estimate;  // Monte Carlo E(Z_1 | Z_0 = m z) / m
    Vec se;
    std::uint64_t trials = 0;
};

struct MeanGrowthTable {
    Vec operator_value;  // eval_growth(z)
    std::vector<MeanGrowthRow> rows;
};

// Monte Carlo cross-check of the mean-growth characterization: the estimates
// increase in m toward the operator value and never exceed it by more than
// sampling error.
MeanGrowthTable mean_growth_crosscheck(const ValidatedModel& m, const Counts& z,
                                       const std::vector<std::uint64_t>& m_grid,
                                       std::uint64_t trials, std::uint64_t seed,
                                       const GrowthEvalOptions& opt = {},
                                       unsigned threads = 0);

}  // namespace bgw
