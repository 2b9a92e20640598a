#include "bgw/eigen_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bgw/rng.hpp"

namespace bgw {

namespace {

Vec random_simplex_point(std::size_t p, SplitMix64& rng) {
    Vec u(p);
    double sum = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        u[i] = -std::log(1.0 - uniform01(rng));
        sum += u[i];
    }
    for (double& x : u) x /= sum;
    return u;
}

// One normalized-iteration run; returns the fixed direction.
Vec run_iteration(const ValidatedModel& m, Vec u, const EigenOptions& opt, int& iterations) {
    for (int k = 1; k <= opt.max_iter; ++k) {
        MEvaluation ev = eval_growth(m, u, opt.growth);
        if (ev.any_infinite()) {
            throw InfiniteOperatorError("growth operator diverges during eigen iteration");
        }
        if (!ev.converged) {
            throw NotConvergedError("growth operator evaluation did not converge", ev.gap);
        }
        double s = l1_norm(ev.value);
        if (s <= 0.0) {
            throw NotPrimitiveError("eigen iteration hit a vanishing image", 0);
        }
        Vec next = scaled(ev.value, 1.0 / s);
        double move = l1_dist(next, u);
        u = std::move(next);
        if (move < opt.tol) {
            iterations = k;
            return u;
        }
    }
    throw NotConvergedError("normalized eigen iteration did not converge within max_iter");
}

}  // namespace

const char* to_string(Criticality c) {
    switch (c) {
        case Criticality::Subcritical: return "Subcritical";
        case Criticality::Critical: return "Critical";
        case Criticality::Supercritical: return "Supercritical";
        case Criticality::SurvivalFromLargeStates: return "SurvivalFromLargeStates";
    }
    return "?";
}

EigenResult solve_eigen(const ValidatedModel& m, const EigenOptions& opt, std::uint64_t seed) {
    const std::size_t p = m.couple_types();

    EigenResult result;
    result.primitivity_n0 = primitivity_index(m, opt.primitivity, opt.growth);

    // Certify finiteness over the simplex by sampling: basis vectors, the
    // midpoint, and random points. The bounded-or-infinite dichotomy on
    // continuity components makes sparse sampling informative, and a flagged
    // divergence is a classification for the caller, not a crash.
    auto probe = [&](const Vec& z) {
        MEvaluation ev = eval_growth(m, z, opt.growth);
        if (ev.any_infinite()) {
            throw InfiniteOperatorError("growth operator is infinite somewhere on the simplex");
        }
        if (!ev.converged) {
            throw NotConvergedError("finiteness probe did not converge", ev.gap);
        }
    };
    for (std::size_t i = 0; i < p; ++i) {
        Vec e(p, 0.0);
        e[i] = 1.0;
        probe(e);
    }
    probe(Vec(p, 1.0 / static_cast<double>(p)));
    SplitMix64 probe_rng(derive_seed(seed, {0x70726f62ull}));
    for (int s = 0; s < opt.finiteness_samples; ++s) probe(random_simplex_point(p, probe_rng));

    // Normalized iteration from several random starts; Krause uniqueness
    // requires them all to land on the same direction.
    std::vector<Vec> fixed_points;
    int worst_iterations = 0;
    for (int s = 0; s < std::max(1, opt.starts); ++s) {
        SplitMix64 start_rng(derive_seed(seed, {0x73746172ull, static_cast<std::uint64_t>(s)}));
        Vec u0 = random_simplex_point(p, start_rng);
        int iters = 0;
        fixed_points.push_back(run_iteration(m, std::move(u0), opt, iters));
        worst_iterations = std::max(worst_iterations, iters);
    }
    for (std::size_t a = 0; a < fixed_points.size(); ++a) {
        for (std::size_t b = a + 1; b < fixed_points.size(); ++b) {
            double d = l1_dist(fixed_points[a], fixed_points[b]);
            if (d > 10.0 * opt.tol) {
                std::ostringstream os;
                os << "eigen starts disagree by " << d << " (> 10*tol); uniqueness violated "
                   << "numerically";
                throw NotConvergedError(os.str(), d);
            }
        }
    }

    // Pick the start with the smallest residual and renormalize exactly.
    double best_residual = std::numeric_limits<double>::infinity();
    Vec best;
    double best_lambda = 0.0;
    for (const auto& u : fixed_points) {
        MEvaluation ev = eval_growth(m, u, opt.growth);
        double lambda = l1_norm(ev.value);
        double residual = 0.0;
        for (std::size_t i = 0; i < p; ++i) residual += std::abs(ev.value[i] - lambda * u[i]);
        if (residual < best_residual) {
            best_residual = residual;
            best = u;
            best_lambda = lambda;
        }
    }
    double s = l1_norm(best);
    best = scaled(best, 1.0 / s);

    for (std::size_t i = 0; i < p; ++i) {
        if (!(best[i] > 0.0)) {
            throw NotPrimitiveError("eigen direction has a vanishing component", 0);
        }
    }
    double residual_bound = 10.0 * opt.tol * std::max(1.0, best_lambda);
    if (best_residual > residual_bound) {
        throw NotConvergedError("eigen residual exceeds tolerance", best_residual);
    }

    result.lambda_star = best_lambda;
    result.z_star = std::move(best);
    result.residual = best_residual;
    result.iterations = worst_iterations;
    return result;
}

Criticality classify(const EigenResult& r, double critical_band) {
    if (r.lambda_star < 1.0 - critical_band) return Criticality::Subcritical;
    if (r.lambda_star <= 1.0 + critical_band) return Criticality::Critical;
    return Criticality::Supercritical;
}

std::pair<std::optional<EigenResult>, Criticality> classify_model(const ValidatedModel& m,
                                                                  const EigenOptions& opt,
                                                                  std::uint64_t seed) {
    try {
        EigenResult r = solve_eigen(m, opt, seed);
        return {r, classify(r, opt.critical_band)};
    } catch (const InfiniteOperatorError&) {
        return {std::nullopt, Criticality::SurvivalFromLargeStates};
    }
}

double growth_rate_via_norms(const ValidatedModel& m, const Vec& z, int k_max, double tol,
                             const GrowthEvalOptions& opt) {
    if (l1_norm(z) <= 0.0) throw DimensionError("growth rate needs a nonzero start");
    Vec u = scaled(z, 1.0 / l1_norm(z));
    double prev_ratio = -1.0;
    for (int k = 0; k <= k_max; ++k) {
        MEvaluation ev = eval_growth(m, u, opt);
        if (ev.any_infinite()) {
            throw InfiniteOperatorError("growth operator diverges while estimating the rate");
        }
        if (!ev.converged) {
            throw NotConvergedError("growth operator evaluation did not converge", ev.gap);
        }
        double ratio = l1_norm(ev.value);  // |M^{k+1}(z)| / |M^k(z)| for normalized u
        if (ratio <= 0.0) throw NotPrimitiveError("norm ratio hit zero", k);
        if (prev_ratio >= 0.0 && std::abs(ratio - prev_ratio) <= tol * std::max(1.0, ratio)) {
            return ratio;
        }
        prev_ratio = ratio;
        u = scaled(ev.value, 1.0 / ratio);
    }
    throw NotConvergedError("norm-ratio growth estimate did not stabilize within k_max");
}

}  // namespace bgw
