#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "bgw/growth_operator.hpp"
#include "bgw/model.hpp"

namespace bgw {

enum class Criticality { Subcritical, Critical, Supercritical, SurvivalFromLargeStates };

const char* to_string(Criticality c);

struct EigenResult {
    double lambda_star = 0.0;
    Vec z_star;           // on the 1-norm simplex, strictly positive
    double residual = 0.0;  // |M(z*) - lambda* z*|_1
    int iterations = 0;     // worst case over starts
    int primitivity_n0 = 0;
};

struct EigenOptions {
    double tol = 1e-8;
    int max_iter = 10'000;
    int starts = 5;
    int finiteness_samples = 100;  // random simplex points probed for +inf
    double critical_band = 1e-6;
    PrimitivityOptions primitivity = {};
    GrowthEvalOptions growth = {};
};

// Normalized iteration u <- M(u)/|M(u)| from several random simplex starts.
// Finiteness of M over the simplex is certified first by sampling (basis
// vectors, midpoint, random points); a flagged +inf raises
// InfiniteOperatorError, which callers treat as a classification, not a
// crash. All starts must agree within 10*tol.
EigenResult solve_eigen(const ValidatedModel& m, const EigenOptions& opt = {},
                        std::uint64_t seed = 0x65696765ull);

Criticality classify(const EigenResult& r, double critical_band = 1e-6);

// Convenience wrapper mapping InfiniteOperatorError to
// SurvivalFromLargeStates; the EigenResult is absent in that case.
std::pair<std::optional<EigenResult>, Criticality> classify_model(
    const ValidatedModel& m, const EigenOptions& opt = {}, std::uint64_t seed = 0x65696765ull);

// Stabilized ratio |M^{k+1}(z)| / |M^k(z)|; agrees with lambda* within
// 10*tol. Throws NotConvergedError when k_max is reached.
double growth_rate_via_norms(const ValidatedModel& m, const Vec& z, int k_max = 10'000,
                             double tol = 1e-8, const GrowthEvalOptions& opt = {});

}  // namespace bgw
