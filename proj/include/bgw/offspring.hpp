#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bgw/rng.hpp"
#include "bgw/types.hpp"

namespace bgw {

enum class OffspringKind {
    PoissonProduct,
    GeometricProduct,
    Deterministic,
    TotalThenThin,
    EmpiricalTable,
    Custom,
};

enum class TotalKind { Poisson, Deterministic };

struct EmpiricalRow {
    std::vector<Counts> support;  // points in N^q
    std::vector<double> weights;  // sum to 1
};

struct SamplingPolicy {
    // Per-couple draws are exact; above this count per type, laws with an
    // exact superposition switch to it and blackbox laws either fail or use
    // a normal approximation if explicitly allowed.
    std::uint64_t per_couple_threshold = 1'000'000;
    bool allow_normal_approx = false;
};

// Per couple-type offspring distributions of the row vector V_{i,.} in N^q.
// Rows are mutually independent across couple types; entries within a row may
// be dependent (TotalThenThin couples each child's sex to a shared total).
class OffspringLaw {
public:
    static OffspringLaw poisson_product(Matrix rates);
    static OffspringLaw geometric_product(Matrix means);  // support {0,1,...}
    static OffspringLaw deterministic(std::vector<Counts> rows);
    // Bisexual layout, q = 2 * totals.cols: child totals per (i,j) drawn from
    // `total_kind` with mean totals(i,j), each child independently female
    // with probability alpha. Columns j < cols are females, then males.
    static OffspringLaw total_then_thin(Matrix totals, double alpha, TotalKind total_kind);
    static OffspringLaw empirical(std::size_t q, std::vector<EmpiricalRow> rows);
    // Blackbox sampler; means are only available by Monte Carlo.
    static OffspringLaw custom(std::size_t p, std::size_t q,
                               std::function<Counts(std::size_t, SplitMix64&)> sampler,
                               std::string label = "custom");

    OffspringKind kind() const { return kind_; }
    std::size_t couple_types() const { return p_; }
    std::size_t child_types() const { return q_; }
    bool has_closed_form_mean() const { return kind_ != OffspringKind::Custom; }

    // One draw of V_{i,.}.
    Counts sample_row(std::size_t i, SplitMix64& rng) const;

    // Sum of `count` i.i.d. copies of V_{i,.}. Exact for every catalog law at
    // any count (per-couple draws below the threshold, exact superposition
    // above it). Custom laws above the threshold raise SamplingError unless
    // the policy opts into a normal approximation.
    Counts sample_sum(std::size_t i, std::uint64_t count, SplitMix64& rng,
                      const SamplingPolicy& policy = {}) const;

    Matrix closed_form_mean() const;  // throws for Custom

    std::string describe() const;

    // Default-constructed placeholder; replace via a factory before use.
    OffspringLaw() = default;

private:
    OffspringKind kind_ = OffspringKind::Deterministic;
    std::size_t p_ = 0;
    std::size_t q_ = 0;
    Matrix rates_;                       // Poisson rates / geometric means / totals
    double alpha_ = 0.0;                 // TotalThenThin
    TotalKind total_kind_ = TotalKind::Poisson;
    std::vector<Counts> det_rows_;       // Deterministic
    std::vector<EmpiricalRow> table_;    // EmpiricalTable
    std::vector<std::vector<double>> cum_;  // cumulative weights per row
    std::function<Counts(std::size_t, SplitMix64&)> sampler_;
    std::string label_;
};

struct MeanEstimate {
    Matrix mean;
    Matrix se;    // zero for closed-form laws
    bool exact = false;
};

// Exact means for parametric laws, Monte Carlo with standard errors for
// blackbox laws. Raises NonIntegrableError if an estimate exceeds `cap`.
MeanEstimate estimate_mean_matrix(const OffspringLaw& law, std::uint64_t budget,
                                  double cap = 1e12, std::uint64_t seed = 0x6d65616eull);

// estimate_mean_matrix plus the column-sum check: every child type must have
// a strictly positive expected production summed over couple types.
MeanEstimate mean_matrix(const OffspringLaw& law, std::uint64_t budget,
                         double cap = 1e12, std::uint64_t seed = 0x6d65616eull);

}  // namespace bgw
