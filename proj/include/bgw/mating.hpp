#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bgw/types.hpp"

namespace bgw {

enum class MatingKind {
    Identity,
    PerfectFidelity,
    Polygamous,
    PromiscuousSingle,
    CompletelyPromiscuous,
    MinOfLinear,
    CappedIdentity,
    Custom,
};

// Which real extension apply_real uses. Natural picks the closed form of a
// catalog entry (min / linear / indicator); Floor evaluates the integer map
// at the floored argument. The growth operator is extension-independent, so
// both must agree in the limit.
enum class Extension { Natural, Floor };

struct SuperadditivityReport {
    struct Counterexample {
        Counts x1, x2, lhs, rhs;
    };
    std::uint64_t samples = 0;
    std::uint64_t failures = 0;
    std::vector<Counterexample> counterexamples;  // first few kept for diagnostics
    bool ok() const { return failures == 0; }
};

// A superadditive couple-formation map xi: N^q -> N^p with xi(0) = 0.
// Catalog entries are verified by construction; custom callbacks start
// unverified and must pass check_superadditivity before the growth operator
// will evaluate them.
class MatingFunction {
public:
    static MatingFunction identity(std::size_t p);
    // Pairs type-i females with type-i males; q = 2p, females first.
    static MatingFunction perfect_fidelity(std::size_t p);
    // min{x, d*y} with d a positive integer; q = 2p.
    static MatingFunction polygamous(std::size_t p, std::uint64_t d);
    // Single-type promiscuous: xi(x, y) = x * min(1, y); p = 1, q = 2.
    static MatingFunction promiscuous_single();
    // Couples equal the female vector whenever every male type is present:
    // xi((x, y)) = x * prod_i 1{y_i > 0}; q = p + males.
    static MatingFunction completely_promiscuous(std::size_t p, std::size_t males);
    // Componentwise min of two linear maps: xi(w) = floor(min{wA, wB}).
    static MatingFunction min_of_linear(Matrix a, Matrix b);
    // xi_i(w) = min{w_i, floor(alpha |w|)}; p = q.
    static MatingFunction capped_identity(std::size_t p, double alpha);
    // User callback, integer map plus optional real extension. Unverified.
    static MatingFunction custom(std::size_t q, std::size_t p,
                                 std::function<Counts(const Counts&)> fn,
                                 std::function<Vec(const Vec&)> real_fn = nullptr,
                                 std::string label = "custom");

    MatingKind kind() const { return kind_; }
    std::size_t arity() const { return q_; }          // q
    std::size_t couple_types() const { return p_; }   // p
    bool verified() const { return verified_; }
    void mark_verified() { verified_ = true; }
    // False only for custom integer-only maps, whose "natural" evaluation
    // falls back to the floor extension.
    bool has_natural_form() const {
        return kind_ != MatingKind::Custom || static_cast<bool>(custom_real_);
    }

    Counts apply(const Counts& w) const;
    Vec apply_real(const Vec& w, Extension ext = Extension::Natural) const;

    // Draws `samples` i.i.d. pairs uniform on {0,...,cap}^q and tests
    // xi(x1+x2) >= xi(x1)+xi(x2) componentwise. Counterexamples are data,
    // not errors.
    SuperadditivityReport check_superadditivity(std::uint64_t samples,
                                                std::uint64_t magnitude_cap,
                                                std::uint64_t seed) const;

    std::string describe() const;

    // Default-constructed placeholder; replace via a factory before use.
    MatingFunction() = default;

private:
    MatingKind kind_ = MatingKind::Identity;
    std::size_t p_ = 0;
    std::size_t q_ = 0;
    bool verified_ = false;
    std::uint64_t d_ = 1;       // Polygamous
    double alpha_ = 0.0;        // CappedIdentity
    Matrix a_, b_;              // MinOfLinear
    std::function<Counts(const Counts&)> custom_;
    std::function<Vec(const Vec&)> custom_real_;
    std::string label_;
};

}  // namespace bgw
