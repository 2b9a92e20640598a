#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bgw/mating.hpp"
#include "bgw/offspring.hpp"
#include "bgw/types.hpp"

namespace bgw {

// Metadata only: all algorithms operate on the general (p, q) form. The split
// records which child types are females (first) and males (last).
struct BisexualSplit {
    std::size_t females = 0;
    std::size_t males = 0;
};

struct Model {
    std::size_t p = 0;  // couple types
    std::size_t q = 0;  // individual types
    MatingFunction mating;
    OffspringLaw offspring;
    std::optional<BisexualSplit> split;
};

struct ValidationIssue {
    std::string assumption;  // the model assumption the violation breaks
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
    std::vector<std::string> messages() const;
};

// Checks zero preservation (xi(0) = 0), dimension consistency, positive
// mean-matrix column sums, split consistency, and that the mating function is
// verified superadditive. Violations are data; nothing throws here.
ValidationReport validate_model(const Model& m, std::uint64_t mean_budget = 100'000,
                                std::uint64_t seed = 0x76616c6964ull);

// Immutable validated model with a cached mean matrix; safe to share across
// concurrent workers.
class ValidatedModel {
public:
    // Throws ValidationError listing every violation.
    static ValidatedModel create(Model m, std::uint64_t mean_budget = 100'000,
                                 std::uint64_t seed = 0x76616c6964ull);

    const Model& model() const { return *model_; }
    const Matrix& mean() const { return mean_->mean; }
    const MeanEstimate& mean_estimate() const { return *mean_; }
    std::size_t couple_types() const { return model_->p; }
    std::size_t child_types() const { return model_->q; }
    const std::string& fingerprint() const { return fingerprint_; }

private:
    ValidatedModel(std::shared_ptr<const Model> m, std::shared_ptr<const MeanEstimate> mean,
                   std::string fp)
        : model_(std::move(m)), mean_(std::move(mean)), fingerprint_(std::move(fp)) {}

    std::shared_ptr<const Model> model_;
    std::shared_ptr<const MeanEstimate> mean_;
    std::string fingerprint_;
};

// Stable content hash of the model description (FNV-1a over describe()).
std::string model_fingerprint(const Model& m);
std::string describe(const Model& m);

}  // namespace bgw
