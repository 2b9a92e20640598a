#include "bgw/model.hpp"

#include <sstream>

namespace bgw {

namespace {

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace

std::vector<std::string> ValidationReport::messages() const {
    std::vector<std::string> out;
    out.reserve(issues.size());
    for (const auto& issue : issues) out.push_back(issue.assumption + ": " + issue.detail);
    return out;
}

ValidationReport validate_model(const Model& m, std::uint64_t mean_budget, std::uint64_t seed) {
    ValidationReport report;
    auto flag = [&report](std::string assumption, std::string detail) {
        report.issues.push_back({std::move(assumption), std::move(detail)});
    };

    if (m.p < 1 || m.q < 1) {
        flag("dimensions", "p and q must both be at least 1");
        return report;
    }
    if (m.mating.couple_types() != m.p || m.mating.arity() != m.q) {
        flag("dimensions", "mating function maps N^" + std::to_string(m.mating.arity()) +
                               " -> N^" + std::to_string(m.mating.couple_types()) +
                               " but the model declares q=" + std::to_string(m.q) +
                               ", p=" + std::to_string(m.p));
    }
    if (m.offspring.couple_types() != m.p || m.offspring.child_types() != m.q) {
        flag("dimensions", "offspring law dimensions do not match the model");
    }
    if (m.split) {
        if (m.split->females < 1 || m.split->males < 1 || m.split->females + m.split->males != m.q) {
            flag("bisexual split", "female and male type counts must be >= 1 and sum to q");
        }
    }
    if (!report.ok()) return report;

    // Zero preservation: xi(0) = 0.
    Counts zero_w(m.q, 0);
    Counts at_zero = m.mating.apply(zero_w);
    if (!is_zero(at_zero)) {
        flag("zero preservation (xi(0)=0)", "mating function produces couples from an empty population");
    }

    if (!m.mating.verified()) {
        flag("superadditivity", "custom mating function has not passed check_superadditivity");
    }

    // Every child type must be produced by some couple type in expectation.
    try {
        MeanEstimate est = estimate_mean_matrix(m.offspring, mean_budget, 1e12, seed);
        for (std::size_t j = 0; j < est.mean.cols; ++j) {
            if (!(est.mean.column_sum(j) > 0.0)) {
                flag("column sum positive", "mean matrix column " + std::to_string(j) +
                                                " sums to zero");
            }
        }
    } catch (const NonIntegrableError& e) {
        flag("integrable offspring", e.what());
    }

    return report;
}

ValidatedModel ValidatedModel::create(Model m, std::uint64_t mean_budget, std::uint64_t seed) {
    ValidationReport report = validate_model(m, mean_budget, seed);
    if (!report.ok()) throw ValidationError(report.messages());
    auto mean = std::make_shared<MeanEstimate>(
        estimate_mean_matrix(m.offspring, mean_budget, 1e12, seed));
    std::string fp = model_fingerprint(m);
    return ValidatedModel(std::make_shared<const Model>(std::move(m)), std::move(mean),
                          std::move(fp));
}

std::string describe(const Model& m) {
    std::ostringstream os;
    os << "p=" << m.p << ";q=" << m.q << ";";
    if (m.split) os << "split=" << m.split->females << "," << m.split->males << ";";
    os << "mating=" << m.mating.describe() << ";offspring=" << m.offspring.describe();
    return os.str();
}

std::string model_fingerprint(const Model& m) {
    std::uint64_t h = fnv1a64(describe(m));
    char buf[17];
    static const char* hex = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = hex[h & 0xf];
        h >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf);
}

}  // namespace bgw
