#include "bgw/offspring.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace bgw {

namespace {

void require(bool cond, const char* what) {
    if (!cond) throw ConfigError(what);
}

std::uint64_t draw_poisson(double mean, SplitMix64& rng) {
    if (mean <= 0.0) return 0;
    std::poisson_distribution<std::int64_t> dist(mean);
    return static_cast<std::uint64_t>(dist(rng));
}

// Geometric on {0,1,...} with the given mean; success prob 1/(1+mean).
std::uint64_t draw_geometric(double mean, SplitMix64& rng) {
    if (mean <= 0.0) return 0;
    std::geometric_distribution<std::int64_t> dist(1.0 / (1.0 + mean));
    return static_cast<std::uint64_t>(dist(rng));
}

std::uint64_t draw_binomial(std::uint64_t t, double p, SplitMix64& rng) {
    if (t == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return t;
    if (t > 9'000'000'000'000'000'000ull) {
        throw OverflowError("binomial total exceeds 64-bit sampling range");
    }
    std::binomial_distribution<std::int64_t> dist(static_cast<std::int64_t>(t), p);
    return static_cast<std::uint64_t>(dist(rng));
}

// Sum of `count` geometrics = negative binomial (failures before the count-th
// success).
std::uint64_t draw_negative_binomial(std::uint64_t count, double mean, SplitMix64& rng) {
    if (mean <= 0.0 || count == 0) return 0;
    if (count > 9'000'000'000'000'000'000ull) {
        throw OverflowError("negative binomial order exceeds sampling range");
    }
    std::negative_binomial_distribution<std::int64_t> dist(static_cast<std::int64_t>(count),
                                                           1.0 / (1.0 + mean));
    return static_cast<std::uint64_t>(dist(rng));
}

}  // namespace

OffspringLaw OffspringLaw::poisson_product(Matrix rates) {
    require(rates.rows >= 1 && rates.cols >= 1, "poisson_product needs a non-empty rate matrix");
    for (double v : rates.data) require(v >= 0.0 && std::isfinite(v), "poisson rates must be nonnegative finite");
    OffspringLaw law;
    law.kind_ = OffspringKind::PoissonProduct;
    law.p_ = rates.rows;
    law.q_ = rates.cols;
    law.rates_ = std::move(rates);
    return law;
}

OffspringLaw OffspringLaw::geometric_product(Matrix means) {
    require(means.rows >= 1 && means.cols >= 1, "geometric_product needs a non-empty mean matrix");
    for (double v : means.data) require(v >= 0.0 && std::isfinite(v), "geometric means must be nonnegative finite");
    OffspringLaw law;
    law.kind_ = OffspringKind::GeometricProduct;
    law.p_ = means.rows;
    law.q_ = means.cols;
    law.rates_ = std::move(means);
    return law;
}

OffspringLaw OffspringLaw::deterministic(std::vector<Counts> rows) {
    require(!rows.empty() && !rows.front().empty(), "deterministic law needs non-empty rows");
    OffspringLaw law;
    law.kind_ = OffspringKind::Deterministic;
    law.p_ = rows.size();
    law.q_ = rows.front().size();
    for (const auto& r : rows) require(r.size() == law.q_, "deterministic rows must share length");
    law.det_rows_ = std::move(rows);
    return law;
}

OffspringLaw OffspringLaw::total_then_thin(Matrix totals, double alpha, TotalKind total_kind) {
    require(totals.rows >= 1 && totals.cols >= 1, "total_then_thin needs a non-empty total matrix");
    require(alpha >= 0.0 && alpha <= 1.0, "total_then_thin alpha must lie in [0,1]");
    for (double v : totals.data) {
        require(v >= 0.0 && std::isfinite(v), "total means must be nonnegative finite");
        if (total_kind == TotalKind::Deterministic) {
            require(v == std::floor(v), "deterministic totals must be integral");
        }
    }
    OffspringLaw law;
    law.kind_ = OffspringKind::TotalThenThin;
    law.p_ = totals.rows;
    law.q_ = 2 * totals.cols;
    law.alpha_ = alpha;
    law.total_kind_ = total_kind;
    law.rates_ = std::move(totals);
    return law;
}

OffspringLaw OffspringLaw::empirical(std::size_t q, std::vector<EmpiricalRow> rows) {
    require(q >= 1 && !rows.empty(), "empirical law needs q >= 1 and at least one row");
    OffspringLaw law;
    law.kind_ = OffspringKind::EmpiricalTable;
    law.p_ = rows.size();
    law.q_ = q;
    law.cum_.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        require(!row.support.empty() && row.support.size() == row.weights.size(),
                "empirical row needs matching support points and weights");
        double sum = 0.0;
        for (double w : row.weights) {
            require(w >= 0.0, "empirical weights must be nonnegative");
            sum += w;
        }
        require(std::abs(sum - 1.0) < 1e-9, "empirical weights must sum to 1");
        for (const auto& point : row.support) {
            require(point.size() == q, "empirical support point has wrong length");
        }
        double acc = 0.0;
        law.cum_[i].reserve(row.weights.size());
        for (double w : row.weights) {
            acc += w / sum;  // renormalize away rounding in the input
            law.cum_[i].push_back(acc);
        }
        law.cum_[i].back() = 1.0;
    }
    law.table_ = std::move(rows);
    return law;
}

OffspringLaw OffspringLaw::custom(std::size_t p, std::size_t q,
                                  std::function<Counts(std::size_t, SplitMix64&)> sampler,
                                  std::string label) {
    require(p >= 1 && q >= 1 && static_cast<bool>(sampler), "custom law needs dims and a sampler");
    OffspringLaw law;
    law.kind_ = OffspringKind::Custom;
    law.p_ = p;
    law.q_ = q;
    law.sampler_ = std::move(sampler);
    law.label_ = std::move(label);
    return law;
}

Counts OffspringLaw::sample_row(std::size_t i, SplitMix64& rng) const {
    if (i >= p_) throw DimensionError("offspring row index out of range");
    Counts out(q_, 0);
    switch (kind_) {
        case OffspringKind::PoissonProduct:
            for (std::size_t j = 0; j < q_; ++j) out[j] = draw_poisson(rates_(i, j), rng);
            return out;
        case OffspringKind::GeometricProduct:
            for (std::size_t j = 0; j < q_; ++j) out[j] = draw_geometric(rates_(i, j), rng);
            return out;
        case OffspringKind::Deterministic:
            return det_rows_[i];
        case OffspringKind::TotalThenThin: {
            std::size_t cols = q_ / 2;
            for (std::size_t j = 0; j < cols; ++j) {
                std::uint64_t u = total_kind_ == TotalKind::Poisson
                                      ? draw_poisson(rates_(i, j), rng)
                                      : static_cast<std::uint64_t>(rates_(i, j));
                std::uint64_t females = draw_binomial(u, alpha_, rng);
                out[j] = females;
                out[cols + j] = u - females;
            }
            return out;
        }
        case OffspringKind::EmpiricalTable: {
            double u = uniform01(rng);
            const auto& cum = cum_[i];
            std::size_t k = 0;
            while (k + 1 < cum.size() && u >= cum[k]) ++k;
            return table_[i].support[k];
        }
        case OffspringKind::Custom: {
            Counts row = sampler_(i, rng);
            if (row.size() != q_) throw DimensionError("custom sampler returned wrong length");
            return row;
        }
    }
    throw Error("internal", "unreachable offspring kind");
}

Counts OffspringLaw::sample_sum(std::size_t i, std::uint64_t count, SplitMix64& rng,
                                const SamplingPolicy& policy) const {
    if (i >= p_) throw DimensionError("offspring row index out of range");
    Counts out(q_, 0);
    if (count == 0) return out;

    // Deterministic rows multiply exactly at any count.
    if (kind_ == OffspringKind::Deterministic) {
        for (std::size_t j = 0; j < q_; ++j) out[j] = checked_mul(count, det_rows_[i][j]);
        return out;
    }

    if (count <= policy.per_couple_threshold) {
        for (std::uint64_t k = 0; k < count; ++k) {
            Counts row = sample_row(i, rng);
            for (std::size_t j = 0; j < q_; ++j) out[j] = checked_add(out[j], row[j]);
        }
        return out;
    }

    switch (kind_) {
        case OffspringKind::PoissonProduct:
            // Sum of count independent Poissons is Poisson with summed rate.
            for (std::size_t j = 0; j < q_; ++j) {
                out[j] = draw_poisson(static_cast<double>(count) * rates_(i, j), rng);
            }
            return out;
        case OffspringKind::GeometricProduct:
            for (std::size_t j = 0; j < q_; ++j) {
                out[j] = draw_negative_binomial(count, rates_(i, j), rng);
            }
            return out;
        case OffspringKind::TotalThenThin: {
            std::size_t cols = q_ / 2;
            for (std::size_t j = 0; j < cols; ++j) {
                if (total_kind_ == TotalKind::Poisson) {
                    // Thinned Poisson superposition: independent female/male
                    // Poisson totals.
                    double lambda = static_cast<double>(count) * rates_(i, j);
                    out[j] = draw_poisson(lambda * alpha_, rng);
                    out[cols + j] = draw_poisson(lambda * (1.0 - alpha_), rng);
                } else {
                    std::uint64_t tot =
                        checked_mul(count, static_cast<std::uint64_t>(rates_(i, j)));
                    std::uint64_t females = draw_binomial(tot, alpha_, rng);
                    out[j] = females;
                    out[cols + j] = tot - females;
                }
            }
            return out;
        }
        case OffspringKind::EmpiricalTable: {
            // Multinomial atom counts via sequential conditional binomials.
            const auto& row = table_[i];
            std::uint64_t remaining = count;
            double remaining_weight = 1.0;
            for (std::size_t k = 0; k < row.support.size(); ++k) {
                std::uint64_t atoms;
                if (k + 1 == row.support.size()) {
                    atoms = remaining;
                } else {
                    double w = cum_[i][k] - (k == 0 ? 0.0 : cum_[i][k - 1]);
                    double p = remaining_weight > 0.0 ? std::clamp(w / remaining_weight, 0.0, 1.0) : 0.0;
                    atoms = draw_binomial(remaining, p, rng);
                    remaining -= atoms;
                    remaining_weight -= w;
                }
                if (atoms == 0) continue;
                for (std::size_t j = 0; j < q_; ++j) {
                    out[j] = checked_add(out[j], checked_mul(atoms, row.support[k][j]));
                }
            }
            return out;
        }
        case OffspringKind::Custom: {
            if (!policy.allow_normal_approx) {
                throw SamplingError(
                    "custom offspring law cannot be summed exactly above the per-couple "
                    "threshold; raise the threshold or opt into the normal approximation");
            }
            // Componentwise normal approximation calibrated from a pilot
            // batch; cross-component dependence is not reproduced.
            constexpr std::uint64_t kPilot = 4096;
            std::vector<double> mean(q_, 0.0), m2(q_, 0.0);
            for (std::uint64_t k = 0; k < kPilot; ++k) {
                Counts row = sample_row(i, rng);
                for (std::size_t j = 0; j < q_; ++j) {
                    double x = static_cast<double>(row[j]);
                    double delta = x - mean[j];
                    mean[j] += delta / static_cast<double>(k + 1);
                    m2[j] += delta * (x - mean[j]);
                }
            }
            std::normal_distribution<double> normal(0.0, 1.0);
            for (std::size_t j = 0; j < q_; ++j) {
                double var = m2[j] / static_cast<double>(kPilot - 1);
                double v = static_cast<double>(count) * mean[j] +
                           std::sqrt(static_cast<double>(count) * var) * normal(rng);
                if (v < 0.0) v = 0.0;
                if (v >= 9.2e18) throw OverflowError("approximated offspring sum overflows counts");
                out[j] = static_cast<std::uint64_t>(std::llround(v));
            }
            return out;
        }
        default:
            throw Error("internal", "unreachable offspring kind");
    }
}

Matrix OffspringLaw::closed_form_mean() const {
    switch (kind_) {
        case OffspringKind::PoissonProduct:
        case OffspringKind::GeometricProduct:
            return rates_;
        case OffspringKind::Deterministic: {
            Matrix m(p_, q_);
            for (std::size_t i = 0; i < p_; ++i) {
                for (std::size_t j = 0; j < q_; ++j) {
                    m(i, j) = static_cast<double>(det_rows_[i][j]);
                }
            }
            return m;
        }
        case OffspringKind::TotalThenThin: {
            std::size_t cols = q_ / 2;
            Matrix m(p_, q_);
            for (std::size_t i = 0; i < p_; ++i) {
                for (std::size_t j = 0; j < cols; ++j) {
                    m(i, j) = alpha_ * rates_(i, j);
                    m(i, cols + j) = (1.0 - alpha_) * rates_(i, j);
                }
            }
            return m;
        }
        case OffspringKind::EmpiricalTable: {
            Matrix m(p_, q_);
            for (std::size_t i = 0; i < p_; ++i) {
                const auto& row = table_[i];
                for (std::size_t k = 0; k < row.support.size(); ++k) {
                    double w = cum_[i][k] - (k == 0 ? 0.0 : cum_[i][k - 1]);
                    for (std::size_t j = 0; j < q_; ++j) {
                        m(i, j) += w * static_cast<double>(row.support[k][j]);
                    }
                }
            }
            return m;
        }
        case OffspringKind::Custom:
            throw NonIntegrableError("custom laws have no closed-form mean");
    }
    throw Error("internal", "unreachable offspring kind");
}

std::string OffspringLaw::describe() const {
    std::ostringstream os;
    auto dump_matrix = [&os](const Matrix& m) {
        os << "[";
        for (double v : m.data) os << v << ",";
        os << "]";
    };
    switch (kind_) {
        case OffspringKind::PoissonProduct:
            os << "poisson_product(rates=";
            dump_matrix(rates_);
            os << ")";
            break;
        case OffspringKind::GeometricProduct:
            os << "geometric_product(means=";
            dump_matrix(rates_);
            os << ")";
            break;
        case OffspringKind::Deterministic:
            os << "deterministic(rows=[";
            for (const auto& r : det_rows_) {
                for (auto v : r) os << v << ",";
                os << ";";
            }
            os << "])";
            break;
        case OffspringKind::TotalThenThin:
            os << "total_then_thin(totals=";
            dump_matrix(rates_);
            os << ",alpha=" << alpha_
               << ",kind=" << (total_kind_ == TotalKind::Poisson ? "poisson" : "deterministic")
               << ")";
            break;
        case OffspringKind::EmpiricalTable:
            os << "empirical(rows=[";
            for (std::size_t i = 0; i < table_.size(); ++i) {
                for (std::size_t k = 0; k < table_[i].support.size(); ++k) {
                    os << "{";
                    for (auto v : table_[i].support[k]) os << v << ",";
                    os << "}w=" << table_[i].weights[k] << ",";
                }
                os << ";";
            }
            os << "])";
            break;
        case OffspringKind::Custom:
            os << "custom(" << label_ << ")";
            break;
    }
    os << "[p=" << p_ << ",q=" << q_ << "]";
    return os.str();
}

MeanEstimate estimate_mean_matrix(const OffspringLaw& law, std::uint64_t budget, double cap,
                                  std::uint64_t seed) {
    MeanEstimate out;
    if (law.has_closed_form_mean()) {
        out.mean = law.closed_form_mean();
        out.se = Matrix(law.couple_types(), law.child_types(), 0.0);
        out.exact = true;
        return out;
    }

    if (budget < 2) throw ConfigError("mean estimation budget must be at least 2");
    std::size_t p = law.couple_types(), q = law.child_types();
    out.mean = Matrix(p, q);
    out.se = Matrix(p, q);
    out.exact = false;
    for (std::size_t i = 0; i < p; ++i) {
        SplitMix64 rng(derive_seed(seed, {0x6d656173ull, i}));
        std::vector<double> mean(q, 0.0), m2(q, 0.0);
        for (std::uint64_t k = 0; k < budget; ++k) {
            Counts row = law.sample_row(i, rng);
            for (std::size_t j = 0; j < q; ++j) {
                double x = static_cast<double>(row[j]);
                double delta = x - mean[j];
                mean[j] += delta / static_cast<double>(k + 1);
                m2[j] += delta * (x - mean[j]);
            }
        }
        for (std::size_t j = 0; j < q; ++j) {
            if (mean[j] > cap) {
                throw NonIntegrableError("offspring mean estimate exceeds the integrability cap");
            }
            out.mean(i, j) = mean[j];
            out.se(i, j) = std::sqrt(m2[j] / static_cast<double>(budget - 1) /
                                     static_cast<double>(budget));
        }
    }
    return out;
}

MeanEstimate mean_matrix(const OffspringLaw& law, std::uint64_t budget, double cap,
                         std::uint64_t seed) {
    MeanEstimate est = estimate_mean_matrix(law, budget, cap, seed);
    for (std::size_t j = 0; j < est.mean.cols; ++j) {
        if (!(est.mean.column_sum(j) > 0.0)) {
            throw ZeroColumnError("mean matrix column " + std::to_string(j) +
                                  " sums to zero: some child type is never produced");
        }
    }
    return est;
}

}  // namespace bgw
