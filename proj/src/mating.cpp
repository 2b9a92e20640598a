#include "bgw/mating.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bgw/rng.hpp"

namespace bgw {

namespace {

void require(bool cond, const char* what) {
    if (!cond) throw DimensionError(what);
}

// min{wA, wB} componentwise, in doubles. Counts fit doubles exactly below
// 2^53, which covers every desk-scale population this library simulates.
Vec min_of_linear_real(const Vec& w, const Matrix& a, const Matrix& b) {
    Vec va = left_multiply(w, a);
    Vec vb = left_multiply(w, b);
    for (std::size_t i = 0; i < va.size(); ++i) va[i] = std::min(va[i], vb[i]);
    return va;
}

Counts floor_to_counts(const Vec& v) {
    Counts out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] >= 0.0) || v[i] >= 9.2e18) {
            throw OverflowError("mating output exceeds 64-bit count range");
        }
        out[i] = static_cast<std::uint64_t>(std::floor(v[i]));
    }
    return out;
}

}  // namespace

MatingFunction MatingFunction::identity(std::size_t p) {
    require(p >= 1, "identity mating needs p >= 1");
    MatingFunction f;
    f.kind_ = MatingKind::Identity;
    f.p_ = p;
    f.q_ = p;
    f.verified_ = true;
    return f;
}

MatingFunction MatingFunction::perfect_fidelity(std::size_t p) {
    require(p >= 1, "perfect fidelity needs p >= 1");
    MatingFunction f;
    f.kind_ = MatingKind::PerfectFidelity;
    f.p_ = p;
    f.q_ = 2 * p;
    f.verified_ = true;
    return f;
}

MatingFunction MatingFunction::polygamous(std::size_t p, std::uint64_t d) {
    require(p >= 1, "polygamous mating needs p >= 1");
    require(d >= 1, "polygamous parameter d must be a positive integer");
    MatingFunction f;
    f.kind_ = MatingKind::Polygamous;
    f.p_ = p;
    f.q_ = 2 * p;
    f.d_ = d;
    f.verified_ = true;
    return f;
}

MatingFunction MatingFunction::promiscuous_single() {
    MatingFunction f;
    f.kind_ = MatingKind::PromiscuousSingle;
    f.p_ = 1;
    f.q_ = 2;
    f.verified_ = true;
    return f;
}

MatingFunction MatingFunction::completely_promiscuous(std::size_t p, std::size_t males) {
    require(p >= 1 && males >= 1, "completely promiscuous mating needs p >= 1 and males >= 1");
    MatingFunction f;
    f.kind_ = MatingKind::CompletelyPromiscuous;
    f.p_ = p;
    f.q_ = p + males;
    f.verified_ = true;
    return f;
}

MatingFunction MatingFunction::min_of_linear(Matrix a, Matrix b) {
    require(a.rows == b.rows && a.cols == b.cols, "min-of-linear matrices must share shape");
    require(a.rows >= 1 && a.cols >= 1, "min-of-linear matrices must be non-empty");
    for (double v : a.data) require(v >= 0.0 && std::isfinite(v), "min-of-linear entries must be nonnegative finite");
    for (double v : b.data) require(v >= 0.0 && std::isfinite(v), "min-of-linear entries must be nonnegative finite");
    MatingFunction f;
    f.kind_ = MatingKind::MinOfLinear;
    f.q_ = a.rows;
    f.p_ = a.cols;
    f.a_ = std::move(a);
    f.b_ = std::move(b);
    f.verified_ = true;
    return f;
}

MatingFunction MatingFunction::capped_identity(std::size_t p, double alpha) {
    require(p >= 1, "capped identity needs p >= 1");
    require(alpha > 0.0 && std::isfinite(alpha), "capped identity alpha must be positive");
    MatingFunction f;
    f.kind_ = MatingKind::CappedIdentity;
    f.p_ = p;
    f.q_ = p;
    f.alpha_ = alpha;
    f.verified_ = true;
    return f;
}

MatingFunction MatingFunction::custom(std::size_t q, std::size_t p,
                                      std::function<Counts(const Counts&)> fn,
                                      std::function<Vec(const Vec&)> real_fn,
                                      std::string label) {
    require(p >= 1 && q >= 1, "custom mating needs p >= 1 and q >= 1");
    require(static_cast<bool>(fn), "custom mating needs an integer map");
    MatingFunction f;
    f.kind_ = MatingKind::Custom;
    f.p_ = p;
    f.q_ = q;
    f.custom_ = std::move(fn);
    f.custom_real_ = std::move(real_fn);
    f.label_ = std::move(label);
    f.verified_ = false;  // must pass check_superadditivity before use in M
    return f;
}

Counts MatingFunction::apply(const Counts& w) const {
    if (w.size() != q_) throw DimensionError("mating input has wrong length");
    switch (kind_) {
        case MatingKind::Identity:
            return w;
        case MatingKind::PerfectFidelity: {
            Counts out(p_);
            for (std::size_t i = 0; i < p_; ++i) out[i] = std::min(w[i], w[p_ + i]);
            return out;
        }
        case MatingKind::Polygamous: {
            Counts out(p_);
            for (std::size_t i = 0; i < p_; ++i) out[i] = std::min(w[i], checked_mul(d_, w[p_ + i]));
            return out;
        }
        case MatingKind::PromiscuousSingle:
            return {w[1] >= 1 ? w[0] : 0};
        case MatingKind::CompletelyPromiscuous: {
            bool all_males_present = true;
            for (std::size_t j = p_; j < q_; ++j) all_males_present &= (w[j] >= 1);
            Counts out(p_, 0);
            if (all_males_present) {
                for (std::size_t i = 0; i < p_; ++i) out[i] = w[i];
            }
            return out;
        }
        case MatingKind::MinOfLinear:
            return floor_to_counts(min_of_linear_real(to_vec(w), a_, b_));
        case MatingKind::CappedIdentity: {
            double mass = static_cast<double>(total_count(w));
            Counts out(p_);
            for (std::size_t i = 0; i < p_; ++i) {
                double cap = std::floor(alpha_ * mass);
                double xi = std::min(static_cast<double>(w[i]), cap);
                out[i] = static_cast<std::uint64_t>(xi);
            }
            return out;
        }
        case MatingKind::Custom: {
            Counts out = custom_(w);
            if (out.size() != p_) throw DimensionError("custom mating returned wrong length");
            return out;
        }
    }
    throw Error("internal", "unreachable mating kind");
}

Vec MatingFunction::apply_real(const Vec& w, Extension ext) const {
    if (w.size() != q_) throw DimensionError("mating input has wrong length");
    for (double x : w) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw DimensionError("mating input must be finite and nonnegative");
        }
    }

    if (ext == Extension::Floor) {
        // The literal extension x -> xi(floor(x)): restricts to the integer
        // map exactly, for every kind.
        Vec floored(q_);
        for (std::size_t j = 0; j < q_; ++j) floored[j] = std::floor(w[j]);
        return to_vec(apply(floor_counts(floored)));
    }

    switch (kind_) {
        case MatingKind::Identity:
            return w;
        case MatingKind::PerfectFidelity: {
            Vec out(p_);
            for (std::size_t i = 0; i < p_; ++i) out[i] = std::min(w[i], w[p_ + i]);
            return out;
        }
        case MatingKind::Polygamous: {
            Vec out(p_);
            for (std::size_t i = 0; i < p_; ++i) {
                out[i] = std::min(w[i], static_cast<double>(d_) * w[p_ + i]);
            }
            return out;
        }
        case MatingKind::PromiscuousSingle:
            return {w[0] * std::min(1.0, w[1])};
        case MatingKind::CompletelyPromiscuous: {
            bool all_males_present = true;
            for (std::size_t j = p_; j < q_; ++j) all_males_present &= (w[j] > 0.0);
            Vec out(p_, 0.0);
            if (all_males_present) {
                for (std::size_t i = 0; i < p_; ++i) out[i] = w[i];
            }
            return out;
        }
        case MatingKind::MinOfLinear:
            return min_of_linear_real(w, a_, b_);
        case MatingKind::CappedIdentity: {
            double mass = l1_norm(w);
            Vec out(p_);
            for (std::size_t i = 0; i < p_; ++i) out[i] = std::min(w[i], alpha_ * mass);
            return out;
        }
        case MatingKind::Custom:
            if (custom_real_) {
                Vec out = custom_real_(w);
                if (out.size() != p_) throw DimensionError("custom mating returned wrong length");
                return out;
            }
            return apply_real(w, Extension::Floor);
    }
    throw Error("internal", "unreachable mating kind");
}

SuperadditivityReport MatingFunction::check_superadditivity(std::uint64_t samples,
                                                            std::uint64_t magnitude_cap,
                                                            std::uint64_t seed) const {
    SuperadditivityReport report;
    report.samples = samples;
    SplitMix64 rng(derive_seed(seed, {0x73757065ull, q_, p_}));

    Counts x1(q_), x2(q_), sum(q_);
    for (std::uint64_t s = 0; s < samples; ++s) {
        for (std::size_t j = 0; j < q_; ++j) {
            x1[j] = rng() % (magnitude_cap + 1);
            x2[j] = rng() % (magnitude_cap + 1);
            sum[j] = checked_add(x1[j], x2[j]);
        }
        Counts lhs = apply(sum);
        Counts r1 = apply(x1);
        Counts r2 = apply(x2);
        bool fail = false;
        for (std::size_t i = 0; i < p_; ++i) {
            if (lhs[i] < checked_add(r1[i], r2[i])) {
                fail = true;
                break;
            }
        }
        if (fail) {
            ++report.failures;
            if (report.counterexamples.size() < 8) {
                Counts rhs(p_);
                for (std::size_t i = 0; i < p_; ++i) rhs[i] = checked_add(r1[i], r2[i]);
                report.counterexamples.push_back({x1, x2, lhs, rhs});
            }
        }
    }
    return report;
}

std::string MatingFunction::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case MatingKind::Identity: os << "identity"; break;
        case MatingKind::PerfectFidelity: os << "perfect_fidelity"; break;
        case MatingKind::Polygamous: os << "polygamous(d=" << d_ << ")"; break;
        case MatingKind::PromiscuousSingle: os << "promiscuous_single"; break;
        case MatingKind::CompletelyPromiscuous:
            os << "completely_promiscuous(males=" << (q_ - p_) << ")";
            break;
        case MatingKind::MinOfLinear: {
            os << "min_of_linear(a=[";
            for (double v : a_.data) os << v << ",";
            os << "],b=[";
            for (double v : b_.data) os << v << ",";
            os << "])";
            break;
        }
        case MatingKind::CappedIdentity: os << "capped_identity(alpha=" << alpha_ << ")"; break;
        case MatingKind::Custom: os << "custom(" << label_ << ")"; break;
    }
    os << "[q=" << q_ << "->p=" << p_ << "]";
    return os.str();
}

}  // namespace bgw
