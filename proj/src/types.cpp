#include "bgw/types.hpp"

#include <cmath>
#include <limits>

namespace bgw {

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t out = 0;
    if (__builtin_add_overflow(a, b, &out)) {
        throw OverflowError("population count overflow in addition");
    }
    return out;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out)) {
        throw OverflowError("population count overflow in multiplication");
    }
    return out;
}

std::uint64_t total_count(const Counts& z) {
    std::uint64_t t = 0;
    for (std::uint64_t v : z) t = checked_add(t, v);
    return t;
}

bool is_zero(const Counts& z) {
    for (std::uint64_t v : z) {
        if (v != 0) return false;
    }
    return true;
}

double l1_norm(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

double l1_dist(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

Vec to_vec(const Counts& z) {
    Vec out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = static_cast<double>(z[i]);
    return out;
}

Counts floor_counts(const Vec& v) {
    Counts out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double x = v[i];
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw OverflowError("cannot floor non-finite or negative entry to a count");
        }
        if (x >= 9.2e18) {
            throw OverflowError("count exceeds 64-bit range");
        }
        out[i] = static_cast<std::uint64_t>(std::floor(x));
    }
    return out;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& r) {
    Matrix m;
    m.rows = r.size();
    m.cols = r.empty() ? 0 : r.front().size();
    m.data.reserve(m.rows * m.cols);
    for (const auto& row : r) {
        if (row.size() != m.cols) throw DimensionError("ragged matrix rows");
        m.data.insert(m.data.end(), row.begin(), row.end());
    }
    return m;
}

double Matrix::column_sum(std::size_t j) const {
    double s = 0.0;
    for (std::size_t i = 0; i < rows; ++i) s += (*this)(i, j);
    return s;
}

Vec left_multiply(const Vec& z, const Matrix& m) {
    if (z.size() != m.rows) throw DimensionError("row vector length does not match matrix rows");
    Vec out(m.cols, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        double zi = z[i];
        if (zi == 0.0) continue;
        for (std::size_t j = 0; j < m.cols; ++j) out[j] += zi * m(i, j);
    }
    return out;
}

Vec scaled(const Vec& v, double a) {
    Vec out(v);
    for (double& x : out) x *= a;
    return out;
}

Vec add(const Vec& a, const Vec& b) {
    Vec out(a);
    for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
    return out;
}

}  // namespace bgw
