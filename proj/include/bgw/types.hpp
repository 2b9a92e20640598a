#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bgw/errors.hpp"

namespace bgw {

// Population vectors: counts of mating units (length p) or individuals
// (length q). Arithmetic that would wrap raises OverflowError instead.
using Counts = std::vector<std::uint64_t>;

// Nonnegative real vectors; entries may be +inf where an operator diverges.
using Vec = std::vector<double>;

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b);
std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b);

// |z| in the 1-norm (total mass), overflow-checked.
std::uint64_t total_count(const Counts& z);
bool is_zero(const Counts& z);

double l1_norm(const Vec& v);
double l1_dist(const Vec& a, const Vec& b);
Vec to_vec(const Counts& z);

// Componentwise floor of a real vector back to counts. Entries must be
// finite, nonnegative and below 2^63.
Counts floor_counts(const Vec& v);

// Dense row-major matrix of nonnegative reals. Sizes here are tiny (couple
// types x child types), so no linear algebra library is pulled in.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    static Matrix from_rows(const std::vector<std::vector<double>>& r);

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    double column_sum(std::size_t j) const;
};

// Row-vector times matrix: (z M)_j = sum_i z_i M_ij. Requires z.size() == M.rows.
Vec left_multiply(const Vec& z, const Matrix& m);

Vec scaled(const Vec& v, double a);
Vec add(const Vec& a, const Vec& b);

}  // namespace bgw
