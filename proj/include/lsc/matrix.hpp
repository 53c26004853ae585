#pragma once

#include "lsc/field.hpp"

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace lsc {

class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

class SingularSystem : public std::runtime_error {
public:
    SingularSystem() : std::runtime_error("singular linear system over F_q") {}
};

/**
 * Dense row-major matrix over a prime field.
 *
 * All elimination routines use the same deterministic pivot rule: scan the
 * current column top-down and take the first nonzero entry. Over a field a
 * nonzero pivot is always usable, so identical inputs give identical
 * echelon forms, solutions and inverses.
 */
class FieldMatrix {
public:
    FieldMatrix(std::size_t rows, std::size_t cols, PrimeField field)
        : rows_(rows), cols_(cols), field_(field), data_(rows * cols, 0) {}

    static FieldMatrix identity(std::size_t n, PrimeField field) {
        FieldMatrix m(n, n, field);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const PrimeField& field() const { return field_; }

    FieldElement& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    FieldElement at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const std::vector<FieldElement>& data() const { return data_; }

    bool operator==(const FieldMatrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
    }

    FieldMatrix transpose() const {
        FieldMatrix t(cols_, rows_, field_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) t.at(c, r) = at(r, c);
        return t;
    }

    /// Sub-matrix from row indices (0-based, kept in the given order).
    FieldMatrix select_rows(const std::vector<std::size_t>& idx) const {
        FieldMatrix m(idx.size(), cols_, field_);
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t c = 0; c < cols_; ++c) m.at(i, c) = at(idx[i], c);
        return m;
    }

    FieldMatrix select_cols(const std::vector<std::size_t>& idx) const {
        FieldMatrix m(rows_, idx.size(), field_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t j = 0; j < idx.size(); ++j) m.at(r, j) = at(r, idx[j]);
        return m;
    }

    std::vector<FieldElement> row(std::size_t r) const {
        return {data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_)};
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    PrimeField field_;
    std::vector<FieldElement> data_;
};

inline FieldMatrix mat_mul(const FieldMatrix& a, const FieldMatrix& b) {
    if (a.field() != b.field()) throw ShapeError("mat_mul: mismatched moduli");
    if (a.cols() != b.rows()) throw ShapeError("mat_mul: inner dimensions disagree");
    const PrimeField& f = a.field();
    const std::uint64_t q = f.modulus();
    FieldMatrix c(a.rows(), b.cols(), f);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            FieldElement aik = a.at(i, k);
            if (aik == 0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) {
                // aik * b < 2^64 and the running sum is reduced every step.
                c.at(i, j) = (c.at(i, j) + aik * b.at(k, j)) % q;
            }
        }
    }
    return c;
}

inline std::vector<FieldElement> mat_vec(const FieldMatrix& a, const std::vector<FieldElement>& x) {
    if (a.cols() != x.size()) throw ShapeError("mat_vec: dimension mismatch");
    const std::uint64_t q = a.field().modulus();
    std::vector<FieldElement> y(a.rows(), 0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        std::uint64_t acc = 0;
        for (std::size_t j = 0; j < a.cols(); ++j) acc = (acc + a.at(i, j) * x[j]) % q;
        y[i] = acc;
    }
    return y;
}

/// Dot product of two equal-length coefficient vectors over the field.
inline FieldElement dot(const PrimeField& f, const std::vector<FieldElement>& a,
                        const std::vector<FieldElement>& b) {
    if (a.size() != b.size()) throw ShapeError("dot: length mismatch");
    const std::uint64_t q = f.modulus();
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc = (acc + a[i] * b[i]) % q;
    return acc;
}

namespace detail {

// Forward elimination into row echelon form; returns the rank. Row swaps
// only, first-nonzero pivot per column.
inline std::size_t echelonize(FieldMatrix& m) {
    const PrimeField& f = m.field();
    std::size_t pivot_row = 0;
    for (std::size_t col = 0; col < m.cols() && pivot_row < m.rows(); ++col) {
        std::size_t sel = pivot_row;
        while (sel < m.rows() && m.at(sel, col) == 0) ++sel;
        if (sel == m.rows()) continue;
        if (sel != pivot_row)
            for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m.at(sel, c), m.at(pivot_row, c));
        FieldElement pinv = f.inv(m.at(pivot_row, col));
        for (std::size_t r = pivot_row + 1; r < m.rows(); ++r) {
            FieldElement factor = f.mul(m.at(r, col), pinv);
            if (factor == 0) continue;
            for (std::size_t c = col; c < m.cols(); ++c)
                m.at(r, c) = f.sub(m.at(r, c), f.mul(factor, m.at(pivot_row, c)));
        }
        ++pivot_row;
    }
    return pivot_row;
}

} // namespace detail

inline std::size_t rank(const FieldMatrix& a) {
    FieldMatrix work = a;
    return detail::echelonize(work);
}

/// Gauss-Jordan solve of the square system A b = c. Throws SingularSystem
/// when A is not invertible.
inline std::vector<FieldElement> solve_linear(const FieldMatrix& a,
                                              const std::vector<FieldElement>& c) {
    if (a.rows() != a.cols()) throw ShapeError("solve_linear: matrix not square");
    if (c.size() != a.rows()) throw ShapeError("solve_linear: rhs length mismatch");
    const PrimeField& f = a.field();
    const std::size_t n = a.rows();
    FieldMatrix aug(n, n + 1, f);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t cIdx = 0; cIdx < n; ++cIdx) aug.at(r, cIdx) = a.at(r, cIdx);
        aug.at(r, n) = c[r];
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t sel = col;
        while (sel < n && aug.at(sel, col) == 0) ++sel;
        if (sel == n) throw SingularSystem();
        if (sel != col)
            for (std::size_t cc = col; cc <= n; ++cc) std::swap(aug.at(sel, cc), aug.at(col, cc));
        FieldElement pinv = f.inv(aug.at(col, col));
        for (std::size_t cc = col; cc <= n; ++cc) aug.at(col, cc) = f.mul(aug.at(col, cc), pinv);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            FieldElement factor = aug.at(r, col);
            if (factor == 0) continue;
            for (std::size_t cc = col; cc <= n; ++cc)
                aug.at(r, cc) = f.sub(aug.at(r, cc), f.mul(factor, aug.at(col, cc)));
        }
    }
    std::vector<FieldElement> b(n);
    for (std::size_t r = 0; r < n; ++r) b[r] = aug.at(r, n);
    return b;
}

inline FieldMatrix invert(const FieldMatrix& a) {
    if (a.rows() != a.cols()) throw ShapeError("invert: matrix not square");
    const PrimeField& f = a.field();
    const std::size_t n = a.rows();
    FieldMatrix aug(n, 2 * n, f);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) aug.at(r, c) = a.at(r, c);
        aug.at(r, n + r) = 1;
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t sel = col;
        while (sel < n && aug.at(sel, col) == 0) ++sel;
        if (sel == n) throw SingularSystem();
        if (sel != col)
            for (std::size_t cc = 0; cc < 2 * n; ++cc) std::swap(aug.at(sel, cc), aug.at(col, cc));
        FieldElement pinv = f.inv(aug.at(col, col));
        for (std::size_t cc = 0; cc < 2 * n; ++cc) aug.at(col, cc) = f.mul(aug.at(col, cc), pinv);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            FieldElement factor = aug.at(r, col);
            if (factor == 0) continue;
            for (std::size_t cc = 0; cc < 2 * n; ++cc)
                aug.at(r, cc) = f.sub(aug.at(r, cc), f.mul(factor, aug.at(col, cc)));
        }
    }
    FieldMatrix inv(n, n, f);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) inv.at(r, c) = aug.at(r, n + c);
    return inv;
}

inline bool is_invertible(const FieldMatrix& a) {
    return a.rows() == a.cols() && rank(a) == a.rows();
}

} // namespace lsc
