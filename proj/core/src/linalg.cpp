#include "sympol/linalg.hpp"

#include <stdexcept>

namespace sympol {

QMatrix QMatrix::identity(std::size_t n) {
    QMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = Scalar(1);
    return m;
}

QMatrix QMatrix::transpose() const {
    QMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    return t;
}

QMatrix operator*(const QMatrix& a, const QMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("QMatrix: shape mismatch in product");
    QMatrix r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const Scalar& aik = a.at(i, k);
            if (aik.is_zero()) continue;
            for (std::size_t j = 0; j < b.cols_; ++j) {
                if (b.at(k, j).is_zero()) continue;
                r.at(i, j) += aik * b.at(k, j);
            }
        }
    return r;
}

QMatrix operator+(const QMatrix& a, const QMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
        throw std::invalid_argument("QMatrix: shape mismatch in sum");
    QMatrix r = a;
    for (std::size_t i = 0; i < r.data_.size(); ++i) r.data_[i] += b.data_[i];
    return r;
}

QMatrix operator-(const QMatrix& a, const QMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
        throw std::invalid_argument("QMatrix: shape mismatch in difference");
    QMatrix r = a;
    for (std::size_t i = 0; i < r.data_.size(); ++i) r.data_[i] -= b.data_[i];
    return r;
}

Echelon QMatrix::echelon() const {
    Echelon e;
    e.rref = *this;
    QMatrix& m = e.rref;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols_ && row < rows_; ++col) {
        std::size_t pivot = row;
        while (pivot < rows_ && m.at(pivot, col).is_zero()) ++pivot;
        if (pivot == rows_) continue;
        if (pivot != row)
            for (std::size_t j = 0; j < cols_; ++j) std::swap(m.at(pivot, j), m.at(row, j));
        Scalar inv = m.at(row, col).inverse();
        for (std::size_t j = col; j < cols_; ++j) m.at(row, j) *= inv;
        for (std::size_t i = 0; i < rows_; ++i) {
            if (i == row || m.at(i, col).is_zero()) continue;
            Scalar f = m.at(i, col);
            for (std::size_t j = col; j < cols_; ++j) m.at(i, j) -= f * m.at(row, j);
        }
        e.pivot_cols.push_back(col);
        ++row;
    }
    e.rank = row;
    return e;
}

std::size_t QMatrix::rank() const { return echelon().rank; }

std::vector<QVector> QMatrix::kernel_basis() const {
    Echelon e = echelon();
    std::vector<bool> is_pivot(cols_, false);
    for (std::size_t c : e.pivot_cols) is_pivot[c] = true;
    std::vector<QVector> basis;
    for (std::size_t free = 0; free < cols_; ++free) {
        if (is_pivot[free]) continue;
        QVector v(cols_, Scalar(0));
        v[free] = Scalar(1);
        for (std::size_t r = 0; r < e.pivot_cols.size(); ++r)
            v[e.pivot_cols[r]] = -e.rref.at(r, free);
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<QVector> QMatrix::solve(const QVector& rhs) const {
    if (rhs.size() != rows_) throw std::invalid_argument("QMatrix: rhs size mismatch");
    QMatrix aug(rows_, cols_ + 1);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) aug.at(i, j) = at(i, j);
        aug.at(i, cols_) = rhs[i];
    }
    Echelon e = aug.echelon();
    for (std::size_t c : e.pivot_cols)
        if (c == cols_) return std::nullopt;  // inconsistent
    QVector x(cols_, Scalar(0));
    for (std::size_t r = 0; r < e.pivot_cols.size(); ++r)
        x[e.pivot_cols[r]] = e.rref.at(r, cols_);
    return x;
}

std::optional<QMatrix> QMatrix::inverse() const {
    if (rows_ != cols_) return std::nullopt;
    QMatrix aug(rows_, 2 * cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) aug.at(i, j) = at(i, j);
        aug.at(i, cols_ + i) = Scalar(1);
    }
    Echelon e = aug.echelon();
    if (e.rank != rows_) return std::nullopt;
    for (std::size_t r = 0; r < e.pivot_cols.size(); ++r)
        if (e.pivot_cols[r] != r) return std::nullopt;
    QMatrix inv(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) inv.at(i, j) = e.rref.at(i, cols_ + j);
    return inv;
}

Scalar QMatrix::det() const {
    if (rows_ != cols_) throw std::invalid_argument("QMatrix: determinant of non-square matrix");
    QMatrix m = *this;
    Scalar d(1);
    for (std::size_t col = 0; col < cols_; ++col) {
        std::size_t pivot = col;
        while (pivot < rows_ && m.at(pivot, col).is_zero()) ++pivot;
        if (pivot == rows_) return Scalar(0);
        if (pivot != col) {
            for (std::size_t j = 0; j < cols_; ++j) std::swap(m.at(pivot, j), m.at(col, j));
            d = -d;
        }
        d *= m.at(col, col);
        Scalar inv = m.at(col, col).inverse();
        for (std::size_t i = col + 1; i < rows_; ++i) {
            if (m.at(i, col).is_zero()) continue;
            Scalar f = m.at(i, col) * inv;
            for (std::size_t j = col; j < cols_; ++j) m.at(i, j) -= f * m.at(col, j);
        }
    }
    return d;
}

QVector QMatrix::apply(const QVector& v) const {
    if (v.size() != cols_) throw std::invalid_argument("QMatrix: vector size mismatch");
    QVector r(rows_, Scalar(0));
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if (!at(i, j).is_zero() && !v[j].is_zero()) r[i] += at(i, j) * v[j];
    return r;
}

}  // namespace sympol
