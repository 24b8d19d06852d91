#ifndef SYMPOL_LINALG_HPP
#define SYMPOL_LINALG_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "sympol/scalar.hpp"

namespace sympol {

using QVector = std::vector<Scalar>;

class QMatrix;

/// Reduced row echelon form with its pivot columns.
struct Echelon;

/// Dense exact-rational matrix with deterministic elimination (pivot = first
/// nonzero entry scanning rows in order).  Desk-scale linear algebra; all
/// results are exact.
class QMatrix {
  public:
    QMatrix() : rows_(0), cols_(0) {}
    QMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}

    static QMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Scalar& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Scalar& at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    QMatrix transpose() const;
    friend QMatrix operator*(const QMatrix& a, const QMatrix& b);
    friend QMatrix operator+(const QMatrix& a, const QMatrix& b);
    friend QMatrix operator-(const QMatrix& a, const QMatrix& b);
    friend bool operator==(const QMatrix& a, const QMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    Echelon echelon() const;

    std::size_t rank() const;

    /// Basis of the right kernel (solutions of Ax = 0), one vector per free
    /// column in the deterministic echelon form.
    std::vector<QVector> kernel_basis() const;

    /// A particular solution of Ax = b with all free variables set to zero
    /// (the minimal-support choice under the column order), or nullopt if
    /// the system is inconsistent.
    std::optional<QVector> solve(const QVector& rhs) const;

    std::optional<QMatrix> inverse() const;
    Scalar det() const;

    QVector apply(const QVector& v) const;

  private:
    std::size_t rows_, cols_;
    std::vector<Scalar> data_;
};

struct Echelon {
    QMatrix rref;
    std::vector<std::size_t> pivot_cols;
    std::size_t rank = 0;
};

}  // namespace sympol

#endif
