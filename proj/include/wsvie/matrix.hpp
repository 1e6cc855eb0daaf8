#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wsvie {

/// Small dense row-major matrix. Sizes here never exceed a few thousand, so
/// the naive triple loop is all we need.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    Matrix(std::initializer_list<std::initializer_list<double>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_)
                throw std::invalid_argument("Matrix: ragged initializer");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix I(n, n);
        for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
        return I;
    }

    static Matrix diagonal(std::span<const double> v) {
        Matrix D(v.size(), v.size());
        for (std::size_t i = 0; i < v.size(); ++i) D(i, i) = v[i];
        return D;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return rows_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const noexcept {
        return {data_.data() + i * cols_, cols_};
    }

    Matrix transpose() const {
        Matrix T(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) T(j, i) = (*this)(i, j);
        return T;
    }

    std::vector<double> diagonal_values() const {
        const std::size_t n = rows_ < cols_ ? rows_ : cols_;
        std::vector<double> d(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = (*this)(i, i);
        return d;
    }

    Matrix& operator*=(double s) noexcept {
        for (auto& v : data_) v *= s;
        return *this;
    }

    friend Matrix operator*(Matrix A, double s) noexcept { return A *= s; }
    friend Matrix operator*(double s, Matrix A) noexcept { return A *= s; }

    friend Matrix operator*(const Matrix& A, const Matrix& B) {
        if (A.cols_ != B.rows_)
            throw std::invalid_argument("Matrix product: inner dimensions " +
                                        std::to_string(A.cols_) + " and " +
                                        std::to_string(B.rows_) + " differ");
        Matrix C(A.rows_, B.cols_);
        for (std::size_t i = 0; i < A.rows_; ++i)
            for (std::size_t k = 0; k < A.cols_; ++k) {
                const double a = A(i, k);
                if (a == 0.0) continue;
                for (std::size_t j = 0; j < B.cols_; ++j) C(i, j) += a * B(k, j);
            }
        return C;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Densify anything exposing size() and operator()(i, j).
template <typename M>
Matrix to_dense(const M& src) {
    const std::size_t n = src.size();
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = src(i, j);
    return out;
}

}  // namespace wsvie
