#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace qkac {

using Complex = std::complex<double>;

/// Dense square complex matrix, row-major.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(std::size_t dim);
    ComplexMatrix(std::size_t dim, std::vector<Complex> entries);
    /// Row-wise literal; every row must have the same length as the number of rows.
    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

    static ComplexMatrix identity(std::size_t dim);
    static ComplexMatrix zero(std::size_t dim) { return ComplexMatrix(dim); }
    static ComplexMatrix diagonal(std::span<const Complex> diag);
    static ComplexMatrix diagonal(std::initializer_list<Complex> diag);

    std::size_t dim() const noexcept { return dim_; }
    bool empty() const noexcept { return dim_ == 0; }

    Complex& operator()(std::size_t row, std::size_t col) noexcept { return data_[row * dim_ + col]; }
    const Complex& operator()(std::size_t row, std::size_t col) const noexcept {
        return data_[row * dim_ + col];
    }

    std::span<Complex> row(std::size_t r) noexcept { return {data_.data() + r * dim_, dim_}; }
    std::span<const Complex> row(std::size_t r) const noexcept {
        return {data_.data() + r * dim_, dim_};
    }

    std::span<Complex> data() noexcept { return data_; }
    std::span<const Complex> data() const noexcept { return data_; }
    const std::vector<Complex>& entries() const noexcept { return data_; }

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(Complex scalar);

    /// Adds `scalar` times the identity.
    ComplexMatrix& add_identity(Complex scalar);

    bool all_finite() const noexcept;

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<Complex> data_;
};

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator*(ComplexMatrix lhs, Complex scalar);
ComplexMatrix operator*(Complex scalar, ComplexMatrix rhs);
ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs);

ComplexMatrix matmul(const ComplexMatrix& lhs, const ComplexMatrix& rhs);
ComplexMatrix add(const ComplexMatrix& lhs, const ComplexMatrix& rhs);
ComplexMatrix scale(const ComplexMatrix& m, Complex scalar);
ComplexMatrix adjoint(const ComplexMatrix& m);
Complex trace(const ComplexMatrix& m);

/// tr(A B) without forming the product.
Complex trace_of_product(const ComplexMatrix& lhs, const ComplexMatrix& rhs);

/// A B - B A
ComplexMatrix commutator(const ComplexMatrix& lhs, const ComplexMatrix& rhs);

/// max_ij |M_ij|
double max_abs(const ComplexMatrix& m);
/// max_ij |A_ij - B_ij|
double max_abs_diff(const ComplexMatrix& lhs, const ComplexMatrix& rhs);
double frobenius_norm(const ComplexMatrix& m);
/// max_ij |M_ij - conj(M_ji)|
double hermiticity_violation(const ComplexMatrix& m);

}  // namespace qkac
