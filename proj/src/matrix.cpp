#include "qkac/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qkac/error.hpp"

namespace qkac {

namespace {

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
    if (a.dim() != b.dim()) {
        throw DimensionMismatch(std::string(op) + ": dimensions " + std::to_string(a.dim()) +
                                " and " + std::to_string(b.dim()));
    }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

ComplexMatrix::ComplexMatrix(std::size_t dim, std::vector<Complex> entries)
    : dim_(dim), data_(std::move(entries)) {
    if (data_.size() != dim_ * dim_) {
        throw DimensionMismatch("ComplexMatrix: " + std::to_string(data_.size()) +
                                " entries for dimension " + std::to_string(dim_));
    }
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : dim_(rows.size()) {
    data_.reserve(dim_ * dim_);
    for (const auto& r : rows) {
        if (r.size() != dim_) throw DimensionMismatch("ComplexMatrix: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> diag) {
    ComplexMatrix m(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::initializer_list<Complex> diag) {
    return diagonal(std::span<const Complex>(diag.begin(), diag.size()));
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    require_same_dim(*this, other, "add");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    require_same_dim(*this, other, "subtract");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scalar) {
    for (auto& z : data_) z *= scalar;
    return *this;
}

ComplexMatrix& ComplexMatrix::add_identity(Complex scalar) {
    for (std::size_t i = 0; i < dim_; ++i) (*this)(i, i) += scalar;
    return *this;
}

bool ComplexMatrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs += rhs; }
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs -= rhs; }
ComplexMatrix operator*(ComplexMatrix lhs, Complex scalar) { return lhs *= scalar; }
ComplexMatrix operator*(Complex scalar, ComplexMatrix rhs) { return rhs *= scalar; }
ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs) { return matmul(lhs, rhs); }

ComplexMatrix matmul(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
    require_same_dim(lhs, rhs, "matmul");
    const std::size_t n = lhs.dim();
    ComplexMatrix out(n);
    // i-k-j order on interleaved real/imag parts; inner loop streams rows.
    const double* b = reinterpret_cast<const double*>(rhs.data().data());
    double* c = reinterpret_cast<double*>(out.data().data());
    for (std::size_t i = 0; i < n; ++i) {
        double* crow = c + 2 * i * n;
        for (std::size_t k = 0; k < n; ++k) {
            const Complex a = lhs(i, k);
            const double ar = a.real();
            const double ai = a.imag();
            if (ar == 0.0 && ai == 0.0) continue;
            const double* brow = b + 2 * k * n;
            for (std::size_t j = 0; j < n; ++j) {
                const double br = brow[2 * j];
                const double bi = brow[2 * j + 1];
                crow[2 * j] += ar * br - ai * bi;
                crow[2 * j + 1] += ar * bi + ai * br;
            }
        }
    }
    return out;
}

ComplexMatrix add(const ComplexMatrix& lhs, const ComplexMatrix& rhs) { return lhs + rhs; }

ComplexMatrix scale(const ComplexMatrix& m, Complex scalar) { return m * scalar; }

ComplexMatrix adjoint(const ComplexMatrix& m) {
    const std::size_t n = m.dim();
    ComplexMatrix out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(j, i) = std::conj(m(i, j));
    return out;
}

Complex trace(const ComplexMatrix& m) {
    Complex t = 0.0;
    for (std::size_t i = 0; i < m.dim(); ++i) t += m(i, i);
    return t;
}

Complex trace_of_product(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
    require_same_dim(lhs, rhs, "trace_of_product");
    const std::size_t n = lhs.dim();
    Complex t = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) t += lhs(i, k) * rhs(k, i);
    return t;
}

ComplexMatrix commutator(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
    return matmul(lhs, rhs) - matmul(rhs, lhs);
}

double max_abs(const ComplexMatrix& m) {
    double best = 0.0;
    for (const auto& z : m.data()) best = std::max(best, std::abs(z));
    return best;
}

double max_abs_diff(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
    require_same_dim(lhs, rhs, "max_abs_diff");
    double best = 0.0;
    for (std::size_t i = 0; i < lhs.data().size(); ++i)
        best = std::max(best, std::abs(lhs.data()[i] - rhs.data()[i]));
    return best;
}

double frobenius_norm(const ComplexMatrix& m) {
    double s = 0.0;
    for (const auto& z : m.data()) s += std::norm(z);
    return std::sqrt(s);
}

double hermiticity_violation(const ComplexMatrix& m) {
    double worst = 0.0;
    const std::size_t n = m.dim();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
    return worst;
}

}  // namespace qkac
