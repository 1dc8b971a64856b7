#include "qkac/tensor.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "qkac/error.hpp"

namespace qkac {

namespace {

// Stride of 1-based site s; site 1 is the most significant digit.
std::size_t site_stride(const TensorShape& shape, int site) {
    std::size_t s = 1;
    for (std::size_t k = static_cast<std::size_t>(site); k < shape.sites(); ++k) s *= shape.local_dim();
    return s;
}

void check_site(int site, const TensorShape& shape) {
    if (site < 1 || static_cast<std::size_t>(site) > shape.sites()) {
        throw BadSiteIndex("site " + std::to_string(site) + " outside 1.." +
                           std::to_string(shape.sites()));
    }
}

void check_operator_dim(const ComplexMatrix& m, std::size_t expected, const char* what) {
    if (m.dim() != expected) {
        throw DimensionMismatch(std::string(what) + ": operator dimension " + std::to_string(m.dim()) +
                                ", expected " + std::to_string(expected));
    }
}

// Offsets of every multi-index over `sites` (0-based positions into strides).
std::vector<std::size_t> offsets_over(const std::vector<std::size_t>& strides, std::size_t d) {
    std::vector<std::size_t> out{0};
    for (std::size_t stride : strides) {
        std::vector<std::size_t> next;
        next.reserve(out.size() * d);
        for (std::size_t base : out)
            for (std::size_t a = 0; a < d; ++a) next.push_back(base + a * stride);
        out = std::move(next);
    }
    return out;
}

}  // namespace

TensorShape::TensorShape(std::size_t local_dim, std::size_t sites, std::size_t max_total_dim)
    : d_(local_dim), n_(sites), total_(1), budget_(max_total_dim) {
    if (d_ == 0 || n_ == 0) throw DimensionMismatch("TensorShape: d and N must be positive");
    for (std::size_t k = 0; k < n_; ++k) {
        total_ *= d_;
        if (total_ > budget_) {
            throw MemoryBudgetExceeded("TensorShape: d^N = " + std::to_string(d_) + "^" +
                                       std::to_string(n_) + " exceeds budget " +
                                       std::to_string(budget_));
        }
    }
}

Permutation::Permutation(std::vector<int> images) : map_(std::move(images)) {
    std::vector<bool> seen(map_.size(), false);
    for (int v : map_) {
        if (v < 1 || static_cast<std::size_t>(v) > map_.size() || seen[v - 1])
            throw BadSiteIndex("Permutation: not a bijection on 1..N");
        seen[v - 1] = true;
    }
}

Permutation Permutation::identity(std::size_t n) {
    std::vector<int> m(n);
    std::iota(m.begin(), m.end(), 1);
    return Permutation(std::move(m));
}

Permutation Permutation::transposition(std::size_t n, int i, int j) {
    auto m = identity(n).map_;
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > n || static_cast<std::size_t>(j) > n)
        throw BadSiteIndex("transposition: site outside 1..N");
    std::swap(m[i - 1], m[j - 1]);
    return Permutation(std::move(m));
}

Permutation Permutation::inverse() const {
    std::vector<int> inv(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) inv[map_[i] - 1] = static_cast<int>(i + 1);
    return Permutation(std::move(inv));
}

Permutation Permutation::compose(const Permutation& other) const {
    if (other.size() != size()) throw DimensionMismatch("Permutation::compose: size mismatch");
    std::vector<int> out(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) out[i] = map_[other.map_[i] - 1];
    return Permutation(std::move(out));
}

std::vector<Permutation> all_permutations(std::size_t n) {
    std::vector<int> m(n);
    std::iota(m.begin(), m.end(), 1);
    std::vector<Permutation> out;
    do {
        out.emplace_back(m);
    } while (std::next_permutation(m.begin(), m.end()));
    return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b, std::size_t max_total_dim) {
    const std::size_t na = a.dim();
    const std::size_t nb = b.dim();
    if (na * nb > max_total_dim) {
        throw MemoryBudgetExceeded("kron: dimension " + std::to_string(na * nb) + " exceeds budget " +
                                   std::to_string(max_total_dim));
    }
    ComplexMatrix out(na * nb);
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j) {
            const Complex aij = a(i, j);
            if (aij == Complex{}) continue;
            for (std::size_t k = 0; k < nb; ++k) {
                auto orow = out.row(i * nb + k);
                const auto brow = b.row(k);
                for (std::size_t l = 0; l < nb; ++l) orow[j * nb + l] = aij * brow[l];
            }
        }
    return out;
}

ComplexMatrix kron_all(std::span<const ComplexMatrix> factors, std::size_t max_total_dim) {
    if (factors.empty()) return ComplexMatrix::identity(1);
    ComplexMatrix out = factors.front();
    for (std::size_t k = 1; k < factors.size(); ++k) out = kron(out, factors[k], max_total_dim);
    return out;
}

ComplexMatrix tensor_power(const ComplexMatrix& a, std::size_t n, std::size_t max_total_dim) {
    ComplexMatrix out = ComplexMatrix::identity(1);
    for (std::size_t k = 0; k < n; ++k) out = kron(out, a, max_total_dim);
    return out;
}

namespace {

// f(b): the basis index that U_pi sends basis index b to.
std::vector<std::size_t> permutation_index_map(const Permutation& p, const TensorShape& shape) {
    if (p.size() != shape.sites())
        throw DimensionMismatch("permutation size does not match the number of sites");
    const std::size_t n = shape.sites();
    const std::size_t d = shape.local_dim();
    std::vector<std::size_t> target_stride(n);
    for (std::size_t j = 0; j < n; ++j) target_stride[j] = site_stride(shape, p(static_cast<int>(j + 1)));
    std::vector<std::size_t> f(shape.total_dim());
    for (std::size_t b = 0; b < f.size(); ++b) {
        std::size_t rest = b;
        std::size_t out = 0;
        for (std::size_t j = n; j-- > 0;) {
            out += (rest % d) * target_stride[j];
            rest /= d;
        }
        f[b] = out;
    }
    return f;
}

}  // namespace

ComplexMatrix permutation_unitary(const Permutation& p, const TensorShape& shape) {
    const auto f = permutation_index_map(p, shape);
    ComplexMatrix u(shape.total_dim());
    for (std::size_t b = 0; b < f.size(); ++b) u(f[b], b) = 1.0;
    return u;
}

ComplexMatrix conjugate_by_permutation(const ComplexMatrix& m, const Permutation& p,
                                       const TensorShape& shape) {
    check_operator_dim(m, shape.total_dim(), "conjugate_by_permutation");
    const auto f = permutation_index_map(p, shape);
    ComplexMatrix out(m.dim());
    for (std::size_t a = 0; a < f.size(); ++a) {
        const auto src = m.row(f[a]);
        auto dst = out.row(a);
        for (std::size_t b = 0; b < f.size(); ++b) dst[b] = src[f[b]];
    }
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const TensorShape& shape,
                            std::span<const int> traced_sites) {
    check_operator_dim(m, shape.total_dim(), "partial_trace");
    std::vector<bool> traced(shape.sites(), false);
    for (int s : traced_sites) {
        check_site(s, shape);
        if (traced[s - 1]) throw BadSiteIndex("partial_trace: site " + std::to_string(s) + " repeated");
        traced[s - 1] = true;
    }
    std::vector<std::size_t> kept_strides;
    std::vector<std::size_t> traced_strides;
    for (std::size_t s = 1; s <= shape.sites(); ++s) {
        (traced[s - 1] ? traced_strides : kept_strides).push_back(site_stride(shape, static_cast<int>(s)));
    }
    const auto kept = offsets_over(kept_strides, shape.local_dim());
    const auto summed = offsets_over(traced_strides, shape.local_dim());

    ComplexMatrix out(kept.size());
    for (std::size_t a = 0; a < kept.size(); ++a) {
        auto dst = out.row(a);
        for (std::size_t c : summed) {
            const auto src = m.row(kept[a] + c);
            for (std::size_t b = 0; b < kept.size(); ++b) dst[b] += src[kept[b] + c];
        }
    }
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const TensorShape& shape,
                            std::initializer_list<int> traced_sites) {
    return partial_trace(m, shape, std::span<const int>(traced_sites.begin(), traced_sites.size()));
}

ComplexMatrix embed_one_body(const ComplexMatrix& a, int site, const TensorShape& shape) {
    check_site(site, shape);
    check_operator_dim(a, shape.local_dim(), "embed_one_body");
    const std::size_t d = shape.local_dim();
    const std::size_t left = shape.total_dim() / (site_stride(shape, site) * d);
    const auto id_left = ComplexMatrix::identity(left);
    const auto id_right = ComplexMatrix::identity(site_stride(shape, site));
    return kron(kron(id_left, a, shape.max_total_dim()), id_right, shape.max_total_dim());
}

ComplexMatrix embed_two_body(const ComplexMatrix& v, int i, int j, const TensorShape& shape) {
    check_site(i, shape);
    check_site(j, shape);
    if (i == j) throw SameSite("embed_two_body: sites must differ (got " + std::to_string(i) + ")");
    const std::size_t d = shape.local_dim();
    check_operator_dim(v, d * d, "embed_two_body");

    std::vector<std::size_t> other_strides;
    for (std::size_t s = 1; s <= shape.sites(); ++s)
        if (static_cast<int>(s) != i && static_cast<int>(s) != j)
            other_strides.push_back(site_stride(shape, static_cast<int>(s)));
    const auto bases = offsets_over(other_strides, d);
    const std::size_t si = site_stride(shape, i);
    const std::size_t sj = site_stride(shape, j);

    ComplexMatrix out(shape.total_dim());
    for (std::size_t base : bases)
        for (std::size_t r = 0; r < d * d; ++r) {
            const std::size_t row = base + (r / d) * si + (r % d) * sj;
            for (std::size_t c = 0; c < d * d; ++c) {
                const std::size_t col = base + (c / d) * si + (c % d) * sj;
                out(row, col) = v(r, c);
            }
        }
    return out;
}

ComplexMatrix embed_two_body_by_permutation(const ComplexMatrix& v, const Permutation& pi,
                                            const TensorShape& shape) {
    if (shape.sites() < 2) throw BadSiteIndex("embed_two_body: need at least two sites");
    check_operator_dim(v, shape.local_dim() * shape.local_dim(), "embed_two_body");
    const auto v12 = kron(v, ComplexMatrix::identity(shape.total_dim() / v.dim()), shape.max_total_dim());
    // U_{pi^-1} V12 U_pi = U_pi^dagger V12 U_pi
    return conjugate_by_permutation(v12, pi, shape);
}

ComplexMatrix empirical_observable(const ComplexMatrix& a, const TensorShape& shape) {
    check_operator_dim(a, shape.local_dim(), "empirical_observable");
    ComplexMatrix out(shape.total_dim());
    for (std::size_t j = 1; j <= shape.sites(); ++j) out += embed_one_body(a, static_cast<int>(j), shape);
    out *= 1.0 / static_cast<double>(shape.sites());
    return out;
}

ComplexMatrix apply_one_body(const ComplexMatrix& a, int site, const TensorShape& shape,
                             const ComplexMatrix& m) {
    check_site(site, shape);
    check_operator_dim(a, shape.local_dim(), "apply_one_body");
    check_operator_dim(m, shape.total_dim(), "apply_one_body");
    const std::size_t d = shape.local_dim();
    const std::size_t s = site_stride(shape, site);
    const std::size_t n = m.dim();
    ComplexMatrix out(n);
    for (std::size_t x = 0; x < n; ++x) {
        const std::size_t digit = (x / s) % d;
        const std::size_t base = x - digit * s;
        auto dst = out.row(x);
        for (std::size_t k = 0; k < d; ++k) {
            const Complex coeff = a(digit, k);
            if (coeff == Complex{}) continue;
            const auto src = m.row(base + k * s);
            for (std::size_t y = 0; y < n; ++y) dst[y] += coeff * src[y];
        }
    }
    return out;
}

ComplexMatrix swap_operator(std::size_t local_dim) {
    const std::size_t d = local_dim;
    ComplexMatrix s(d * d);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) s(b * d + a, a * d + b) = 1.0;
    return s;
}

}  // namespace qkac
