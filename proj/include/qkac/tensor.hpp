#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qkac/matrix.hpp"

namespace qkac {

inline constexpr std::size_t kDefaultMaxTotalDim = 4096;

/// Shape of H^{(x)N}: local dimension d and number of sites N.
class TensorShape {
public:
    TensorShape(std::size_t local_dim, std::size_t sites,
                std::size_t max_total_dim = kDefaultMaxTotalDim);

    std::size_t local_dim() const noexcept { return d_; }
    std::size_t sites() const noexcept { return n_; }
    std::size_t total_dim() const noexcept { return total_; }
    std::size_t max_total_dim() const noexcept { return budget_; }

    /// Same local dimension with a different site count.
    TensorShape with_sites(std::size_t sites) const { return TensorShape(d_, sites, budget_); }

    friend bool operator==(const TensorShape& a, const TensorShape& b) noexcept {
        return a.d_ == b.d_ && a.n_ == b.n_;
    }

private:
    std::size_t d_;
    std::size_t n_;
    std::size_t total_;
    std::size_t budget_;
};

/// A permutation pi of {1, ..., N}. Values are 1-based in the public API.
class Permutation {
public:
    /// `images[i - 1] = pi(i)`; throws BadSiteIndex unless it is a bijection.
    explicit Permutation(std::vector<int> images);

    static Permutation identity(std::size_t n);
    /// Transposition exchanging sites i and j.
    static Permutation transposition(std::size_t n, int i, int j);

    std::size_t size() const noexcept { return map_.size(); }
    int operator()(int i) const { return map_.at(static_cast<std::size_t>(i - 1)); }
    const std::vector<int>& images() const noexcept { return map_; }

    Permutation inverse() const;
    /// (this o other)(i) = this(other(i))
    Permutation compose(const Permutation& other) const;

    friend bool operator==(const Permutation&, const Permutation&) = default;

private:
    std::vector<int> map_;
};

/// All N! permutations of {1..N}, in lexicographic order of their image lists.
std::vector<Permutation> all_permutations(std::size_t n);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                   std::size_t max_total_dim = kDefaultMaxTotalDim);
ComplexMatrix kron_all(std::span<const ComplexMatrix> factors,
                       std::size_t max_total_dim = kDefaultMaxTotalDim);
ComplexMatrix tensor_power(const ComplexMatrix& a, std::size_t n,
                           std::size_t max_total_dim = kDefaultMaxTotalDim);

/// U_pi (x_1 (x) ... (x) x_N) = x_{pi^-1(1)} (x) ... (x) x_{pi^-1(N)}
ComplexMatrix permutation_unitary(const Permutation& p, const TensorShape& shape);

/// U_pi^dagger M U_pi computed by index relabelling.
ComplexMatrix conjugate_by_permutation(const ComplexMatrix& m, const Permutation& p,
                                       const TensorShape& shape);

/// Traces out the 1-based `traced_sites`; the remaining sites keep their order.
ComplexMatrix partial_trace(const ComplexMatrix& m, const TensorShape& shape,
                            std::span<const int> traced_sites);
ComplexMatrix partial_trace(const ComplexMatrix& m, const TensorShape& shape,
                            std::initializer_list<int> traced_sites);

/// 1^{(x)(j-1)} (x) A (x) 1^{(x)(N-j)}
ComplexMatrix embed_one_body(const ComplexMatrix& a, int site, const TensorShape& shape);

/// V_ij: V acting with its first factor on site i and its second on site j.
ComplexMatrix embed_two_body(const ComplexMatrix& v, int i, int j, const TensorShape& shape);

/// U_{pi^-1} (V (x) 1^{(x)(N-2)}) U_pi; equals embed_two_body(v, pi^-1(1), pi^-1(2), shape).
ComplexMatrix embed_two_body_by_permutation(const ComplexMatrix& v, const Permutation& pi,
                                            const TensorShape& shape);

/// X_N(A) = (1/N) sum_j A_j
ComplexMatrix empirical_observable(const ComplexMatrix& a, const TensorShape& shape);

/// A_j M without forming A_j.
ComplexMatrix apply_one_body(const ComplexMatrix& a, int site, const TensorShape& shape,
                             const ComplexMatrix& m);

/// 2x2-site swap operator on H (x) H (used for V_21 = S V S).
ComplexMatrix swap_operator(std::size_t local_dim);

}  // namespace qkac
