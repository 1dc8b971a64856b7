#pragma once

#include <cstdint>
#include <vector>

#include "qkac/linalg.hpp"
#include "qkac/matrix.hpp"
#include "qkac/random.hpp"
#include "qkac/tensor.hpp"

namespace qkac {

struct DensityTolerances {
    double hermitian = 1e-10;
    double psd = 1e-10;
    double trace = 1e-10;

    static DensityTolerances relaxed(double tol) { return {tol, tol, tol}; }
};

/// Hermitian, positive semidefinite, unit-trace operator on H^{(x)N}.
class DensityOperator {
public:
    const ComplexMatrix& matrix() const noexcept { return matrix_; }
    const TensorShape& shape() const noexcept { return shape_; }
    std::size_t sites() const noexcept { return shape_.sites(); }
    std::size_t local_dim() const noexcept { return shape_.local_dim(); }
    std::size_t dim() const noexcept { return matrix_.dim(); }

    /// For results of maps that preserve positivity by construction (unitary
    /// conjugation, partial trace, tensor products and convex combinations of
    /// densities). Checks hermiticity and trace only; positivity is assumed.
    static DensityOperator from_trusted(ComplexMatrix m, const TensorShape& shape,
                                        const DensityTolerances& tol = {});

private:
    DensityOperator(ComplexMatrix m, TensorShape shape)
        : matrix_(std::move(m)), shape_(shape) {}
    friend DensityOperator validate(const ComplexMatrix&, const TensorShape&, const DensityTolerances&);

    ComplexMatrix matrix_;
    TensorShape shape_;
};

/// Full validation; throws NotHermitian, NotPSD or TraceNotOne. Never repairs.
DensityOperator validate(const ComplexMatrix& m, const TensorShape& shape,
                         const DensityTolerances& tol = {});

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const ComplexMatrix& m);

struct SymmetryCheck {
    bool symmetric = false;
    double max_violation = 0.0;
    explicit operator bool() const noexcept { return symmetric; }
};

/// Tests U_pi rho = rho U_pi entrywise. By default only the N-1 adjacent
/// transpositions are tried; they generate the symmetric group, so commuting
/// with them is equivalent to commuting with every U_pi. `full_group` checks
/// all N! permutations (N <= 5).
SymmetryCheck is_symmetric(const DensityOperator& rho, double tol = 1e-10, bool full_group = false);

inline constexpr std::size_t kMaxSymmetrizeSites = 6;

/// (1/N!) sum_sigma U_sigma rho U_sigma^dagger; throws PermutationBudgetExceeded for N > 6.
DensityOperator symmetrize(const DensityOperator& rho);

DensityOperator tensor_power(const DensityOperator& rho, std::size_t n,
                             std::size_t max_total_dim = kDefaultMaxTotalDim);
DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b);

struct MixtureComponent {
    double weight = 0.0;
    std::vector<DensityOperator> local_states;  // one single-site state per site
};

struct DiscreteMixtureSpec {
    std::vector<MixtureComponent> components;
};

/// sum_m w_m D(w_1^m) (x) ... (x) D(w_N^m). With `symmetric_weights` the result
/// is additionally symmetrized (N <= 6); otherwise the caller is responsible
/// for the weights being exchangeable.
DensityOperator mixture_of_products(const DiscreteMixtureSpec& spec, bool symmetric_weights);

/// sum_m w_m rho_m^{(x)N}: symmetric for every N.
DensityOperator mixture_of_powers(std::span<const double> weights,
                                  std::span<const DensityOperator> states, std::size_t n);

/// Ginibre density G G^dagger / tr(G G^dagger).
DensityOperator random_density(std::size_t d, Rng& rng);
DensityOperator random_density(std::size_t d, std::uint64_t seed);

/// (G + G^dagger)/2 rescaled to operator norm `norm_cap`.
ComplexMatrix random_hermitian(std::size_t d, Rng& rng, double norm_cap);
ComplexMatrix random_hermitian(std::size_t d, std::uint64_t seed, double norm_cap);

/// Ginibre matrix rescaled to operator norm `norm_cap` (not Hermitian).
ComplexMatrix random_observable(std::size_t d, Rng& rng, double norm_cap);

}  // namespace qkac
