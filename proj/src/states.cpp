#include "qkac/states.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qkac/error.hpp"

namespace qkac {

namespace {

void check_shape(const ComplexMatrix& m, const TensorShape& shape) {
    if (m.dim() != shape.total_dim()) {
        throw DimensionMismatch("density matrix dimension " + std::to_string(m.dim()) +
                                " does not match d^N = " + std::to_string(shape.total_dim()));
    }
}

void check_hermitian_and_trace(const ComplexMatrix& m, const DensityTolerances& tol) {
    const double herm = hermiticity_violation(m);
    if (herm > tol.hermitian) throw NotHermitian(herm);
    const Complex tr = trace(m);
    if (std::abs(tr - 1.0) > tol.trace) throw TraceNotOne(tr.real());
}

}  // namespace

DensityOperator DensityOperator::from_trusted(ComplexMatrix m, const TensorShape& shape,
                                              const DensityTolerances& tol) {
    check_shape(m, shape);
    check_hermitian_and_trace(m, tol);
    return DensityOperator(std::move(m), shape);
}

double min_eigenvalue(const ComplexMatrix& m) {
    return herm_eigen(m, LinalgOptions{.hermitian_tol = 1e-6}).eigenvalues.front();
}

DensityOperator validate(const ComplexMatrix& m, const TensorShape& shape, const DensityTolerances& tol) {
    check_shape(m, shape);
    const double herm = hermiticity_violation(m);
    if (herm > tol.hermitian) throw NotHermitian(herm);
    const double lmin = min_eigenvalue(m);
    if (lmin < -tol.psd) throw NotPSD(lmin);
    const Complex tr = trace(m);
    if (std::abs(tr - 1.0) > tol.trace) throw TraceNotOne(tr.real());
    return DensityOperator(m, shape);
}

SymmetryCheck is_symmetric(const DensityOperator& rho, double tol, bool full_group) {
    const auto& shape = rho.shape();
    const std::size_t n = shape.sites();
    SymmetryCheck out{true, 0.0};
    auto consider = [&](const Permutation& p) {
        // |U rho - rho U|_max = |U^dagger rho U - rho|_max for a permutation matrix U.
        const double v = max_abs_diff(conjugate_by_permutation(rho.matrix(), p, shape), rho.matrix());
        out.max_violation = std::max(out.max_violation, v);
    };
    if (full_group) {
        for (const auto& p : all_permutations(n)) consider(p);
    } else {
        for (std::size_t j = 1; j < n; ++j)
            consider(Permutation::transposition(n, static_cast<int>(j), static_cast<int>(j + 1)));
    }
    out.symmetric = out.max_violation <= tol;
    return out;
}

DensityOperator symmetrize(const DensityOperator& rho) {
    const auto& shape = rho.shape();
    if (shape.sites() > kMaxSymmetrizeSites) {
        throw PermutationBudgetExceeded("symmetrize: N = " + std::to_string(shape.sites()) +
                                        " exceeds exact limit " + std::to_string(kMaxSymmetrizeSites));
    }
    const auto perms = all_permutations(shape.sites());
    ComplexMatrix acc(rho.dim());
    for (const auto& p : perms) acc += conjugate_by_permutation(rho.matrix(), p, shape);
    acc *= 1.0 / static_cast<double>(perms.size());
    return DensityOperator::from_trusted(std::move(acc), shape);
}

DensityOperator tensor_power(const DensityOperator& rho, std::size_t n, std::size_t max_total_dim) {
    if (rho.sites() != 1) throw DimensionMismatch("tensor_power: expects a single-site state");
    TensorShape shape(rho.local_dim(), n, max_total_dim);
    return DensityOperator::from_trusted(tensor_power(rho.matrix(), n, max_total_dim), shape);
}

DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b) {
    if (a.local_dim() != b.local_dim()) throw DimensionMismatch("tensor_product: local dimensions differ");
    TensorShape shape(a.local_dim(), a.sites() + b.sites(), a.shape().max_total_dim());
    return DensityOperator::from_trusted(kron(a.matrix(), b.matrix(), shape.max_total_dim()), shape);
}

DensityOperator mixture_of_products(const DiscreteMixtureSpec& spec, bool symmetric_weights) {
    if (spec.components.empty()) throw WeightsInvalid("mixture_of_products: no components");
    const std::size_t n = spec.components.front().local_states.size();
    if (n == 0) throw WeightsInvalid("mixture_of_products: components have no sites");
    const std::size_t d = spec.components.front().local_states.front().local_dim();
    double total = 0.0;
    for (const auto& c : spec.components) {
        if (!(c.weight >= 0.0)) throw WeightsInvalid("mixture_of_products: negative weight");
        if (c.local_states.size() != n)
            throw WeightsInvalid("mixture_of_products: components have different site counts");
        for (const auto& s : c.local_states)
            if (s.sites() != 1 || s.local_dim() != d)
                throw DimensionMismatch("mixture_of_products: local states must be single-site, same d");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw WeightsInvalid("mixture_of_products: weights sum to " + std::to_string(total));

    TensorShape shape(d, n);
    ComplexMatrix acc(shape.total_dim());
    std::vector<ComplexMatrix> factors;
    for (const auto& c : spec.components) {
        if (c.weight == 0.0) continue;
        factors.clear();
        for (const auto& s : c.local_states) factors.push_back(s.matrix());
        acc += kron_all(factors) * Complex(c.weight);
    }
    auto rho = DensityOperator::from_trusted(std::move(acc), shape, DensityTolerances::relaxed(1e-10));
    return symmetric_weights ? symmetrize(rho) : rho;
}

DensityOperator mixture_of_powers(std::span<const double> weights, std::span<const DensityOperator> states,
                                  std::size_t n) {
    if (weights.size() != states.size() || weights.empty())
        throw WeightsInvalid("mixture_of_powers: need one weight per state");
    DiscreteMixtureSpec spec;
    for (std::size_t m = 0; m < weights.size(); ++m)
        spec.components.push_back({weights[m], std::vector<DensityOperator>(n, states[m])});
    return mixture_of_products(spec, false);
}

DensityOperator random_density(std::size_t d, Rng& rng) {
    const ComplexMatrix g = ginibre(d, rng);
    ComplexMatrix rho = matmul(g, adjoint(g));
    rho *= 1.0 / trace(rho).real();
    // exact hermitization of rounding in the product
    for (std::size_t i = 0; i < d; ++i) {
        rho(i, i) = rho(i, i).real();
        for (std::size_t j = i + 1; j < d; ++j) rho(j, i) = std::conj(rho(i, j));
    }
    return validate(rho, TensorShape(d, 1));
}

DensityOperator random_density(std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    return random_density(d, rng);
}

ComplexMatrix random_hermitian(std::size_t d, Rng& rng, double norm_cap) {
    const ComplexMatrix g = ginibre(d, rng);
    ComplexMatrix h = g + adjoint(g);
    h *= 0.5;
    for (std::size_t i = 0; i < d; ++i) h(i, i) = h(i, i).real();
    const double norm = operator_norm(h);
    if (norm > 0.0) h *= norm_cap / norm;
    return h;
}

ComplexMatrix random_hermitian(std::size_t d, std::uint64_t seed, double norm_cap) {
    Rng rng(seed);
    return random_hermitian(d, rng, norm_cap);
}

ComplexMatrix random_observable(std::size_t d, Rng& rng, double norm_cap) {
    ComplexMatrix g = ginibre(d, rng);
    const double norm = operator_norm(g);
    if (norm > 0.0) g *= norm_cap / norm;
    return g;
}

}  // namespace qkac
