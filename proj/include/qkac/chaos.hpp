#pragma once

#include <span>
#include <string>
#include <vector>

#include "qkac/states.hpp"

namespace qkac {

/// rho_N^(k): trace out sites k+1..N.
DensityOperator marginal(const DensityOperator& rho_n, std::size_t k);

/// tr|rho_N^(k) - rho^{(x)k}|
double chaos_distance(const DensityOperator& rho_n, const DensityOperator& rho, std::size_t k);

struct EmpiricalVariance {
    double value = 0.0;      // reported e_N(A), clamped at 0
    double raw = 0.0;        // real part before clamping
    double imag = 0.0;       // imaginary residue of tr(|X - c|^2 rho_N)
    bool clamped = false;
};

/// e_N(A) = tr(|X_N(A) - tr(A rho) 1|^2 rho_N), with |B|^2 = B^dagger B.
/// Small negative rounding (>= -1e-8) is clamped to 0 and flagged; anything
/// more negative throws BoundViolation.
EmpiricalVariance empirical_variance_detailed(const DensityOperator& rho_n, const DensityOperator& rho,
                                              const ComplexMatrix& a);
double empirical_variance(const DensityOperator& rho_n, const DensityOperator& rho, const ComplexMatrix& a);

/// C_{k,N}(A_1..A_k) = |tr(A_1 (x) ... (x) A_k (x) 1 rho_N) - prod_j tr(rho A_j)|,
/// evaluated on the k-site marginal.
double factorization_error(const DensityOperator& rho_n, const DensityOperator& rho,
                           std::span<const ComplexMatrix> observables);

/// prod_{m<k} (1 - m/N) = N! / (N^k (N-k)!)
double injective_fraction(std::size_t n, std::size_t k);

struct CorollaryBound {
    /// Right-hand side with the squared factors |tr(rho A_j)|^2 and ||A_j||^2.
    double printed = 0.0;
    /// Same with unsquared factors (what the Cauchy-Schwarz step yields).
    double unsquared = 0.0;
    /// 2 prod ||A_i|| (1 - N!/(N^k (N-k)!))
    double combinatorial = 0.0;
};

/// `e_adjoint[l]` must hold e_N(A_{l+1}^dagger).
CorollaryBound corollary_bound(const DensityOperator& rho, std::span<const ComplexMatrix> observables,
                               std::span<const double> e_adjoint, std::size_t n);

struct LabeledObservable {
    std::string label;
    ComplexMatrix op;
};

/// Generalized Pauli (Weyl) operators X^a Z^b, a, b in 0..d-1; all unitary.
/// `count` truncates the list (0 keeps all d^2).
std::vector<LabeledObservable> weyl_basis(std::size_t d, std::size_t count = 0);

struct TupleCheck {
    std::string label;
    double c_kn = 0.0;
    double bound = 0.0;
    double bound_unsquared = 0.0;
};

struct ChaosReport {
    std::size_t k = 0;
    std::size_t n = 0;
    double chaos_distance = 0.0;
    std::vector<std::pair<std::string, double>> e_n_values;
    std::vector<std::pair<std::string, double>> c_kn_values;
    std::vector<TupleCheck> tuples;
    /// Bound of the tuple with the least slack.
    double corollary_bound = 0.0;
    double corollary_bound_unsquared = 0.0;
    bool bound_satisfied = true;
    bool unsquared_bound_satisfied = true;
    bool any_clamped = false;
};

/// Aggregates the metrics above. Observable tuples are the k cyclic windows
/// (A_i, A_{i+1}, ..., A_{i+k-1}) of the observable list, one per start i.
ChaosReport chaos_report(const DensityOperator& rho_n, const DensityOperator& rho, std::size_t k,
                         std::span<const LabeledObservable> observables);

}  // namespace qkac
