#pragma once

#include <string>
#include <vector>

#include "qkac/chaos.hpp"
#include "qkac/linalg.hpp"
#include "qkac/states.hpp"

namespace qkac {

/// One-body term A on H and pair interaction V on H (x) H, both self-adjoint.
class MeanFieldSystem {
public:
    MeanFieldSystem(ComplexMatrix a, ComplexMatrix v);

    std::size_t local_dim() const noexcept { return a_.dim(); }
    const ComplexMatrix& one_body() const noexcept { return a_; }
    const ComplexMatrix& pair() const noexcept { return v_; }
    /// V_12 + V_21 on H (x) H.
    const ComplexMatrix& symmetrized_pair() const noexcept { return w_; }
    double one_body_norm() const noexcept { return a_norm_; }
    double pair_norm() const noexcept { return v_norm_; }

    /// Random A and V with operator norms exactly `a_norm` and `v_norm`.
    static MeanFieldSystem random(std::size_t d, Rng& rng, double a_norm, double v_norm);

private:
    ComplexMatrix a_;
    ComplexMatrix v_;
    ComplexMatrix w_;
    double a_norm_;
    double v_norm_;
};

/// sum_{i != j <= n} V_ij^[n], unscaled.
ComplexMatrix pair_interaction_sum(const MeanFieldSystem& sys, const TensorShape& shape);

/// H_N = sum_j A_j + (1/N) sum_{i != j} V_ij
ComplexMatrix build_hamiltonian(const MeanFieldSystem& sys, std::size_t n,
                                std::size_t max_total_dim = kDefaultMaxTotalDim);

/// H_{n,N} = sum_{j<=n} A_j^[n] + (1/N) sum_{i != j <= n} V_ij^[n]
ComplexMatrix build_reduced_hamiltonian(const MeanFieldSystem& sys, std::size_t n, std::size_t big_n,
                                        std::size_t max_total_dim = kDefaultMaxTotalDim);

/// sum_{j<=n} tr_{n+1}[V_{j,n+1} + V_{n+1,j}, rho_{n+1}] for an (n+1)-site operator.
ComplexMatrix hierarchy_coupling(const MeanFieldSystem& sys, const ComplexMatrix& rho_next,
                                 const TensorShape& next_shape);

/// Exact propagation rho_N(t) = e^{-itH} rho_N(0) e^{itH} through one
/// eigendecomposition of H, reused for every time.
class ExactPropagator {
public:
    explicit ExactPropagator(const ComplexMatrix& hamiltonian, const LinalgOptions& opts = {});
    ExactPropagator(const MeanFieldSystem& sys, std::size_t n);

    const HermitianEigen& eigen() const noexcept { return eig_; }
    std::size_t dim() const noexcept { return eig_.eigenvalues.size(); }

    /// rho_0 expressed in the eigenbasis, ready for repeated evaluation.
    class Prepared {
    public:
        DensityOperator at(double t) const;
        const TensorShape& shape() const noexcept { return shape_; }

    private:
        friend class ExactPropagator;
        Prepared(const ExactPropagator* owner, ComplexMatrix rotated, TensorShape shape)
            : owner_(owner), rotated_(std::move(rotated)), shape_(shape) {}
        const ExactPropagator* owner_;
        ComplexMatrix rotated_;
        TensorShape shape_;
    };

    /// The returned object refers to this propagator, which must outlive it.
    Prepared prepare(const DensityOperator& rho0) const;
    DensityOperator evolve(const DensityOperator& rho0, double t) const;

private:
    HermitianEigen eig_;
    ComplexMatrix eigvec_adjoint_;
};

DensityOperator evolve_exact(const DensityOperator& rho0, const MeanFieldSystem& sys, double t);

/// d rho/dt = -i([A, rho] + tr_2[V_12 + V_21, rho (x) rho])
ComplexMatrix hartree_rhs(const ComplexMatrix& rho, const MeanFieldSystem& sys);
ComplexMatrix hartree_rhs(const DensityOperator& rho, const MeanFieldSystem& sys);

/// Integrator step-size ceiling: min(default_cap, 1 / (40 max(||V||, 1))).
double hartree_step_cap(const MeanFieldSystem& sys, double default_cap = 0.1);

struct HartreeTrajectory {
    std::vector<double> times;
    std::vector<DensityOperator> states;
    double step_size = 0.0;
    std::string method = "rk4";

    /// Index of the grid point at time t; throws BadSiteIndex when t is off-grid.
    std::size_t index_of(double t) const;
    const DensityOperator& at(double t) const { return states[index_of(t)]; }
};

struct HartreeOptions {
    double default_cap = 0.1;
    /// Validation tolerance for stored states.
    double drift_tol = 1e-7;
    /// Store every `record_every`-th step (the endpoint is always stored).
    std::size_t record_every = 1;
};

/// Classical fixed-step RK4. The step is shrunk (never grown) so that it divides
/// t1 - t0 evenly.
HartreeTrajectory integrate_hartree(const DensityOperator& rho0, const MeanFieldSystem& sys, double t0,
                                    double t1, double step, const HartreeOptions& opts = {});

struct EpsilonTerm {
    ComplexMatrix matrix;
    double trace_norm = 0.0;
    double bound = 0.0;  // 5 n^2 ||V|| / N
};

/// eps_n = (1/N) sum_{i != j <= n}[V_ij, rho^(n)] - (n/N) sum_{j<=n} tr_{n+1}[V_{j,n+1} + V_{n+1,j}, rho^(n+1)]
/// Throws BoundViolation when the trace norm exceeds the bound (if `enforce`).
EpsilonTerm epsilon_term(const DensityOperator& rho_n, const MeanFieldSystem& sys, std::size_t n,
                         bool enforce = true);

struct HierarchyResidual {
    std::size_t n = 0;
    double t = 0.0;
    double residual_trace_norm = 0.0;
    double epsilon_norm = 0.0;
    double epsilon_bound = 0.0;
};

/// Central-difference residual of the BBGKY equation for the n-th marginal.
HierarchyResidual bbgky_residual(const ExactPropagator::Prepared& evolution, const MeanFieldSystem& sys,
                                 std::size_t n, double t, double h);
HierarchyResidual bbgky_residual(const DensityOperator& rho0, const MeanFieldSystem& sys, std::size_t n,
                                 double t, double h);

/// Central-difference residual of the hierarchy satisfied by rho(t)^{(x)n}.
/// t - h, t and t + h must be grid points of the trajectory.
double tensor_hierarchy_residual(const HartreeTrajectory& traj, const MeanFieldSystem& sys, std::size_t n,
                                 double t, double h);

struct GronwallPoint {
    double t = 0.0;
    double lhs = 0.0;       // ||E_{n,N}(t)||_1
    double rhs = 0.0;       // ||E_{n,N}(0)|| + 5 n^2 ||V|| t / N + 4 ||V|| n int_0^t ||E_{n+1,N}||
    double integral = 0.0;  // trapezoidal int_0^t ||E_{n+1,N}(s)|| ds
};

/// Evaluates the one-step Gronwall inequality along sampled error curves.
std::vector<GronwallPoint> gronwall_check(std::span<const double> times, std::span<const double> e_n,
                                          std::span<const double> e_next, std::size_t n, std::size_t big_n,
                                          double v_norm);

/// ||E_{n,N}(t)||_1 = tr|rho_N^(n)(t) - rho(t)^{(x)n}| at each trajectory grid point, n = 1..max_order.
/// Row r holds the errors at traj.times[r].
std::vector<std::vector<double>> propagation_errors(const ExactPropagator::Prepared& evolution,
                                                    const HartreeTrajectory& traj, std::size_t max_order);

}  // namespace qkac
