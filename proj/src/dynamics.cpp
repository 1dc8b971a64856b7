#include "qkac/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qkac/error.hpp"

namespace qkac {

namespace {

constexpr Complex kMinusI{0.0, -1.0};

ComplexMatrix one_body_sum(const ComplexMatrix& a, const TensorShape& shape) {
    ComplexMatrix out(shape.total_dim());
    for (std::size_t j = 1; j <= shape.sites(); ++j) out += embed_one_body(a, static_cast<int>(j), shape);
    return out;
}

ComplexMatrix central_difference(const ComplexMatrix& plus, const ComplexMatrix& minus, double h) {
    ComplexMatrix d = plus - minus;
    d *= 1.0 / (2.0 * h);
    return d;
}

}  // namespace

MeanFieldSystem::MeanFieldSystem(ComplexMatrix a, ComplexMatrix v) : a_(std::move(a)), v_(std::move(v)) {
    if (a_.dim() == 0) throw DimensionMismatch("MeanFieldSystem: empty one-body operator");
    if (v_.dim() != a_.dim() * a_.dim())
        throw DimensionMismatch("MeanFieldSystem: V must act on H (x) H (dimension d^2)");
    require_hermitian(a_);
    require_hermitian(v_);
    const auto s = swap_operator(a_.dim());
    w_ = v_ + matmul(s, matmul(v_, s));
    a_norm_ = operator_norm(a_);
    v_norm_ = operator_norm(v_);
}

MeanFieldSystem MeanFieldSystem::random(std::size_t d, Rng& rng, double a_norm, double v_norm) {
    auto a = random_hermitian(d, rng, a_norm);
    auto v = random_hermitian(d * d, rng, v_norm);
    return MeanFieldSystem(std::move(a), std::move(v));
}

ComplexMatrix pair_interaction_sum(const MeanFieldSystem& sys, const TensorShape& shape) {
    ComplexMatrix out(shape.total_dim());
    const int n = static_cast<int>(shape.sites());
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            if (i != j) out += embed_two_body(sys.pair(), i, j, shape);
    return out;
}

ComplexMatrix build_reduced_hamiltonian(const MeanFieldSystem& sys, std::size_t n, std::size_t big_n,
                                        std::size_t max_total_dim) {
    if (n < 1 || n > big_n) throw BadSiteIndex("build_reduced_hamiltonian: need 1 <= n <= N");
    TensorShape shape(sys.local_dim(), n, max_total_dim);
    ComplexMatrix h = one_body_sum(sys.one_body(), shape);
    if (n >= 2) h += pair_interaction_sum(sys, shape) * Complex(1.0 / static_cast<double>(big_n));
    return h;
}

ComplexMatrix build_hamiltonian(const MeanFieldSystem& sys, std::size_t n, std::size_t max_total_dim) {
    return build_reduced_hamiltonian(sys, n, n, max_total_dim);
}

ComplexMatrix hierarchy_coupling(const MeanFieldSystem& sys, const ComplexMatrix& rho_next,
                                 const TensorShape& next_shape) {
    const std::size_t n = next_shape.sites() - 1;
    if (n < 1) throw BadSiteIndex("hierarchy_coupling: need at least two sites");
    if (rho_next.dim() != next_shape.total_dim()) throw DimensionMismatch("hierarchy_coupling: shape");
    const int last = static_cast<int>(n + 1);
    ComplexMatrix acc(rho_next.dim());
    for (int j = 1; j <= static_cast<int>(n); ++j) {
        // V_{j,n+1} + V_{n+1,j} = (V_12 + V_21) placed on sites (j, n+1)
        const auto w = embed_two_body(sys.symmetrized_pair(), j, last, next_shape);
        acc += commutator(w, rho_next);
    }
    return partial_trace(acc, next_shape, {last});
}

ExactPropagator::ExactPropagator(const ComplexMatrix& hamiltonian, const LinalgOptions& opts)
    : eig_(herm_eigen(hamiltonian, opts)), eigvec_adjoint_(adjoint(eig_.eigenvectors)) {}

ExactPropagator::ExactPropagator(const MeanFieldSystem& sys, std::size_t n)
    : ExactPropagator(build_hamiltonian(sys, n)) {}

ExactPropagator::Prepared ExactPropagator::prepare(const DensityOperator& rho0) const {
    if (rho0.dim() != dim()) throw DimensionMismatch("ExactPropagator: state/Hamiltonian dimension mismatch");
    auto rotated = matmul(eigvec_adjoint_, matmul(rho0.matrix(), eig_.eigenvectors));
    return Prepared(this, std::move(rotated), rho0.shape());
}

DensityOperator ExactPropagator::Prepared::at(double t) const {
    const auto& lambda = owner_->eig_.eigenvalues;
    const std::size_t n = lambda.size();
    std::vector<Complex> phase(n);
    for (std::size_t a = 0; a < n; ++a) phase[a] = std::polar(1.0, -t * lambda[a]);
    ComplexMatrix m = rotated_;
    for (std::size_t a = 0; a < n; ++a) {
        auto row = m.row(a);
        for (std::size_t b = 0; b < n; ++b) row[b] *= phase[a] * std::conj(phase[b]);
    }
    m = matmul(owner_->eig_.eigenvectors, matmul(m, owner_->eigvec_adjoint_));
    return DensityOperator::from_trusted(std::move(m), shape_, DensityTolerances::relaxed(1e-9));
}

DensityOperator ExactPropagator::evolve(const DensityOperator& rho0, double t) const {
    return prepare(rho0).at(t);
}

DensityOperator evolve_exact(const DensityOperator& rho0, const MeanFieldSystem& sys, double t) {
    if (rho0.local_dim() != sys.local_dim()) throw DimensionMismatch("evolve_exact: local dimension mismatch");
    ExactPropagator prop(sys, rho0.sites());
    return prop.evolve(rho0, t);
}

ComplexMatrix hartree_rhs(const ComplexMatrix& rho, const MeanFieldSystem& sys) {
    const std::size_t d = sys.local_dim();
    if (rho.dim() != d) throw DimensionMismatch("hartree_rhs: expects a single-site operator");
    const TensorShape pair_shape(d, 2);
    const auto product = kron(rho, rho);
    ComplexMatrix out = commutator(sys.one_body(), rho);
    out += partial_trace(commutator(sys.symmetrized_pair(), product), pair_shape, {2});
    out *= kMinusI;
    return out;
}

ComplexMatrix hartree_rhs(const DensityOperator& rho, const MeanFieldSystem& sys) {
    return hartree_rhs(rho.matrix(), sys);
}

double hartree_step_cap(const MeanFieldSystem& sys, double default_cap) {
    return std::min(default_cap, 1.0 / (40.0 * std::max(sys.pair_norm(), 1.0)));
}

std::size_t HartreeTrajectory::index_of(double t) const {
    const auto it = std::lower_bound(times.begin(), times.end(), t);
    const double tol = 1e-9 * std::max(1.0, std::abs(t));
    for (auto cand : {it, it == times.begin() ? it : it - 1}) {
        if (cand != times.end() && std::abs(*cand - t) <= tol)
            return static_cast<std::size_t>(cand - times.begin());
    }
    throw BadSiteIndex("HartreeTrajectory: time " + std::to_string(t) + " is not a grid point");
}

HartreeTrajectory integrate_hartree(const DensityOperator& rho0, const MeanFieldSystem& sys, double t0,
                                    double t1, double step, const HartreeOptions& opts) {
    if (rho0.sites() != 1 || rho0.local_dim() != sys.local_dim())
        throw DimensionMismatch("integrate_hartree: expects a single-site state of the system's dimension");
    if (!(t1 >= t0)) throw Error("integrate_hartree: t1 must not precede t0");
    const double cap = hartree_step_cap(sys, opts.default_cap);
    if (!(step > 0.0) || step > cap * (1.0 + 1e-12)) {
        throw StepTooLarge("integrate_hartree: step " + std::to_string(step) + " outside (0, " +
                           std::to_string(cap) + "]");
    }
    const double span = t1 - t0;
    std::size_t steps = static_cast<std::size_t>(std::ceil(span / step - 1e-9));
    const double h = steps > 0 ? span / static_cast<double>(steps) : step;
    const std::size_t every = std::max<std::size_t>(opts.record_every, 1);
    const auto tol = DensityTolerances::relaxed(opts.drift_tol);

    HartreeTrajectory traj;
    traj.step_size = h;
    traj.times.push_back(t0);
    traj.states.push_back(rho0);

    ComplexMatrix rho = rho0.matrix();
    for (std::size_t s = 1; s <= steps; ++s) {
        const auto k1 = hartree_rhs(rho, sys);
        const auto k2 = hartree_rhs(rho + k1 * Complex(0.5 * h), sys);
        const auto k3 = hartree_rhs(rho + k2 * Complex(0.5 * h), sys);
        const auto k4 = hartree_rhs(rho + k3 * Complex(h), sys);
        rho += (k1 + k2 * Complex(2.0) + k3 * Complex(2.0) + k4) * Complex(h / 6.0);
        if (!rho.all_finite()) throw DensityDriftExceeded("integrate_hartree: non-finite state");
        if (s % every == 0 || s == steps) {
            const double t = s == steps ? t1 : t0 + static_cast<double>(s) * h;
            try {
                traj.states.push_back(validate(rho, rho0.shape(), tol));
            } catch (const Error& e) {
                throw DensityDriftExceeded("integrate_hartree: state at t = " + std::to_string(t) +
                                           " failed validation: " + e.what());
            }
            traj.times.push_back(t);
        }
    }
    return traj;
}

EpsilonTerm epsilon_term(const DensityOperator& rho_n, const MeanFieldSystem& sys, std::size_t n, bool enforce) {
    const std::size_t big_n = rho_n.sites();
    if (n < 1 || n + 1 > big_n) throw BadSiteIndex("epsilon_term: need 1 <= n <= N-1");
    if (rho_n.local_dim() != sys.local_dim()) throw DimensionMismatch("epsilon_term: local dimension mismatch");
    const double inv_n = 1.0 / static_cast<double>(big_n);
    const auto m_n = marginal(rho_n, n);
    const auto m_next = marginal(rho_n, n + 1);

    EpsilonTerm out;
    out.matrix = commutator(pair_interaction_sum(sys, m_n.shape()), m_n.matrix()) * Complex(inv_n);
    out.matrix -= hierarchy_coupling(sys, m_next.matrix(), m_next.shape()) *
                  Complex(static_cast<double>(n) * inv_n);
    out.trace_norm = trace_norm(out.matrix);
    out.bound = 5.0 * static_cast<double>(n * n) * sys.pair_norm() * inv_n;
    if (enforce && out.trace_norm > out.bound + 1e-9) {
        throw BoundViolation("epsilon_term: ||eps_" + std::to_string(n) + "||_1 = " +
                             std::to_string(out.trace_norm) + " exceeds " + std::to_string(out.bound));
    }
    return out;
}

HierarchyResidual bbgky_residual(const ExactPropagator::Prepared& evolution, const MeanFieldSystem& sys,
                                 std::size_t n, double t, double h) {
    const std::size_t big_n = evolution.shape().sites();
    if (n < 1 || n + 1 > big_n) throw BadSiteIndex("bbgky_residual: need 1 <= n <= N-1");
    if (!(h > 0.0)) throw Error("bbgky_residual: h must be positive");
    const auto now = evolution.at(t);
    const auto plus = marginal(evolution.at(t + h), n);
    const auto minus = marginal(evolution.at(t - h), n);
    const auto m_n = marginal(now, n);
    const auto m_next = marginal(now, n + 1);

    const auto h_reduced = build_reduced_hamiltonian(sys, n, big_n);
    ComplexMatrix rhs = commutator(h_reduced, m_n.matrix());
    rhs += hierarchy_coupling(sys, m_next.matrix(), m_next.shape()) *
           Complex(static_cast<double>(big_n - n) / static_cast<double>(big_n));
    rhs *= kMinusI;

    HierarchyResidual out;
    out.n = n;
    out.t = t;
    out.residual_trace_norm = trace_norm(central_difference(plus.matrix(), minus.matrix(), h) - rhs);
    const auto eps = epsilon_term(now, sys, n);
    out.epsilon_norm = eps.trace_norm;
    out.epsilon_bound = eps.bound;
    return out;
}

HierarchyResidual bbgky_residual(const DensityOperator& rho0, const MeanFieldSystem& sys, std::size_t n,
                                 double t, double h) {
    ExactPropagator prop(sys, rho0.sites());
    return bbgky_residual(prop.prepare(rho0), sys, n, t, h);
}

double tensor_hierarchy_residual(const HartreeTrajectory& traj, const MeanFieldSystem& sys, std::size_t n,
                                 double t, double h) {
    if (n < 1) throw BadSiteIndex("tensor_hierarchy_residual: n must be positive");
    if (!(h > 0.0)) throw Error("tensor_hierarchy_residual: h must be positive");
    const auto& rho = traj.at(t).matrix();
    const auto plus = tensor_power(traj.at(t + h).matrix(), n);
    const auto minus = tensor_power(traj.at(t - h).matrix(), n);
    const TensorShape shape(sys.local_dim(), n);
    const TensorShape next_shape(sys.local_dim(), n + 1);

    const auto power = tensor_power(rho, n);
    ComplexMatrix rhs = commutator(one_body_sum(sys.one_body(), shape), power);
    rhs += hierarchy_coupling(sys, tensor_power(rho, n + 1), next_shape);
    rhs *= kMinusI;
    return trace_norm(central_difference(plus, minus, h) - rhs);
}

std::vector<GronwallPoint> gronwall_check(std::span<const double> times, std::span<const double> e_n,
                                          std::span<const double> e_next, std::size_t n, std::size_t big_n,
                                          double v_norm) {
    if (times.size() != e_n.size() || times.size() != e_next.size() || times.empty())
        throw DimensionMismatch("gronwall_check: series lengths differ");
    std::vector<GronwallPoint> out;
    out.reserve(times.size());
    const double nn = static_cast<double>(n);
    double integral = 0.0;
    for (std::size_t r = 0; r < times.size(); ++r) {
        if (r > 0) integral += 0.5 * (times[r] - times[r - 1]) * (e_next[r] + e_next[r - 1]);
        GronwallPoint p;
        p.t = times[r];
        p.lhs = e_n[r];
        p.integral = integral;
        p.rhs = e_n[0] + 5.0 * nn * nn * v_norm * (times[r] - times[0]) / static_cast<double>(big_n) +
                4.0 * v_norm * nn * integral;
        out.push_back(p);
    }
    return out;
}

std::vector<std::vector<double>> propagation_errors(const ExactPropagator::Prepared& evolution,
                                                    const HartreeTrajectory& traj, std::size_t max_order) {
    if (max_order < 1 || max_order > evolution.shape().sites())
        throw BadSiteIndex("propagation_errors: order outside 1..N");
    std::vector<std::vector<double>> out;
    out.reserve(traj.times.size());
    for (std::size_t r = 0; r < traj.times.size(); ++r) {
        const auto state = evolution.at(traj.times[r]);
        std::vector<double> row;
        for (std::size_t k = 1; k <= max_order; ++k) row.push_back(chaos_distance(state, traj.states[r], k));
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace qkac
