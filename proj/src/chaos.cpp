#include "qkac/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "qkac/error.hpp"

namespace qkac {

namespace {

void check_target(const DensityOperator& rho_n, const DensityOperator& rho) {
    if (rho.sites() != 1) throw DimensionMismatch("target state must be single-site");
    if (rho.local_dim() != rho_n.local_dim()) throw DimensionMismatch("local dimensions differ");
}

void check_order(std::size_t k, std::size_t n) {
    if (k < 1 || k > n)
        throw BadSiteIndex("order k = " + std::to_string(k) + " outside 1.." + std::to_string(n));
}

constexpr double kClampFloor = -1e-8;

}  // namespace

DensityOperator marginal(const DensityOperator& rho_n, std::size_t k) {
    const std::size_t n = rho_n.sites();
    check_order(k, n);
    if (k == n) return rho_n;
    std::vector<int> traced;
    for (std::size_t s = k + 1; s <= n; ++s) traced.push_back(static_cast<int>(s));
    auto m = partial_trace(rho_n.matrix(), rho_n.shape(), traced);
    return DensityOperator::from_trusted(std::move(m), rho_n.shape().with_sites(k),
                                         DensityTolerances::relaxed(1e-9));
}

double chaos_distance(const DensityOperator& rho_n, const DensityOperator& rho, std::size_t k) {
    check_target(rho_n, rho);
    const auto mk = marginal(rho_n, k);
    return trace_norm(mk.matrix() - tensor_power(rho.matrix(), k));
}

EmpiricalVariance empirical_variance_detailed(const DensityOperator& rho_n, const DensityOperator& rho,
                                              const ComplexMatrix& a) {
    check_target(rho_n, rho);
    const auto& shape = rho_n.shape();
    const Complex mean = trace_of_product(a, rho.matrix());

    ComplexMatrix deviation = empirical_observable(a, shape);
    deviation.add_identity(-mean);

    // (X - c) rho_N, applying each A_j without forming it.
    ComplexMatrix applied(rho_n.dim());
    for (std::size_t j = 1; j <= shape.sites(); ++j)
        applied += apply_one_body(a, static_cast<int>(j), shape, rho_n.matrix());
    applied *= 1.0 / static_cast<double>(shape.sites());
    applied -= rho_n.matrix() * mean;

    // tr(B^dagger Y) = sum_ij conj(B_ij) Y_ij
    Complex acc = 0.0;
    const auto b = deviation.data();
    const auto y = applied.data();
    for (std::size_t i = 0; i < b.size(); ++i) acc += std::conj(b[i]) * y[i];

    EmpiricalVariance out;
    out.raw = acc.real();
    out.imag = acc.imag();
    if (out.raw < kClampFloor) {
        throw BoundViolation("empirical_variance: e_N = " + std::to_string(out.raw) + " is negative");
    }
    out.clamped = out.raw < 0.0;
    out.value = std::max(out.raw, 0.0);
    return out;
}

double empirical_variance(const DensityOperator& rho_n, const DensityOperator& rho, const ComplexMatrix& a) {
    return empirical_variance_detailed(rho_n, rho, a).value;
}

double factorization_error(const DensityOperator& rho_n, const DensityOperator& rho,
                           std::span<const ComplexMatrix> observables) {
    check_target(rho_n, rho);
    const std::size_t k = observables.size();
    check_order(k, rho_n.sites());
    const auto mk = marginal(rho_n, k);
    const Complex joint = trace_of_product(kron_all(observables), mk.matrix());
    Complex product = 1.0;
    for (const auto& a : observables) product *= trace_of_product(rho.matrix(), a);
    return std::abs(joint - product);
}

double injective_fraction(std::size_t n, std::size_t k) {
    double f = 1.0;
    for (std::size_t m = 0; m < k; ++m) f *= 1.0 - static_cast<double>(m) / static_cast<double>(n);
    return f;
}

CorollaryBound corollary_bound(const DensityOperator& rho, std::span<const ComplexMatrix> observables,
                               std::span<const double> e_adjoint, std::size_t n) {
    const std::size_t k = observables.size();
    if (e_adjoint.size() != k) throw DimensionMismatch("corollary_bound: need one e_N per observable");
    check_order(k, n);
    std::vector<double> norms(k);
    std::vector<double> means(k);
    for (std::size_t j = 0; j < k; ++j) {
        norms[j] = operator_norm(observables[j]);
        means[j] = std::abs(trace_of_product(rho.matrix(), observables[j]));
    }

    CorollaryBound out;
    for (std::size_t l = 0; l < k; ++l) {
        double sq = 1.0;
        double unsq = 1.0;
        for (std::size_t j = 0; j < l; ++j) {
            sq *= means[j] * means[j];
            unsq *= means[j];
        }
        for (std::size_t j = l + 1; j < k; ++j) {
            sq *= norms[j] * norms[j];
            unsq *= norms[j];
        }
        const double root = std::sqrt(std::max(e_adjoint[l], 0.0));
        out.printed += root * sq;
        out.unsquared += root * unsq;
    }
    const double norm_product = std::accumulate(norms.begin(), norms.end(), 1.0, std::multiplies<>());
    out.combinatorial = 2.0 * norm_product * (1.0 - injective_fraction(n, k));
    out.printed += out.combinatorial;
    out.unsquared += out.combinatorial;
    return out;
}

std::vector<LabeledObservable> weyl_basis(std::size_t d, std::size_t count) {
    std::vector<LabeledObservable> out;
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) {
            ComplexMatrix w(d);
            // (X^a Z^b)|j> = omega^{b j} |j + a>
            for (std::size_t j = 0; j < d; ++j)
                w((j + a) % d, j) = std::polar(1.0, two_pi * static_cast<double>(b * j) / static_cast<double>(d));
            out.push_back({"W(" + std::to_string(a) + "," + std::to_string(b) + ")", std::move(w)});
        }
    if (count > 0 && count < out.size()) out.resize(count);
    return out;
}

ChaosReport chaos_report(const DensityOperator& rho_n, const DensityOperator& rho, std::size_t k,
                         std::span<const LabeledObservable> observables) {
    check_target(rho_n, rho);
    check_order(k, rho_n.sites());
    ChaosReport report;
    report.k = k;
    report.n = rho_n.sites();
    report.chaos_distance = chaos_distance(rho_n, rho, k);

    const std::size_t m = observables.size();
    std::vector<double> e_adj(m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto e = empirical_variance_detailed(rho_n, rho, observables[i].op);
        report.e_n_values.emplace_back(observables[i].label, e.value);
        const auto e_dag = empirical_variance_detailed(rho_n, rho, adjoint(observables[i].op));
        e_adj[i] = e_dag.value;
        report.any_clamped = report.any_clamped || e.clamped || e_dag.clamped;
    }

    double least_slack = std::numeric_limits<double>::infinity();
    for (std::size_t start = 0; start < m; ++start) {
        std::vector<ComplexMatrix> ops;
        std::vector<double> es;
        std::string label;
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t idx = (start + j) % m;
            ops.push_back(observables[idx].op);
            es.push_back(e_adj[idx]);
            label += (j ? "*" : "") + observables[idx].label;
        }
        TupleCheck check;
        check.label = label;
        check.c_kn = factorization_error(rho_n, rho, ops);
        const auto bound = corollary_bound(rho, ops, es, report.n);
        check.bound = bound.printed;
        check.bound_unsquared = bound.unsquared;
        report.c_kn_values.emplace_back(label, check.c_kn);
        report.bound_satisfied = report.bound_satisfied && check.c_kn <= check.bound + 1e-9;
        report.unsquared_bound_satisfied =
            report.unsquared_bound_satisfied && check.c_kn <= check.bound_unsquared + 1e-9;
        if (check.bound - check.c_kn < least_slack) {
            least_slack = check.bound - check.c_kn;
            report.corollary_bound = check.bound;
            report.corollary_bound_unsquared = check.bound_unsquared;
        }
        report.tuples.push_back(std::move(check));
    }
    return report;
}

}  // namespace qkac
