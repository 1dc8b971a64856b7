#include "qkac/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qkac/error.hpp"

namespace qkac {

namespace {

// One Jacobi rotation G acting on coordinates (p, q):
//   G = [[c, s e^{i phi}], [-s e^{-i phi}, c]]
struct Rotation {
    std::size_t p;
    std::size_t q;
    double c;
    double sr;  // Re(s e^{i phi})
    double si;  // Im(s e^{i phi})
};

// x' = c x - conj(w) y, y' = w x + c y, where w = s e^{i phi}.
inline void rotate_pair_conj_w(Complex& x, Complex& y, const Rotation& g) {
    const double xr = x.real(), xi = x.imag(), yr = y.real(), yi = y.imag();
    // conj(w) y = (sr - i si)(yr + i yi)
    const double cwyr = g.sr * yr + g.si * yi;
    const double cwyi = g.sr * yi - g.si * yr;
    // w x = (sr + i si)(xr + i xi)
    const double wxr = g.sr * xr - g.si * xi;
    const double wxi = g.sr * xi + g.si * xr;
    x = Complex(g.c * xr - cwyr, g.c * xi - cwyi);
    y = Complex(wxr + g.c * yr, wxi + g.c * yi);
}

// x' = c x - w y, y' = conj(w) x + c y.
inline void rotate_pair_w(Complex& x, Complex& y, const Rotation& g) {
    const double xr = x.real(), xi = x.imag(), yr = y.real(), yi = y.imag();
    const double wyr = g.sr * yr - g.si * yi;
    const double wyi = g.sr * yi + g.si * yr;
    const double cwxr = g.sr * xr + g.si * xi;
    const double cwxi = g.sr * xi - g.si * xr;
    x = Complex(g.c * xr - wyr, g.c * xi - wyi);
    y = Complex(cwxr + g.c * yr, cwxi + g.c * yi);
}

double offdiag_norm(const ComplexMatrix& a) {
    double s = 0.0;
    const std::size_t n = a.dim();
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = a.row(i);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) s += std::norm(row[j]);
    }
    return std::sqrt(s);
}

}  // namespace

bool is_hermitian(const ComplexMatrix& m, const LinalgOptions& opts) {
    return hermiticity_violation(m) <= opts.hermitian_tol * std::max(1.0, max_abs(m));
}

void require_hermitian(const ComplexMatrix& m, const LinalgOptions& opts) {
    const double v = hermiticity_violation(m);
    if (v > opts.hermitian_tol * std::max(1.0, max_abs(m))) throw NotHermitian(v);
}

HermitianEigen herm_eigen(const ComplexMatrix& m, const LinalgOptions& opts) {
    require_hermitian(m, opts);
    const std::size_t n = m.dim();

    ComplexMatrix a = m;
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = a(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            const Complex avg = 0.5 * (a(i, j) + std::conj(a(j, i)));
            a(i, j) = avg;
            a(j, i) = std::conj(avg);
        }
    }
    // Rows of vt are the eigenvectors (the transpose of U).
    ComplexMatrix vt = ComplexMatrix::identity(n);

    const double target = opts.offdiag_rel_threshold * frobenius_norm(a);
    // Pairs below this cannot keep the off-diagonal norm above target on their own.
    const double skip = target / static_cast<double>(std::max<std::size_t>(n, 1));
    const std::size_t players = n + (n % 2);
    std::vector<std::size_t> order(players);
    std::vector<Rotation> rots;
    rots.reserve(players / 2);
    std::vector<bool> paired(n);

    int sweep = 0;
    for (; n > 1; ++sweep) {
        if (offdiag_norm(a) <= target) break;
        if (sweep >= opts.max_sweeps) {
            throw ConvergenceFailure("herm_eigen: no convergence after " +
                                     std::to_string(opts.max_sweeps) + " sweeps (dim " +
                                     std::to_string(n) + ")");
        }
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t round = 0; round + 1 < players; ++round) {
            rots.clear();
            for (std::size_t k = 0; k < players / 2; ++k) {
                std::size_t p = order[k];
                std::size_t q = order[players - 1 - k];
                if (p >= n || q >= n) continue;
                if (p > q) std::swap(p, q);
                const Complex apq = a(p, q);
                const double b = std::abs(apq);
                if (b <= skip) continue;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = (aqq - app) / (2.0 * b);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const Complex phase = apq / b;
                rots.push_back({p, q, c, s * phase.real(), s * phase.imag()});
            }
            if (!rots.empty()) {
                // A <- G^dagger A G in one pass: rows p, q of G^dagger A G depend only
                // on rows p, q of A G. Rows outside every pair take the column part only.
                std::fill(paired.begin(), paired.end(), false);
                for (const auto& g : rots) paired[g.p] = paired[g.q] = true;
                for (std::size_t r = 0; r < n; ++r) {
                    if (paired[r]) continue;
                    auto row = a.row(r);
                    for (const auto& h : rots) rotate_pair_conj_w(row[h.p], row[h.q], h);
                }
                for (const auto& g : rots) {
                    auto rp = a.row(g.p);
                    auto rq = a.row(g.q);
                    for (const auto& h : rots) {
                        rotate_pair_conj_w(rp[h.p], rp[h.q], h);
                        rotate_pair_conj_w(rq[h.p], rq[h.q], h);
                    }
                    for (std::size_t j = 0; j < n; ++j) rotate_pair_w(rp[j], rq[j], g);
                    // U <- U G (rows of vt)
                    auto vp = vt.row(g.p);
                    auto vq = vt.row(g.q);
                    for (std::size_t j = 0; j < n; ++j) rotate_pair_conj_w(vp[j], vq[j], g);
                }
            }
            std::rotate(order.begin() + 1, order.end() - 1, order.end());
        }
    }

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
        return a(i, i).real() < a(j, j).real();
    });

    HermitianEigen out;
    out.sweeps = sweep;
    out.eigenvalues.resize(n);
    out.eigenvectors = ComplexMatrix(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(idx[k], idx[k]).real();
        const auto v = vt.row(idx[k]);
        for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = v[r];
    }
    return out;
}

double trace_norm(const ComplexMatrix& m, const LinalgOptions& opts) {
    if (m.dim() == 0) return 0.0;
    if (is_hermitian(m, opts)) {
        const auto eig = herm_eigen(m, opts);
        double s = 0.0;
        for (double l : eig.eigenvalues) s += std::abs(l);
        return s;
    }
    const auto eig = herm_eigen(matmul(adjoint(m), m), opts);
    double s = 0.0;
    for (double l : eig.eigenvalues) s += std::sqrt(std::max(l, 0.0));
    return s;
}

double operator_norm(const ComplexMatrix& m, const LinalgOptions& opts) {
    if (m.dim() == 0) return 0.0;
    if (is_hermitian(m, opts)) {
        const auto eig = herm_eigen(m, opts);
        return std::max(std::abs(eig.eigenvalues.front()), std::abs(eig.eigenvalues.back()));
    }
    const auto eig = herm_eigen(matmul(adjoint(m), m), opts);
    return std::sqrt(std::max(eig.eigenvalues.back(), 0.0));
}

ComplexMatrix reconstruct(const HermitianEigen& eig, const std::vector<Complex>& values) {
    const std::size_t n = eig.eigenvectors.dim();
    if (values.size() != n) throw DimensionMismatch("reconstruct: value count != dimension");
    ComplexMatrix scaled = eig.eigenvectors;
    for (std::size_t r = 0; r < n; ++r) {
        auto row = scaled.row(r);
        for (std::size_t k = 0; k < n; ++k) row[k] *= values[k];
    }
    return matmul(scaled, adjoint(eig.eigenvectors));
}

ComplexMatrix herm_expm(const HermitianEigen& eig, double t) {
    std::vector<Complex> phases(eig.eigenvalues.size());
    for (std::size_t k = 0; k < phases.size(); ++k)
        phases[k] = std::polar(1.0, -t * eig.eigenvalues[k]);
    return reconstruct(eig, phases);
}

ComplexMatrix herm_expm(const ComplexMatrix& h, double t, const LinalgOptions& opts) {
    return herm_expm(herm_eigen(h, opts), t);
}

}  // namespace qkac
