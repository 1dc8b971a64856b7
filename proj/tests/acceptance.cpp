// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "qkac/chaos.hpp"
#include "qkac/dynamics.hpp"
#include "qkac/experiment.hpp"

using namespace qkac;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::uniform_real_distribution<double> unit(0.0, 1.0);

/// Exchangeable mixture sum_m w_m rho_m^{(x)N} with 2..4 random components.
DensityOperator random_exchangeable(Rng& rng, std::size_t n) {
    const std::size_t parts = 2 + rng() % 3;
    std::vector<DensityOperator> states;
    std::vector<double> w;
    double total = 0.0;
    for (std::size_t m = 0; m < parts; ++m) {
        states.push_back(random_density(2, rng));
        w.push_back(0.05 + unit(rng));
        total += w.back();
    }
    for (auto& x : w) x /= total;
    return mixture_of_powers(w, states, n);
}

ComplexMatrix observable(Rng& rng) { return random_observable(2, rng, 0.05 + 0.95 * unit(rng)); }

Outcome product_chaoticity() {
    double worst = 0.0;
    for (std::size_t d : {2u, 3u}) {
        const std::size_t n_max = d == 2 ? 10 : 7;
        for (std::size_t n = 1; n <= n_max; ++n)
            for (std::uint64_t seed = 0; seed < 3; ++seed) {
                const auto rho = random_density(d, derive_seed(1, d * 100 + n, seed));
                const auto p = tensor_power(rho, n);
                for (std::size_t k = 1; k <= std::min<std::size_t>(3, n); ++k)
                    worst = std::max(worst, chaos_distance(p, rho, k));
            }
    }
    return {worst <= 1e-10, "max distance " + fmt("%.2e", worst) + " (d=2: N<=10, d=3: N<=7)"};
}

Outcome variance_closed_form() {
    double worst = 0.0;
    for (std::size_t n = 2; n <= 10; ++n)
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            Rng rng(derive_seed(2, n, seed));
            const auto rho = random_density(2, rng);
            const auto a = random_observable(2, rng, 1.0 + unit(rng));
            const double expect =
                (trace(adjoint(a) * a * rho.matrix()).real() - std::norm(trace(a * rho.matrix()))) /
                static_cast<double>(n);
            worst = std::max(worst, std::abs(empirical_variance(tensor_power(rho, n), rho, a) - expect));
        }
    return {worst <= 1e-9, "max deviation " + fmt("%.2e", worst)};
}

Outcome corollary_rate() {
    constexpr int trials = 100;
    const std::size_t ns[] = {4, 6, 8, 10};
    int printed_fail = 0, unsquared_fail = 0, checks = 0;
    double worst_printed = -std::numeric_limits<double>::infinity();
    double worst_unsquared = -std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng(derive_seed(3, 0, static_cast<std::uint64_t>(trial)));
        const std::size_t n = ns[trial % 4];
        const auto rho_n = random_exchangeable(rng, n);
        // Alternate between the one-site marginal and an unrelated target state.
        const auto target = trial % 2 == 0 ? marginal(rho_n, 1) : random_density(2, rng);
        for (std::size_t k = 1; k <= 3; ++k) {
            std::vector<ComplexMatrix> as;
            std::vector<double> es;
            for (std::size_t j = 0; j < k; ++j) {
                as.push_back(observable(rng));
                es.push_back(empirical_variance(rho_n, target, adjoint(as.back())));
            }
            const double c = factorization_error(rho_n, target, as);
            const auto b = corollary_bound(target, as, es, n);
            ++checks;
            worst_printed = std::max(worst_printed, c - b.printed);
            worst_unsquared = std::max(worst_unsquared, c - b.unsquared);
            if (c > b.printed + 1e-9) ++printed_fail;
            if (c > b.unsquared + 1e-9) ++unsquared_fail;
        }
    }
    std::ostringstream out;
    out << checks << " checks; printed form violated " << printed_fail << "x (max C-bound "
        << fmt("%.3e", worst_printed) << "); unsquared form violated " << unsquared_fail << "x (max C-bound "
        << fmt("%.3e", worst_unsquared) << ")";
    return {printed_fail == 0, out.str()};
}

Outcome epsilon_bound() {
    const std::size_t ns[] = {4, 5, 6, 7, 8, 10};
    const int per_n[] = {20, 20, 20, 16, 16, 8};
    int states = 0, fail = 0;
    double worst_ratio = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
        const std::size_t n = ns[i];
        Rng rng(derive_seed(4, n));
        const auto sys = MeanFieldSystem::random(2, rng, 0.2 + 0.8 * unit(rng), 0.2 + 0.8 * unit(rng));
        const ExactPropagator prop(sys, n);
        for (int rep = 0; rep < per_n[i]; ++rep) {
            const auto state = prop.evolve(random_exchangeable(rng, n), 2.0 * unit(rng));
            ++states;
            for (std::size_t order = 1; order <= 3; ++order) {
                const auto eps = epsilon_term(state, sys, order, false);
                if (eps.trace_norm > eps.bound + 1e-9) ++fail;
                worst_ratio = std::max(worst_ratio, eps.trace_norm / eps.bound);
            }
        }
    }
    return {fail == 0 && states >= 100, std::to_string(states) + " evolved states, n<=3, N<=10; max ||eps||/bound " +
                                            fmt("%.3f", worst_ratio)};
}

Outcome hartree_free_field() {
    double worst = 0.0, ratio_lo = 1e9, ratio_hi = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng(derive_seed(5, seed));
        const auto a = random_hermitian(2, rng, 1.0);
        const MeanFieldSystem free(a, ComplexMatrix::zero(4));
        const auto rho = random_density(2, rng);
        const auto u = herm_expm(a, 1.0);
        const auto exact = u * rho.matrix() * adjoint(u);
        auto error = [&](double step) {
            return trace_norm(integrate_hartree(rho, free, 0.0, 1.0, step).states.back().matrix() - exact);
        };
        worst = std::max(worst, error(1e-3));
        // Largest admissible step and its half keep the error above the roundoff floor.
        const double ratio = error(0.025) / error(0.0125);
        ratio_lo = std::min(ratio_lo, ratio);
        ratio_hi = std::max(ratio_hi, ratio);
    }
    return {worst <= 1e-6 && ratio_lo >= 12.0 && ratio_hi <= 20.0,
            "error at step 1e-3 " + fmt("%.2e", worst) + "; halving ratio in [" + fmt("%.2f", ratio_lo) + ", " +
                fmt("%.2f", ratio_hi) + "]"};
}

Outcome hartree_positivity() {
    double drift = 0.0, lmin = std::numeric_limits<double>::infinity();
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(derive_seed(6, seed));
        const auto sys = MeanFieldSystem::random(2, rng, unit(rng), unit(rng));
        const auto traj = integrate_hartree(random_density(2, rng), sys, 0.0, 1.0, 1e-3);
        for (const auto& s : traj.states) {
            drift = std::max(drift, std::abs(trace(s.matrix()) - 1.0));
            lmin = std::min(lmin, min_eigenvalue(s.matrix()));
        }
    }
    return {drift <= 1e-8 && lmin >= -1e-7, "max |tr-1| " + fmt("%.2e", drift) + ", min eigenvalue " + fmt("%.3e", lmin)};
}

// Pinned after an h-refinement study: residual(h) ~ C h^2 with C below 2 on these systems.
constexpr double kBbgkyTolerance = 1e-5;

Outcome bbgky_residual_check() {
    double worst = 0.0, ratio_lo = 1e9, ratio_hi = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng(derive_seed(7, seed));
        const auto sys = MeanFieldSystem::random(2, rng, unit(rng), unit(rng));
        const ExactPropagator prop(sys, 4);
        const auto evo = prop.prepare(random_exchangeable(rng, 4));
        const double t = unit(rng);
        for (std::size_t n : {1u, 2u}) {
            const double r1 = bbgky_residual(evo, sys, n, t, 1e-3).residual_trace_norm;
            const double r2 = bbgky_residual(evo, sys, n, t, 5e-4).residual_trace_norm;
            worst = std::max(worst, r1);
            ratio_lo = std::min(ratio_lo, r1 / r2);
            ratio_hi = std::max(ratio_hi, r1 / r2);
        }
    }
    return {worst <= kBbgkyTolerance && ratio_lo >= 3.0 && ratio_hi <= 5.0,
            "max residual " + fmt("%.2e", worst) + " (tol " + fmt("%.0e", kBbgkyTolerance) + "); ratio in [" +
                fmt("%.3f", ratio_lo) + ", " + fmt("%.3f", ratio_hi) + "]"};
}

// First verified run, seed 7; regression values for E_{1,N}(0.5).
constexpr double kPinnedE1[] = {0.30514727564603711, 0.15695036883361627, 0.10621656609733812,
                                0.080356549008630568, 0.064647493698025416};

Outcome propagation_of_chaos() {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::propagation;
    cfg.d = 2;
    cfg.n_list = {2, 4, 6, 8, 10};
    cfg.k_list = {1};
    cfg.times = {0.5};
    cfg.step = 1e-3;
    cfg.seed = 7;
    cfg.quad_intervals = 0;
    const auto table = run_experiment(cfg);
    if (!table.ok()) return {false, "experiment failed: " + table.metadata.at("error_message")};
    std::vector<double> e;
    for (const auto& row : table.rows) e.push_back(std::get<double>(row[3]));
    bool decreasing = true;
    double drift = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (i > 0 && !(e[i] < e[i - 1])) decreasing = false;
        drift = std::max(drift, std::abs(e[i] - kPinnedE1[i]) / kPinnedE1[i]);
    }
    std::ostringstream out;
    out << "E_1,N(0.5) =";
    for (double x : e) out << ' ' << fmt("%.5f", x);
    out << "; E_1,10/E_1,2 = " << fmt("%.3f", e.back() / e.front()) << "; drift vs pinned " << fmt("%.1e", drift);
    return {decreasing && e.back() <= e.front() / 3.0 && drift <= 1e-8, out.str()};
}

Outcome gronwall_audit() {
    constexpr std::size_t n = 8;
    Rng rng(derive_seed(9, 0));
    const auto sys = MeanFieldSystem::random(2, rng, 1.0, 1.0);
    const auto rho0 = random_density(2, rng);
    const auto traj = integrate_hartree(rho0, sys, 0.0, 0.5, 1e-3);
    const ExactPropagator prop(sys, n);
    const auto evo = prop.prepare(tensor_power(rho0, n));
    const auto errors = propagation_errors(evo, traj, 2);
    std::vector<double> e1, e2;
    for (const auto& row : errors) {
        e1.push_back(row[0]);
        e2.push_back(row[1]);
    }
    const auto pts = gronwall_check(traj.times, e1, e2, 1, n, sys.pair_norm());
    double worst = 0.0;
    bool ok = true;
    for (const auto& p : pts) {
        if (p.lhs > p.rhs * 1.05) ok = false;
        if (p.t > 0.0) worst = std::max(worst, p.lhs / p.rhs);
    }
    return {ok, std::to_string(pts.size()) + " grid points on [0, 0.5]; max lhs/rhs " + fmt("%.3f", worst)};
}

Outcome symmetry_propagation() {
    int trials = 0, fail = 0;
    double worst = 0.0;
    for (std::uint64_t t = 0; t < 24; ++t) {
        Rng rng(derive_seed(10, t));
        const std::size_t n = 2 + t % 4;
        const auto sys = MeanFieldSystem::random(2, rng, unit(rng), unit(rng));
        const auto out = evolve_exact(random_exchangeable(rng, n), sys, 3.0 * unit(rng));
        const auto check = is_symmetric(out, 1e-8, true);
        ++trials;
        if (!check) ++fail;
        worst = std::max(worst, check.max_violation);
    }
    return {fail == 0 && trials >= 20, std::to_string(trials) + " trials, N<=5 full group; max violation " +
                                           fmt("%.2e", worst)};
}

std::string rows_only(const ResultTable& t) {
    std::istringstream in(to_csv(t));
    std::string line, out;
    while (std::getline(in, line))
        if (line.rfind('#', 0) != 0) out += line + "\n";
    return out;
}

Outcome determinism() {
    const char* configs[] = {
        "kind = chaos_sweep\nN_list = 2, 4, 6\nk_list = 1, 2\nstate = mixture\nseed = 11\n",
        "kind = propagation\nN_list = 2, 3, 5\nk_list = 1, 2\ntimes = 0.1, 0.3\nseed = 11\nquad_intervals = 5\n",
        "kind = bbgky_verify\nN_list = 3, 4\nk_list = 1, 2\ntimes = 0.2, 0.7\nseed = 11\n",
        "kind = hartree_convergence\nN_list = 2\ntimes = 1\nstep = 0.01\nseed = 11\n",
        "kind = bound_audit\nN_list = 3, 5\nk_list = 1, 2\ntimes = 0, 0.4\ntrials = 3\nseed = 11\n",
    };
    int identical = 0, total = 0;
    for (const char* text : configs) {
        auto cfg = parse_config(text);
        const auto a = rows_only(run_experiment(cfg));
        const auto b = rows_only(run_experiment(cfg));
        cfg.parallel = 3;
        const auto c = rows_only(run_experiment(cfg));
        total += 2;
        identical += (a == b) + (a == c);
    }
    return {identical == total, std::to_string(identical) + "/" + std::to_string(total) +
                                    " reruns byte-identical (sequential and parallel, all five kinds)"};
}

struct Criterion {
    const char* name;
    double time_limit_s;  // 0 = none
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"1 product-state chaoticity", 10.0, product_chaoticity},
        {"2 empirical-variance closed form", 10.0, variance_closed_form},
        {"3 corollary rate bound", 120.0, corollary_rate},
        {"4 epsilon bound", 120.0, epsilon_bound},
        {"5 Hartree free-field exactness and RK4 order", 0.0, hartree_free_field},
        {"6 Hartree positivity and trace", 0.0, hartree_positivity},
        {"7 BBGKY residual", 0.0, bbgky_residual_check},
        {"8 propagation of chaos", 300.0, propagation_of_chaos},
        {"9 Gronwall inequality audit", 0.0, gronwall_audit},
        {"10 symmetry propagation", 0.0, symmetry_propagation},
        {"11 determinism", 0.0, determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.time_limit_s > 0.0 && secs > c.time_limit_s) {
            o.pass = false;
            o.detail += "; over time limit";
        }
        if (!o.pass) ++failed;
        std::printf("[%s] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
