#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "qkac/error.hpp"
#include "qkac/states.hpp"

using namespace qkac;

TEST_CASE("validate") {
    const TensorShape s(2, 1);
    CHECK_NOTHROW(validate(ComplexMatrix::identity(2) * Complex(0.5), s));
    CHECK_THROWS_AS(validate(ComplexMatrix::diagonal({1.5, -0.5}), s), NotPSD);
    CHECK_THROWS_AS(validate(ComplexMatrix::diagonal({0.6, 0.6}), s), TraceNotOne);
    CHECK_THROWS_AS(validate(ComplexMatrix{{0.5, 0.1}, {0.2, 0.5}}, s), NotHermitian);
    CHECK_THROWS_AS(validate(ComplexMatrix::identity(3), s), DimensionMismatch);
    try {
        validate(ComplexMatrix::diagonal({1.5, -0.5}), s);
    } catch (const NotPSD& e) {
        CHECK(e.min_eigenvalue() == doctest::Approx(-0.5));
    }
    // no silent repair: a nearly valid input keeps its entries
    const auto m = ComplexMatrix::diagonal({0.75, 0.25});
    CHECK(validate(m, s).matrix() == m);
}

TEST_CASE("random generators") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        for (std::size_t d : {1u, 2u, 3u, 5u}) {
            const auto r = random_density(d, seed);
            CHECK_NOTHROW(validate(r.matrix(), r.shape()));
            CHECK(random_density(d, seed).matrix() == r.matrix());
            const auto h = random_hermitian(d, seed, 0.7);
            CHECK(hermiticity_violation(h) < 1e-15);
            CHECK(operator_norm(h) <= 0.7 + 1e-12);
            CHECK(random_hermitian(d, seed, 0.7) == h);
        }
    }
    CHECK(random_density(3, 1).matrix() != random_density(3, 2).matrix());
}

TEST_CASE("random density statistics agree across independent samplers") {
    // Mean eigenvalue gap of 2x2 Ginibre densities: library sampler vs an
    // independent sampler built from std::normal_distribution.
    constexpr int samples = 10000;
    double lib = 0.0, lib_sq = 0.0, ref = 0.0, ref_sq = 0.0;
    Rng a(101);
    std::mt19937_64 b(202);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < samples; ++i) {
        const auto [l0, l1] = oracle::eig2(random_density(2, a).matrix());
        lib += l1 - l0;
        lib_sq += (l1 - l0) * (l1 - l0);
        ComplexMatrix gm(2);
        for (auto& x : gm.data()) x = Complex(g(b), g(b));
        auto w = oracle::naive_mul(gm, adjoint(gm));
        w *= 1.0 / trace(w).real();
        const auto [r0, r1] = oracle::eig2(w);
        ref += r1 - r0;
        ref_sq += (r1 - r0) * (r1 - r0);
    }
    lib /= samples;
    ref /= samples;
    const double var = (lib_sq / samples - lib * lib) + (ref_sq / samples - ref * ref);
    CHECK(std::abs(lib - ref) <= 4.0 * std::sqrt(var / samples));
}

TEST_CASE("symmetry checks") {
    Rng rng(7);
    const auto rho = random_density(2, rng);
    const auto sigma = random_density(2, rng);
    for (std::size_t n = 1; n <= 6; ++n) CHECK(is_symmetric(tensor_power(rho, n)));
    CHECK_FALSE(is_symmetric(tensor_product(rho, sigma)));
    CHECK(is_symmetric(tensor_product(rho, sigma)).max_violation > 1e-3);

    // (1/3!) sum_pi B_pi(1) (x) B_pi(2) (x) B_pi(3)
    const std::vector<ComplexMatrix> bs{oracle::random_matrix(2, rng), oracle::random_matrix(2, rng),
                                        oracle::random_matrix(2, rng)};
    ComplexMatrix avg(8);
    for (const auto& p : all_permutations(3))
        avg += oracle::naive_kron_all({bs[p(1) - 1], bs[p(2) - 1], bs[p(3) - 1]});
    avg *= 1.0 / 6.0;
    // Only the commutation with U_pi matters here; wrap the Hermitian part as a pseudo-density.
    const auto herm = (avg + adjoint(avg)) * Complex(0.5);
    const auto shifted = herm + ComplexMatrix::identity(8) * Complex(10.0);
    const auto dens = validate(shifted * Complex(1.0 / trace(shifted).real()), TensorShape(2, 3));
    CHECK(is_symmetric(dens));
    CHECK(is_symmetric(dens, 1e-10, true));
}

TEST_CASE("symmetrize") {
    Rng rng(8);
    const auto rho = random_density(2, rng);
    const auto sigma = random_density(2, rng);
    const auto p = tensor_power(rho, 3);
    CHECK(max_abs_diff(symmetrize(p).matrix(), p.matrix()) <= 1e-12);

    const auto sym = symmetrize(tensor_product(rho, sigma));
    const auto expect = (kron(rho.matrix(), sigma.matrix()) + kron(sigma.matrix(), rho.matrix())) * Complex(0.5);
    CHECK(max_abs_diff(sym.matrix(), expect) <= 1e-15);

    const auto tau = random_density(2, rng);
    const auto s3 = symmetrize(tensor_product(tensor_product(rho, sigma), tau));
    CHECK(is_symmetric(s3));
    CHECK(std::abs(trace(s3.matrix()) - 1.0) <= 1e-12);
    CHECK(max_abs_diff(symmetrize(s3).matrix(), s3.matrix()) <= 1e-12);
    CHECK_NOTHROW(validate(s3.matrix(), s3.shape()));

    CHECK_THROWS_AS(symmetrize(tensor_power(rho, 7)), PermutationBudgetExceeded);
}

TEST_CASE("mixtures") {
    Rng rng(9);
    const auto rho = random_density(2, rng);
    const auto sigma = random_density(2, rng);

    DiscreteMixtureSpec single{{{1.0, {rho, rho, rho}}}};
    CHECK(max_abs_diff(mixture_of_products(single, false).matrix(), tensor_power(rho, 3).matrix()) < 1e-15);

    DiscreteMixtureSpec pair{{{0.5, {rho, sigma}}, {0.5, {sigma, rho}}}};
    CHECK(is_symmetric(mixture_of_products(pair, false)));

    DiscreteMixtureSpec three;
    for (double w : {0.2, 0.3, 0.5})
        three.components.push_back({w, {random_density(2, rng), random_density(2, rng), random_density(2, rng)}});
    const auto mixed = mixture_of_products(three, true);
    CHECK(is_symmetric(mixed, 1e-10));
    CHECK_NOTHROW(validate(mixed.matrix(), mixed.shape()));

    DiscreteMixtureSpec bad{{{0.7, {rho, sigma}}, {0.5, {sigma, rho}}}};
    CHECK_THROWS_AS(mixture_of_products(bad, false), WeightsInvalid);
    DiscreteMixtureSpec negative{{{1.5, {rho, sigma}}, {-0.5, {sigma, rho}}}};
    CHECK_THROWS_AS(mixture_of_products(negative, false), WeightsInvalid);
    DiscreteMixtureSpec ragged{{{0.5, {rho, sigma}}, {0.5, {sigma}}}};
    CHECK_THROWS(mixture_of_products(ragged, false));

    const double w[2] = {0.4, 0.6};
    const std::vector<DensityOperator> states{rho, sigma};
    const auto mp = mixture_of_powers(w, states, 5);
    CHECK(is_symmetric(mp));
    CHECK_NOTHROW(validate(mp.matrix(), mp.shape()));
}

TEST_CASE("properties of symmetric states") {
    Rng rng(10);
    for (int rep = 0; rep < 5; ++rep) {
        const double w[3] = {0.2, 0.5, 0.3};
        const std::vector<DensityOperator> states{random_density(2, rng), random_density(2, rng),
                                                  random_density(2, rng)};
        const auto rho_n = mixture_of_powers(w, states, 4);

        // Tracing the last site keeps symmetry.
        const auto reduced = DensityOperator::from_trusted(partial_trace(rho_n.matrix(), rho_n.shape(), {4}),
                                                           TensorShape(2, 3));
        CHECK(is_symmetric(reduced, 1e-10, true));

        // Exchangeable expectations
        std::vector<ComplexMatrix> as;
        for (int j = 0; j < 4; ++j) as.push_back(oracle::random_matrix(2, rng));
        const Complex base = oracle::full_trace(rho_n.matrix(), oracle::naive_kron_all(as));
        for (const auto& p : all_permutations(4)) {
            const std::vector<ComplexMatrix> permuted{as[p(1) - 1], as[p(2) - 1], as[p(3) - 1], as[p(4) - 1]};
            CHECK(std::abs(oracle::full_trace(rho_n.matrix(), oracle::naive_kron_all(permuted)) - base) <= 1e-10);
        }
    }
}
