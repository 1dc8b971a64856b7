#include <doctest.h>

#include "oracles.hpp"
#include "qkac/error.hpp"
#include "qkac/linalg.hpp"
#include "qkac/states.hpp"
#include "qkac/tensor.hpp"

using namespace qkac;

TEST_CASE("shape budget") {
    CHECK(TensorShape(2, 12).total_dim() == 4096);
    CHECK_THROWS_AS(TensorShape(2, 13), MemoryBudgetExceeded);
    CHECK_THROWS_AS(TensorShape(3, 8), MemoryBudgetExceeded);
    CHECK(TensorShape(3, 8, 10000).total_dim() == 6561);
    CHECK_THROWS_AS(kron(ComplexMatrix::identity(64), ComplexMatrix::identity(128)), MemoryBudgetExceeded);
}

TEST_CASE("kron") {
    CHECK(kron(ComplexMatrix::identity(2), ComplexMatrix::identity(2)) == ComplexMatrix::identity(4));
    CHECK(max_abs_diff(kron(ComplexMatrix::diagonal({2.0, 3.0}), ComplexMatrix::diagonal({5.0, 7.0})),
                       ComplexMatrix::diagonal({10.0, 14.0, 15.0, 21.0})) == 0.0);
    Rng rng(2);
    const auto a = oracle::random_matrix(3, rng);
    const auto b = oracle::random_matrix(3, rng);
    CHECK(std::abs(trace(kron(a, b)) - trace(a) * trace(b)) < 1e-12);
    CHECK(max_abs_diff(kron(a, b), oracle::naive_kron(a, b)) < 1e-14);
}

TEST_CASE("permutations") {
    CHECK_THROWS_AS(Permutation({1, 1, 3}), BadSiteIndex);
    CHECK_THROWS_AS(Permutation({1, 4, 2}), BadSiteIndex);
    CHECK(all_permutations(4).size() == 24);
    const TensorShape s3(2, 3);
    CHECK(permutation_unitary(Permutation::identity(3), s3) == ComplexMatrix::identity(8));

    const auto swap = permutation_unitary(Permutation::transposition(2, 1, 2), TensorShape(2, 2));
    CHECK(swap(2, 1) == Complex(1.0));  // e0 (x) e1 -> e1 (x) e0
    CHECK(swap == oracle::swap(2));

    const Permutation cycle({2, 3, 1});
    const auto u = permutation_unitary(cycle, s3);
    CHECK(max_abs_diff(u * u * u, ComplexMatrix::identity(8)) == 0.0);

    for (const auto& p : all_permutations(3))
        for (const auto& q : all_permutations(3)) {
            CHECK(permutation_unitary(p, s3) * permutation_unitary(q, s3) == permutation_unitary(p.compose(q), s3));
        }

    // U_pi moves the factor in slot j to slot pi(j).
    Rng rng(4);
    std::vector<ComplexMatrix> fs{oracle::random_matrix(2, rng), oracle::random_matrix(2, rng),
                                  oracle::random_matrix(2, rng)};
    std::vector<ComplexMatrix> moved(3);
    for (int j = 1; j <= 3; ++j) moved[cycle(j) - 1] = fs[j - 1];
    CHECK(max_abs_diff(u * oracle::naive_kron_all(fs) * adjoint(u), oracle::naive_kron_all(moved)) < 1e-12);

    const auto m = oracle::random_matrix(8, rng);
    CHECK(max_abs_diff(conjugate_by_permutation(m, cycle, s3), adjoint(u) * m * u) < 1e-12);
    CHECK_THROWS_AS(permutation_unitary(cycle, TensorShape(2, 2)), DimensionMismatch);
}

TEST_CASE("partial trace") {
    Rng rng(6);
    const auto rho = random_density(2, rng);
    const auto sigma = random_density(3, rng);
    const TensorShape s2(2, 2);

    CHECK(max_abs_diff(partial_trace(kron(rho.matrix(), rho.matrix()), s2, {2}), rho.matrix()) < 1e-15);

    ComplexMatrix bell(4);
    bell(0, 0) = bell(0, 3) = bell(3, 0) = bell(3, 3) = 0.5;
    CHECK(max_abs_diff(partial_trace(bell, s2, {2}), ComplexMatrix::identity(2) * Complex(0.5)) < 1e-15);
    CHECK(max_abs_diff(partial_trace(bell, s2, {1}), ComplexMatrix::identity(2) * Complex(0.5)) < 1e-15);

    const auto m = oracle::random_matrix(4, rng);
    const auto b = oracle::random_matrix(2, rng);
    CHECK(std::abs(trace(partial_trace(m, s2, {2}) * b) - trace(m * kron(b, ComplexMatrix::identity(2)))) < 1e-12);
    CHECK(std::abs(trace(partial_trace(m, s2, {1}) * b) - trace(m * kron(ComplexMatrix::identity(2), b))) < 1e-12);

    const TensorShape s4(2, 4);
    const auto big = oracle::random_matrix(16, rng);
    CHECK(max_abs_diff(partial_trace(big, s4, {}), big) == 0.0);
    CHECK(std::abs(trace(partial_trace(big, s4, {1, 3})) - trace(big)) < 1e-12);
    CHECK(max_abs_diff(partial_trace(big, s4, {3, 4}), oracle::trace_last(big, 2, 2)) < 1e-12);
    // tracing {3} then {2} equals tracing {2, 3}
    const auto step = partial_trace(partial_trace(big, s4, {3}), TensorShape(2, 3), {2});
    CHECK(max_abs_diff(step, partial_trace(big, s4, {2, 3})) <= 1e-12);

    // Mixed local dimension check through a (3 x 3) product
    const auto prod = kron(sigma.matrix(), sigma.matrix());
    CHECK(max_abs_diff(partial_trace(prod, TensorShape(3, 2), {1}), sigma.matrix()) < 1e-15);

    CHECK_THROWS_AS(partial_trace(big, s4, {5}), BadSiteIndex);
    CHECK_THROWS_AS(partial_trace(big, s4, {2, 2}), BadSiteIndex);
    CHECK_THROWS_AS(partial_trace(m, s4, {1}), DimensionMismatch);

    // partial trace of a density is a density
    const auto r4 = random_density(16, rng);
    CHECK_NOTHROW(validate(partial_trace(r4.matrix(), s4, {2, 4}), TensorShape(2, 2)));
}

TEST_CASE("one-body embedding") {
    Rng rng(9);
    const auto a = oracle::random_matrix(2, rng);
    CHECK(embed_one_body(a, 1, TensorShape(2, 1)) == a);
    CHECK(embed_one_body(ComplexMatrix::diagonal({1.0, 0.0}), 2, TensorShape(2, 2)) ==
          ComplexMatrix::diagonal({1.0, 0.0, 1.0, 0.0}));
    const TensorShape s3(2, 3);
    const auto i2 = ComplexMatrix::identity(2);
    CHECK(max_abs_diff(embed_one_body(a, 2, s3), oracle::naive_kron_all({i2, a, i2})) == 0.0);
    CHECK(std::abs(operator_norm(embed_one_body(a, 3, s3)) - operator_norm(a)) < 1e-10);
    CHECK_THROWS_AS(embed_one_body(a, 0, s3), BadSiteIndex);
    CHECK_THROWS_AS(embed_one_body(a, 4, s3), BadSiteIndex);

    const auto m = oracle::random_matrix(8, rng);
    for (int j = 1; j <= 3; ++j)
        CHECK(max_abs_diff(apply_one_body(a, j, s3, m), embed_one_body(a, j, s3) * m) < 1e-12);
}

TEST_CASE("two-body embedding") {
    Rng rng(10);
    const auto v = oracle::random_matrix(4, rng);
    CHECK(embed_two_body(v, 1, 2, TensorShape(2, 2)) == v);
    CHECK(max_abs_diff(embed_two_body(v, 2, 1, TensorShape(2, 2)), oracle::swap(2) * v * oracle::swap(2)) < 1e-15);
    CHECK(embed_two_body(ComplexMatrix::identity(4), 3, 1, TensorShape(2, 3)) == ComplexMatrix::identity(8));
    CHECK_THROWS_AS(embed_two_body(v, 2, 2, TensorShape(2, 3)), SameSite);
    CHECK_THROWS_AS(embed_two_body(v, 1, 4, TensorShape(2, 3)), BadSiteIndex);

    const TensorShape s4(2, 4);
    // Two different permutations with pi(2) = 1, pi(3) = 2.
    const auto a = embed_two_body_by_permutation(v, Permutation({3, 1, 2, 4}), s4);
    const auto b = embed_two_body_by_permutation(v, Permutation({4, 1, 2, 3}), s4);
    CHECK(max_abs_diff(a, b) == 0.0);
    CHECK(max_abs_diff(a, embed_two_body(v, 2, 3, s4)) == 0.0);
    // V_23 on four sites from its definition: 1 (x) V (x) 1
    const auto i2 = ComplexMatrix::identity(2);
    CHECK(max_abs_diff(a, oracle::naive_kron_all({i2, v, i2})) < 1e-15);

    // Covariance: U_s^dagger V_ij U_s = V_{s^-1(i) s^-1(j)}
    for (const auto& s : all_permutations(4)) {
        const auto lhs = conjugate_by_permutation(embed_two_body(v, 1, 3, s4), s, s4);
        const auto inv = s.inverse();
        CHECK(max_abs_diff(lhs, embed_two_body(v, inv(1), inv(3), s4)) < 1e-15);
    }
}

TEST_CASE("empirical observable") {
    const TensorShape s3(2, 3);
    CHECK(max_abs_diff(empirical_observable(ComplexMatrix::identity(2), s3), ComplexMatrix::identity(8)) < 1e-15);
    Rng rng(12);
    const auto a = oracle::random_matrix(2, rng);
    CHECK(max_abs_diff(empirical_observable(a, TensorShape(2, 1)), a) < 1e-15);
    CHECK(operator_norm(empirical_observable(a, s3)) <= operator_norm(a) + 1e-12);

    // diag(1, 0) counts zero bits of the basis index
    const auto x = empirical_observable(ComplexMatrix::diagonal({1.0, 0.0}), s3);
    for (std::size_t r = 0; r < 8; ++r)
        for (std::size_t c = 0; c < 8; ++c) {
            const int zeros = 3 - __builtin_popcount(static_cast<unsigned>(r));
            CHECK(std::abs(x(r, c) - Complex(r == c ? zeros / 3.0 : 0.0)) < 1e-15);
        }
}

TEST_CASE("permutations fix tensor powers") {
    Rng rng(14);
    const auto rho = random_density(2, rng);
    const TensorShape s3(2, 3);
    const auto p = tensor_power(rho.matrix(), 3);
    for (const auto& pi : all_permutations(3)) {
        const auto u = permutation_unitary(pi, s3);
        CHECK(max_abs_diff(adjoint(u) * p * u, p) <= 1e-12);
    }
}
