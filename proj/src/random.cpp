#include "qkac/random.hpp"

#include <cmath>

namespace qkac {

ComplexMatrix ginibre(std::size_t d, Rng& rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    ComplexMatrix g(d);
    for (auto& z : g.data()) {
        const double re = normal(rng);
        const double im = normal(rng);
        z = Complex(re, im);
    }
    return g;
}

ComplexMatrix random_unitary(std::size_t d, Rng& rng) {
    ComplexMatrix q = ginibre(d, rng);
    // Modified Gram-Schmidt on columns; the diagonal of R is real positive,
    // which makes the distribution Haar.
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t j = 0; j < k; ++j) {
            Complex proj = 0.0;
            for (std::size_t r = 0; r < d; ++r) proj += std::conj(q(r, j)) * q(r, k);
            for (std::size_t r = 0; r < d; ++r) q(r, k) -= proj * q(r, j);
        }
        double norm = 0.0;
        for (std::size_t r = 0; r < d; ++r) norm += std::norm(q(r, k));
        norm = std::sqrt(norm);
        for (std::size_t r = 0; r < d; ++r) q(r, k) /= norm;
    }
    return q;
}

}  // namespace qkac
