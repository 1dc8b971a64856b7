#pragma once

#include <cstdint>
#include <random>

#include "qkac/matrix.hpp"

namespace qkac {

/// SplitMix64 finalizer; a bijective mix of a 64-bit word.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based sub-seed: depends only on (master, stream, counter).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                    std::uint64_t counter = 0) noexcept {
    return splitmix64(splitmix64(master ^ splitmix64(stream)) + counter);
}

using Rng = std::mt19937_64;

/// d x d matrix of i.i.d. standard complex Gaussians (E|z|^2 = 1).
ComplexMatrix ginibre(std::size_t d, Rng& rng);

/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
ComplexMatrix random_unitary(std::size_t d, Rng& rng);

}  // namespace qkac
