#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace quadboost {

/// Portable pseudo-random stream.
///
/// std::mt19937_64 and std::seed_seq are fully specified by the standard, but
/// the std:: distributions and std::shuffle are not. Everything that has to be
/// reproducible across standard libraries goes through the members below,
/// which only consume raw engine output.
class Rng {
public:
    /// `stream` separates independent consumers sharing one user seed
    /// (split, folds, Rademacher draw k, ...).
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t uniform_index(std::uint64_t bound);

    /// Uniform real in [0, 1) with 53 random bits.
    double uniform01();

    /// Uniform +1/-1.
    int sign() { return (engine_() >> 63) != 0 ? 1 : -1; }

    /// Standard normal via Box-Muller.
    double normal();

    /// Uniformly random permutation of 0..n-1 (Fisher-Yates).
    std::vector<std::size_t> permutation(std::size_t n);

private:
    std::mt19937_64 engine_;
};

// Stream tags for the consumers inside the library.
namespace streams {
inline constexpr std::uint64_t split = 0x5350'4c49'54ULL;
inline constexpr std::uint64_t folds = 0x464f'4c44'53ULL;
inline constexpr std::uint64_t rademacher = 0x5241'4445'4dULL;
inline constexpr std::uint64_t synthetic = 0x5359'4e54'48ULL;
}  // namespace streams

}  // namespace quadboost
