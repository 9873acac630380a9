#pragma once

#include <cstddef>
#include <cstdint>

#include "quadboost/data.hpp"

namespace quadboost {

/// Standard-normal features with labels sign(w . x + noise), w drawn from the
/// same seed. noise_std = 0 gives a linearly separable sample.
Dataset make_noisy_linear(std::size_t m, std::size_t attributes, double noise_std,
                          std::uint64_t seed);

}  // namespace quadboost
