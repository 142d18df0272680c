#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "ndjac/linalg.hpp"

namespace ndjac {

using Rng = std::mt19937_64;

/// Independent generator for one (seed, stream, index) triple. Every trial
/// or evaluation point owns one, so results do not depend on scheduling.
Rng substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

/// Stable 64-bit FNV-1a hash, used to name streams.
std::uint64_t stable_hash(std::string_view text) noexcept;

double uniform(Rng& rng, double lo, double hi);
double standard_normal(Rng& rng);

/// Matrix with independent N(0, 1) real coefficients.
Mat gaussian_matrix(Algebra kind, std::size_t rows, std::size_t cols, Rng& rng);

}  // namespace ndjac
