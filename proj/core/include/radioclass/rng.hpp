#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace radioclass {

// All randomness flows through generators made here, keyed by
// (seed, purpose). Distinct purposes give independent streams, so adding a
// consumer never perturbs existing ones.
std::mt19937_64 make_rng(uint64_t seed, std::string_view purpose);

uint64_t fnv1a64(std::string_view text);

// Uniform in [0, 1). Derived from raw engine output so results do not
// depend on the standard library's distribution internals.
double uniform_unit(std::mt19937_64& rng);

// Uniform integer in [0, n). Rejection sampling, no modulo bias.
uint64_t uniform_index(std::mt19937_64& rng, uint64_t n);

// Standard normal via Box-Muller.
double gaussian(std::mt19937_64& rng);

template <typename T>
void shuffle_inplace(std::vector<T>& items, std::mt19937_64& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(uniform_index(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace radioclass
