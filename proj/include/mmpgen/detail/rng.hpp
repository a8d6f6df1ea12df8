// Deterministic random helpers. The std:: distributions and std::shuffle are
// implementation-defined, so seeded pipelines that must be byte-reproducible
// use these instead; mt19937_64 itself is fully specified by the standard.

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace mmpgen::detail {

inline double uniform_unit(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Uniform in [-1, 1).
inline double uniform_symmetric(std::mt19937_64& gen) {
  return 2.0 * uniform_unit(gen) - 1.0;
}

inline std::size_t uniform_below(std::mt19937_64& gen, std::size_t n) {
  // Modulo bias is < 2^-40 for any n we ever pass; irrelevant for shuffling.
  return static_cast<std::size_t>(gen() % n);
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& gen) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = uniform_below(gen, i);
    std::swap(v[i - 1], v[j]);
  }
}

// First-k of a seeded shuffle, order of survivors restored to input order.
inline std::vector<std::size_t> choose_k(std::size_t n, std::size_t k,
                                         std::mt19937_64& gen) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  shuffle(idx, gen);
  if (k < n) idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace mmpgen::detail
