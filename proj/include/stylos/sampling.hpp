#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace stylos {

// Independent, reproducible random stream for (seed, stream index).
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

// Fisher-Yates with an explicit uniform draw, so results do not depend on the
// standard library's std::shuffle implementation.
template <typename T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(v[i - 1], v[pick(rng)]);
  }
}

struct HoldoutIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Per class c with count n_c, round(n_c * test_fraction) members go to test.
// Both index lists are returned in ascending order.
HoldoutIndices stratified_holdout(const std::vector<int>& labels, double test_fraction,
                                  std::uint64_t seed);

// Fold id per sample; each class is shuffled and dealt round-robin.
std::vector<int> stratified_folds(const std::vector<int>& labels, int folds, std::uint64_t seed);

}  // namespace stylos
