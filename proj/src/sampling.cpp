#include "stylos/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace stylos {

namespace {

std::map<int, std::vector<std::size_t>> group_by_label(const std::vector<int>& labels) {
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
  return groups;
}

}  // namespace

HoldoutIndices stratified_holdout(const std::vector<int>& labels, double test_fraction,
                                  std::uint64_t seed) {
  HoldoutIndices out;
  auto rng = make_rng(seed, 0x5917);
  for (auto& [label, members] : group_by_label(labels)) {
    auto n_test = static_cast<std::size_t>(
        std::lround(static_cast<double>(members.size()) * test_fraction));
    n_test = std::min(n_test, members.size());
    seeded_shuffle(members, rng);
    out.test.insert(out.test.end(), members.begin(), members.begin() + n_test);
    out.train.insert(out.train.end(), members.begin() + n_test, members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::vector<int> stratified_folds(const std::vector<int>& labels, int folds, std::uint64_t seed) {
  std::vector<int> fold_of(labels.size(), 0);
  auto rng = make_rng(seed, 0xf01d);
  int offset = 0;
  for (auto& [label, members] : group_by_label(labels)) {
    seeded_shuffle(members, rng);
    for (std::size_t i = 0; i < members.size(); ++i) {
      fold_of[members[i]] = static_cast<int>((i + static_cast<std::size_t>(offset)) % folds);
    }
    // Rotate the starting fold so small classes do not all pile into fold 0.
    offset = static_cast<int>((offset + members.size()) % static_cast<std::size_t>(folds));
  }
  return fold_of;
}

}  // namespace stylos
