#include "cssdpp/subsets.hpp"

#include "cssdpp/error.hpp"

#include <limits>
#include <numeric>

namespace cssdpp {

std::uint64_t binomial(Index n, Index k) {
  if (k < 0 || n < 0 || k > n) {
    return 0;
  }
  k = std::min(k, n - k);
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t result = 1;
  for (Index i = 1; i <= k; ++i) {
    // result * (n - k + i) / i is exact at every step; divide by the gcd first
    // so the intermediate product overflows only if the result does.
    std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    std::uint64_t den = static_cast<std::uint64_t>(i);
    const std::uint64_t g = std::gcd(result, den);
    result /= g;
    den /= g;
    num /= den;
    if (result > kMax / num) {
      return kMax;
    }
    result *= num;
  }
  return result;
}

std::vector<Index> first_combination(Index k) {
  std::vector<Index> subset(static_cast<std::size_t>(k));
  std::iota(subset.begin(), subset.end(), Index{0});
  return subset;
}

bool next_combination(std::vector<Index>& subset, Index n) {
  const Index k = static_cast<Index>(subset.size());
  Index i = k - 1;
  while (i >= 0 && subset[static_cast<std::size_t>(i)] == n - k + i) {
    --i;
  }
  if (i < 0) {
    return false;
  }
  ++subset[static_cast<std::size_t>(i)];
  for (Index j = i + 1; j < k; ++j) {
    subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
  }
  return true;
}

std::uint64_t rank_combination(const std::vector<Index>& subset, Index n) {
  const Index k = static_cast<Index>(subset.size());
  std::uint64_t rank = 0;
  Index prev = -1;
  for (Index pos = 0; pos < k; ++pos) {
    const Index c = subset[static_cast<std::size_t>(pos)];
    for (Index v = prev + 1; v < c; ++v) {
      rank += binomial(n - v - 1, k - pos - 1);
    }
    prev = c;
  }
  return rank;
}

std::vector<Index> unrank_combination(std::uint64_t rank, Index n, Index k) {
  if (rank >= binomial(n, k)) {
    throw InputError("combination rank out of range");
  }
  std::vector<Index> subset;
  subset.reserve(static_cast<std::size_t>(k));
  Index v = 0;
  for (Index pos = 0; pos < k; ++pos) {
    for (;; ++v) {
      const std::uint64_t block = binomial(n - v - 1, k - pos - 1);
      if (rank < block) {
        break;
      }
      rank -= block;
    }
    subset.push_back(v++);
  }
  return subset;
}

}  // namespace cssdpp
