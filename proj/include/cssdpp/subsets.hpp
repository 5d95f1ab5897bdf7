#pragma once

#include "cssdpp/types.hpp"

#include <cstdint>
#include <vector>

namespace cssdpp {

/// C(n, k) as an exact integer, saturating at UINT64_MAX.
std::uint64_t binomial(Index n, Index k);

/// {0, ..., k-1}, the lexicographically first k-subset.
std::vector<Index> first_combination(Index k);

/// Advances to the next k-subset of [0, n) in lexicographic order.
/// Returns false (leaving `subset` unspecified) after the last one.
bool next_combination(std::vector<Index>& subset, Index n);

/// Position of a sorted k-subset of [0, n) in lexicographic order.
std::uint64_t rank_combination(const std::vector<Index>& subset, Index n);

/// Inverse of rank_combination.
std::vector<Index> unrank_combination(std::uint64_t rank, Index n, Index k);

}  // namespace cssdpp
