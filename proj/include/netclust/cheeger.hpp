#pragma once

#include <cstddef>

#include "netclust/graph.hpp"

namespace netclust {

struct CheegerResult {
  double value = 0.0;  ///< h_k: minimum over k-partitions of the largest cluster conductance
  Partition argmin;    ///< canonical labels
};

/// Largest graph accepted by the exhaustive search.
inline constexpr std::size_t kMaxCheegerNodes = 14;

/// Exact k-way Cheeger constant by enumerating every set partition of the
/// nodes into k nonempty blocks; partitions with a zero-volume block are
/// skipped. Throws CapacityError above kMaxCheegerNodes and DomainError when
/// no admissible partition exists.
CheegerResult brute_force_cheeger(const Graph& g, std::size_t k);

}  // namespace netclust
