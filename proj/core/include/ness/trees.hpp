#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace ness {

/// Labeled trees on vertices 0..m with vertex j of degree e_j:
/// (m-1)! / prod_j (e_j - 1)!. Throws InvalidIncidence unless sum e = 2m, all e >= 1.
std::uint64_t tree_count(std::span<const int> incidence);

/// All labeled trees on m + 1 vertices (m <= 8), tallied by degree profile.
std::map<std::vector<int>, std::uint64_t> tree_enumerate(int m);

/// sum_{e=0}^{2N} C(2N, e); throws BoundViolated if it differs from 4^N.
std::uint64_t incidence_sum_identity(int n);

} // namespace ness
