#include "ness/trees.hpp"

#include "ness/errors.hpp"

#include <limits>
#include <numeric>
#include <string>

namespace ness {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (b != 0 && a > std::numeric_limits<std::uint64_t>::max() / b)
    throw InvalidArgument("combinatorial count overflows 64 bits");
  return a * b;
}

// C(n, k) by the multiplicative formula; exact at every step.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n)
    return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    const std::uint64_t g = std::gcd(r, i);
    r = checked_mul(r / g, (n - k + i) / (i / g));
  }
  return r;
}

} // namespace

std::uint64_t tree_count(std::span<const int> incidence) {
  if (incidence.size() < 2)
    throw InvalidIncidence("a tree profile needs at least two vertices");
  const auto m = static_cast<long>(incidence.size()) - 1;
  long sum = 0;
  for (int e : incidence) {
    if (e < 1)
      throw InvalidIncidence("every vertex of a tree has degree >= 1, got " + std::to_string(e));
    sum += e;
  }
  if (sum != 2 * m)
    throw InvalidIncidence("degrees sum to " + std::to_string(sum) + ", a tree on " +
                           std::to_string(m + 1) + " vertices needs " + std::to_string(2 * m));
  // Multinomial (m-1)! / prod (e_j - 1)! as a product of binomials.
  std::uint64_t count = 1;
  std::uint64_t placed = 0;
  for (int e : incidence) {
    const auto k = static_cast<std::uint64_t>(e - 1);
    placed += k;
    count = checked_mul(count, binomial(placed, k));
  }
  return count;
}

std::map<std::vector<int>, std::uint64_t> tree_enumerate(int m) {
  if (m < 1 || m > 8)
    throw InvalidArgument("tree enumeration supports 1 <= m <= 8");
  const int vertices = m + 1;
  const int length = m - 1;
  std::map<std::vector<int>, std::uint64_t> tally;
  // Each Pruefer sequence of length m - 1 over m + 1 labels is one tree; vertex
  // j has degree 1 + (occurrences of j).
  std::vector<int> seq(static_cast<std::size_t>(length), 0);
  std::vector<int> degree(static_cast<std::size_t>(vertices), 1);
  degree[0] += length;
  while (true) {
    ++tally[degree];
    int pos = length - 1;
    while (pos >= 0) {
      auto &s = seq[static_cast<std::size_t>(pos)];
      --degree[static_cast<std::size_t>(s)];
      if (++s < vertices) {
        ++degree[static_cast<std::size_t>(s)];
        break;
      }
      s = 0;
      ++degree[0];
      --pos;
    }
    if (pos < 0)
      break;
  }
  return tally;
}

std::uint64_t incidence_sum_identity(int n) {
  if (n < 0 || n > 31)
    throw InvalidArgument("incidence sum supports 0 <= N <= 31");
  const auto two_n = static_cast<std::uint64_t>(2 * n);
  std::uint64_t sum = 0;
  for (std::uint64_t e = 0; e <= two_n; ++e)
    sum += binomial(two_n, e);
  const std::uint64_t expected = std::uint64_t{1} << two_n;
  if (sum != expected)
    throw BoundViolated("sum of C(2N, e) = " + std::to_string(sum) + " differs from 4^N = " +
                        std::to_string(expected));
  return sum;
}

} // namespace ness
