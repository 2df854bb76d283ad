#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qfa {

/// Ordered fingerprint moduli: the first N odd primes, 3, 5, 7, ...
/// Two is excluded so that the per-prime division step stays reversible.
struct PrimeSet {
  std::vector<int> primes;

  int count() const { return static_cast<int>(primes.size()); }
  long long sum() const {
    long long s = 0;
    for (int p : primes) s += p;
    return s;
  }
};

/// Returns the first `count` odd primes in increasing order (p_1 = 3).
inline PrimeSet odd_primes(int count) {
  if (count < 0) throw std::invalid_argument("odd_primes: count must be >= 0");
  PrimeSet set;
  set.primes.reserve(count);
  int candidate = 3;
  while (static_cast<int>(set.primes.size()) < count) {
    bool prime = true;
    for (int q : set.primes) {
      if (static_cast<long long>(q) * q > candidate) break;
      if (candidate % q == 0) {
        prime = false;
        break;
      }
    }
    if (prime) set.primes.push_back(candidate);
    candidate += 2;
  }
  return set;
}

/// Worst-case fingerprint collision statistics for n-bit integers.
/// `max_common` is the largest number of distinct odd primes that can all
/// divide the difference of two distinct n-bit values; `witness` is the
/// smallest difference attaining it.
struct CollisionStats {
  int bit_length = 0;
  int max_common = 0;
  std::uint64_t witness = 0;
};

/// Exhaustive scan over all differences d in [1, 2^n). Counts distinct odd
/// prime divisors with an additive sieve. n is capped at 24 to keep the
/// scan in memory and under a second.
inline CollisionStats max_common_primes(int n) {
  if (n < 1 || n > 24)
    throw std::out_of_range("max_common_primes: bit length must be in [1, 24], got " +
                            std::to_string(n));
  const std::uint32_t limit = 1u << n;  // differences are < 2^n
  std::vector<std::uint8_t> omega(limit, 0);
  std::vector<bool> composite(limit, false);
  for (std::uint32_t p = 3; p < limit; p += 2) {
    if (composite[p]) continue;
    for (std::uint32_t m = p; m < limit; m += p) {
      ++omega[m];
      if (m > p) composite[m] = true;
    }
  }
  CollisionStats stats;
  stats.bit_length = n;
  stats.witness = 1;
  for (std::uint32_t d = 1; d < limit; ++d) {
    if (omega[d] > stats.max_common) {
      stats.max_common = omega[d];
      stats.witness = d;
    }
  }
  return stats;
}

/// Exact fraction, kept reduced. Enough for the N0/N error bounds; never
/// sees numbers beyond desk scale.
struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n, long long d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

/// Worst-case error rate of the prime-fingerprint equality test with
/// `n_primes` moduli when at most `n0` of them can collide.
inline Rational error_bound(int n0, int n_primes) {
  if (n_primes < 1) throw std::invalid_argument("error_bound: need at least one prime");
  if (n0 < 0 || n0 > n_primes)
    throw std::invalid_argument("error_bound: collision count out of range");
  return Rational(n0, n_primes);
}

/// One step of long division by p reading one more bit: j -> (2j + bit) mod p.
/// A bijection on [0, p) for odd p and fixed bit.
inline int forward_div_step(int p, int j, int bit) {
  if (j < 0 || j >= p) throw std::invalid_argument("forward_div_step: residue out of range");
  if (bit != 0 && bit != 1) throw std::invalid_argument("forward_div_step: bit must be 0 or 1");
  return (2 * j + bit) % p;
}

/// Inverse of forward_div_step for the same bit: the unique j' with
/// (2j' + bit) mod p == j. Halving works because p is odd.
inline int reverse_div_step(int p, int j, int bit) {
  if (j < 0 || j >= p) throw std::invalid_argument("reverse_div_step: residue out of range");
  if (bit != 0 && bit != 1) throw std::invalid_argument("reverse_div_step: bit must be 0 or 1");
  // 2j' = j - bit (mod p); j - bit is in [-1, p), so adding p at most once
  // makes it even and nonnegative.
  const int shifted = j - bit;
  const int even = (shifted >= 0 && shifted % 2 == 0) ? shifted : shifted + p;
  return even / 2;
}

/// Residue of the binary string (most significant bit first) mod p, by
/// iterating forward_div_step from 0. Equals value(bits) mod p.
inline int residue_of_word(int p, std::string_view bits) {
  int j = 0;
  for (char c : bits) {
    if (c != '0' && c != '1')
      throw std::invalid_argument(std::string("residue_of_word: non-binary character '") + c +
                                  "'");
    j = forward_div_step(p, j, c - '0');
  }
  return j;
}

}  // namespace qfa
