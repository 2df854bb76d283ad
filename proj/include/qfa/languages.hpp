#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qfa/numbers.hpp"

namespace qfa {

namespace detail {
inline bool all_bits(std::string_view s) {
  for (char c : s)
    if (c != '0' && c != '1') return false;
  return true;
}
inline std::string reversed(std::string_view s) { return std::string(s.rbegin(), s.rend()); }
}  // namespace detail

/// A word parsed against the exact k-block shape
/// w1 # w2 ## w3 # w4 ( ### next block )* #, every w of length exactly n.
struct BlockString {
  std::string raw;
  int n = 0;
  std::vector<std::array<std::string, 4>> blocks;
};

/// Exact-shape parse; nullopt on any deviation (wrong lengths, misplaced
/// separators, non-binary characters).
inline std::optional<BlockString> parse_block_string(std::string_view word, int n, int k) {
  if (n < 1 || k < 1) return std::nullopt;
  const std::size_t block_len = 4 * static_cast<std::size_t>(n) + 4;
  const std::size_t expected = static_cast<std::size_t>(k) * (block_len + 3) - 2;
  if (word.size() != expected) return std::nullopt;
  BlockString out;
  out.raw = std::string(word);
  out.n = n;
  std::size_t pos = 0;
  auto take_bits = [&](std::string& dst) {
    dst = std::string(word.substr(pos, n));
    pos += n;
    return detail::all_bits(dst);
  };
  auto take_sharps = [&](int count) {
    for (int i = 0; i < count; ++i, ++pos)
      if (pos >= word.size() || word[pos] != '#') return false;
    return true;
  };
  for (int b = 0; b < k; ++b) {
    std::array<std::string, 4> quad;
    if (!take_bits(quad[0]) || !take_sharps(1) || !take_bits(quad[1]) || !take_sharps(2) ||
        !take_bits(quad[2]) || !take_sharps(1) || !take_bits(quad[3]))
      return std::nullopt;
    if (!take_sharps(b + 1 == k ? 1 : 3)) return std::nullopt;
    out.blocks.push_back(std::move(quad));
  }
  return pos == word.size() ? std::optional<BlockString>(std::move(out)) : std::nullopt;
}

/// w # w^R with |w| = n. Malformed words are simply not members.
inline bool in_l0(std::string_view word, int n) {
  if (n < 1 || word.size() != 2 * static_cast<std::size_t>(n) + 1) return false;
  if (word[n] != '#') return false;
  const std::string_view w = word.substr(0, n);
  const std::string_view rest = word.substr(n + 1);
  if (!detail::all_bits(w) || !detail::all_bits(rest)) return false;
  return detail::reversed(w) == rest;
}

/// w1 # w2 ## w3 # w4 # with (w1 = w2^R) or (w1w2 = (w3w4)^R).
inline bool in_l1(std::string_view word, int n) {
  const auto parsed = parse_block_string(word, n, 1);
  if (!parsed) return false;
  const auto& q = parsed->blocks[0];
  return q[0] == detail::reversed(q[1]) || q[0] + q[1] == detail::reversed(q[2] + q[3]);
}

/// The k-block iterated language: some block j satisfies w_j1 = w_j2^R and
/// every earlier block satisfies the long match w_i1 w_i2 = (w_i3 w_i4)^R.
inline bool in_l2(std::string_view word, int n, int k) {
  const auto parsed = parse_block_string(word, n, k);
  if (!parsed) return false;
  for (const auto& q : parsed->blocks) {
    if (q[0] == detail::reversed(q[1])) return true;
    if (q[0] + q[1] != detail::reversed(q[2] + q[3])) return false;
  }
  return false;
}

enum class InstanceKind { Member, NonMember, Adversarial };

inline const char* instance_kind_name(InstanceKind k) {
  switch (k) {
    case InstanceKind::Member: return "member";
    case InstanceKind::NonMember: return "nonmember";
    case InstanceKind::Adversarial: return "adversarial";
  }
  return "?";
}

inline InstanceKind instance_kind_from_name(std::string_view name) {
  if (name == "member") return InstanceKind::Member;
  if (name == "nonmember") return InstanceKind::NonMember;
  if (name == "adversarial") return InstanceKind::Adversarial;
  throw std::invalid_argument("unknown instance kind \"" + std::string(name) + "\"");
}

namespace detail {

inline std::string bits_of_value(std::uint64_t v, int n) {
  std::string s(n, '0');
  for (int i = n - 1; i >= 0; --i, v >>= 1) s[i] = static_cast<char>('0' + (v & 1));
  return s;
}

inline std::uint64_t value_of_bits(std::string_view s) {
  std::uint64_t v = 0;
  for (char c : s) v = (v << 1) | static_cast<std::uint64_t>(c - '0');
  return v;
}

inline std::string random_bits(std::mt19937_64& rng, int n) {
  std::string s(n, '0');
  for (char& c : s) c = static_cast<char>('0' + (rng() & 1));
  return s;
}

/// A pair (x, y) with |value(x) - value(y^R)| equal to the worst-case
/// collision witness, so the fingerprint check collides on the maximal
/// number of primes.
inline std::pair<std::string, std::string> adversarial_pair(std::mt19937_64& rng, int n,
                                                            std::uint64_t witness) {
  const std::uint64_t limit = std::uint64_t{1} << n;
  std::uniform_int_distribution<std::uint64_t> dist(0, limit - 1 - witness);
  const std::uint64_t lo = dist(rng);
  const std::uint64_t hi = lo + witness;
  const bool swap = (rng() & 1) != 0;
  const std::uint64_t x = swap ? hi : lo;
  const std::uint64_t y_reversed = swap ? lo : hi;
  return {bits_of_value(x, n), reversed(bits_of_value(y_reversed, n))};
}

}  // namespace detail

/// Deterministic instance generator. k = 0 produces single-pair words
/// x # y for the pair language; k >= 1 produces exact k-block words.
/// Member and nonmember outputs are verified against the membership
/// oracles; adversarial outputs are nonmembers built from the collision
/// witnesses of max_common_primes, maximizing the machines' error.
inline std::vector<std::string> gen_instances(int n, int k, InstanceKind kind, int count,
                                              std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_instances: n must be >= 1");
  if (k < 0) throw std::invalid_argument("gen_instances: k must be >= 0");
  if (count < 0) throw std::invalid_argument("gen_instances: count must be >= 0");
  if (kind == InstanceKind::Adversarial) {
    // Witness lookup bounds: differ-by-witness pairs need the brute-force
    // oracle at n (and 2n for the block shape).
    max_common_primes(n);
    if (k >= 1) max_common_primes(2 * n);
  }

  std::mt19937_64 rng(seed);
  const std::uint64_t witness_n =
      kind == InstanceKind::Adversarial ? max_common_primes(n).witness : 0;
  const std::uint64_t witness_2n =
      (kind == InstanceKind::Adversarial && k >= 1) ? max_common_primes(2 * n).witness : 0;

  auto random_block = [&](bool long_match, bool allow_short_match) {
    std::array<std::string, 4> q;
    q[0] = detail::random_bits(rng, n);
    do {
      q[1] = detail::random_bits(rng, n);
    } while (!allow_short_match && q[0] == detail::reversed(q[1]));
    if (long_match) {
      const std::string rev = detail::reversed(q[0] + q[1]);
      q[2] = rev.substr(0, n);
      q[3] = rev.substr(n, n);
    } else {
      do {
        q[2] = detail::random_bits(rng, n);
        q[3] = detail::random_bits(rng, n);
      } while (q[0] + q[1] == detail::reversed(q[2] + q[3]));
    }
    return q;
  };

  auto adversarial_block = [&] {
    std::array<std::string, 4> q;
    auto [x, y] = detail::adversarial_pair(rng, n, witness_n);
    q[0] = x;
    q[1] = y;
    // Make the concatenation fingerprint collide maximally too, when the
    // 2n-bit witness offset stays representable from this prefix value.
    const std::uint64_t v12 = detail::value_of_bits(q[0] + q[1]);
    const std::uint64_t limit = std::uint64_t{1} << (2 * n);
    if (v12 >= witness_2n || v12 + witness_2n < limit) {
      const std::uint64_t v34r = v12 >= witness_2n ? v12 - witness_2n : v12 + witness_2n;
      const std::string w34 = detail::reversed(detail::bits_of_value(v34r, 2 * n));
      q[2] = w34.substr(0, n);
      q[3] = w34.substr(n, n);
    } else {
      do {
        q[2] = detail::random_bits(rng, n);
        q[3] = detail::random_bits(rng, n);
      } while (q[0] + q[1] == detail::reversed(q[2] + q[3]));
    }
    return q;
  };

  auto emit_blocks = [&](const std::vector<std::array<std::string, 4>>& blocks) {
    std::string word;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const auto& q = blocks[i];
      word += q[0] + "#" + q[1] + "##" + q[2] + "#" + q[3];
      word += (i + 1 == blocks.size()) ? "#" : "###";
    }
    return word;
  };

  std::vector<std::string> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    std::string word;
    if (k == 0) {
      switch (kind) {
        case InstanceKind::Member: {
          const std::string w = detail::random_bits(rng, n);
          word = w + "#" + detail::reversed(w);
          break;
        }
        case InstanceKind::NonMember: {
          std::string x = detail::random_bits(rng, n), y;
          do {
            y = detail::random_bits(rng, n);
          } while (y == detail::reversed(x));
          word = x + "#" + y;
          break;
        }
        case InstanceKind::Adversarial: {
          auto [x, y] = detail::adversarial_pair(rng, n, witness_n);
          word = x + "#" + y;
          break;
        }
      }
      if ((kind == InstanceKind::Member) != in_l0(word, n))
        throw std::logic_error("gen_instances: generated word fails its own oracle");
    } else {
      std::vector<std::array<std::string, 4>> blocks;
      switch (kind) {
        case InstanceKind::Member: {
          const int j = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(k));
          for (int b = 1; b <= k; ++b) {
            if (b < j)
              blocks.push_back(random_block(/*long_match=*/true, /*allow_short_match=*/true));
            else if (b == j) {
              std::array<std::string, 4> q;
              q[0] = detail::random_bits(rng, n);
              q[1] = detail::reversed(q[0]);
              q[2] = detail::random_bits(rng, n);
              q[3] = detail::random_bits(rng, n);
              blocks.push_back(std::move(q));
            } else {
              std::array<std::string, 4> q;
              for (auto& w : q) w = detail::random_bits(rng, n);
              blocks.push_back(std::move(q));
            }
          }
          break;
        }
        case InstanceKind::NonMember: {
          const int b0 = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(k));
          for (int b = 1; b <= k; ++b) {
            if (b < b0)
              blocks.push_back(random_block(/*long_match=*/true, /*allow_short_match=*/false));
            else if (b == b0)
              blocks.push_back(random_block(/*long_match=*/false, /*allow_short_match=*/false));
            else {
              std::array<std::string, 4> q;
              do {
                for (auto& w : q) w = detail::random_bits(rng, n);
              } while (q[0] == detail::reversed(q[1]));
              blocks.push_back(std::move(q));
            }
          }
          break;
        }
        case InstanceKind::Adversarial:
          for (int b = 1; b <= k; ++b) blocks.push_back(adversarial_block());
          break;
      }
      word = emit_blocks(blocks);
      if ((kind == InstanceKind::Member) != in_l2(word, n, k))
        throw std::logic_error("gen_instances: generated word fails its own oracle");
    }
    out.push_back(std::move(word));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corpus files: one word per line over {0,1,#}; "# key=value" header
// comments record n, k, kind and seed. Lines are comments only when the
// '#' is followed by a space, so sharp-only words stay unambiguous.
// ---------------------------------------------------------------------------

struct CorpusMeta {
  int n = 0;
  int k = 0;
  std::string kind;
  std::uint64_t seed = 0;
};

struct Corpus {
  CorpusMeta meta;
  std::vector<std::string> words;
};

inline void write_corpus(std::ostream& out, const CorpusMeta& meta,
                         const std::vector<std::string>& words) {
  out << "# n=" << meta.n << "\n# k=" << meta.k << "\n# kind=" << meta.kind
      << "\n# seed=" << meta.seed << "\n";
  for (const auto& w : words) out << w << "\n";
}

inline void write_corpus(const std::string& path, const CorpusMeta& meta,
                         const std::vector<std::string>& words) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_corpus(out, meta, words);
}

inline Corpus read_corpus(std::istream& in) {
  Corpus corpus;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.size() >= 2 && line[0] == '#' && line[1] == ' ') {
      std::istringstream fields(line.substr(2));
      std::string field;
      while (fields >> field) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = field.substr(0, eq);
        const std::string value = field.substr(eq + 1);
        try {
          if (key == "n") corpus.meta.n = std::stoi(value);
          else if (key == "k") corpus.meta.k = std::stoi(value);
          else if (key == "kind") corpus.meta.kind = value;
          else if (key == "seed") corpus.meta.seed = std::stoull(value);
        } catch (const std::exception&) {
          throw std::invalid_argument("corpus header: bad value in \"" + line + "\"");
        }
      }
      continue;
    }
    for (char c : line)
      if (c != '0' && c != '1' && c != '#')
        throw std::invalid_argument("corpus: invalid character '" + std::string(1, c) +
                                    "' in word \"" + line + "\"");
    corpus.words.push_back(line);
  }
  return corpus;
}

inline Corpus read_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_corpus(in);
}

}  // namespace qfa
