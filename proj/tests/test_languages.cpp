#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "qfa/analysis.hpp"
#include "qfa/languages.hpp"

using namespace qfa;

TEST_CASE("in_l0 exact-shape membership") {
  CHECK(in_l0("11#11", 2));
  CHECK_FALSE(in_l0("01#01", 2));  // reverse of 01 is 10
  CHECK(in_l0("01#10", 2));
  CHECK_FALSE(in_l0("1#1", 2));    // wrong block length for n = 2
  CHECK(in_l0("1#1", 1));
  CHECK_FALSE(in_l0("11#1#", 2));
  CHECK_FALSE(in_l0("1x#11", 2));
  CHECK_FALSE(in_l0("", 2));
}

TEST_CASE("in_l1 checks the disjunction") {
  CHECK(in_l1("10#01##11#00#", 2));   // first disjunct
  CHECK(in_l1("10#11##11#01#", 2));   // w1w2 = 1011, reverse(w3w4) = reverse(1101) = 1011
  CHECK_FALSE(in_l1("10#11##00#00#", 2));
  CHECK_FALSE(in_l1("10#11##11#01", 2));   // missing trailing sharp
  CHECK_FALSE(in_l1("10#11#11#01#", 2));   // single separator sharp
}

TEST_CASE("in_l2 existential with long-match prefix") {
  // k = 1: only the reversal disjunct counts.
  CHECK(in_l2("11#11##00#01#", 2, 1));
  CHECK_FALSE(in_l2("10#11##11#01#", 2, 1));  // long match alone is not enough

  // k = 2: block 1 long-matches, block 2 has the reversal.
  const std::string block1 = "10#11##11#01";
  const std::string block2 = "01#10##00#00";
  CHECK(in_l2(block1 + "###" + block2 + "#", 2, 2));

  // Block 1 fails both conditions: the prefix is broken no matter what
  // block 2 looks like.
  const std::string broken = "10#11##00#00";
  CHECK_FALSE(in_l2(broken + "###" + block2 + "#", 2, 2));
}

TEST_CASE("first-disjunct membership is subsumed by in_l1") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    auto bits = [&](int len) {
      std::string s(len, '0');
      for (char& c : s) c = static_cast<char>('0' + (rng() & 1));
      return s;
    };
    const std::string w1 = bits(n), w2 = bits(n), w3 = bits(n), w4 = bits(n);
    if (in_l0(w1 + "#" + w2, n))
      CHECK(in_l1(w1 + "#" + w2 + "##" + w3 + "#" + w4 + "#", n));
  }
}

TEST_CASE("parse_block_string accepts only the exact shape") {
  CHECK(parse_block_string("10#11##11#01#", 2, 1).has_value());
  const auto two = parse_block_string("10#11##11#01###01#10##00#00#", 2, 2);
  REQUIRE(two.has_value());
  REQUIRE(two->blocks.size() == 2);
  CHECK(two->blocks[0][0] == "10");
  CHECK(two->blocks[1][3] == "00");
  CHECK_FALSE(parse_block_string("10#11##11#01#", 2, 2).has_value());
  CHECK_FALSE(parse_block_string("10#11##11#01##", 2, 1).has_value());
  CHECK_FALSE(parse_block_string("101#11##11#01#", 2, 1).has_value());
}

TEST_CASE("gen_instances is deterministic and oracle-verified") {
  for (InstanceKind kind :
       {InstanceKind::Member, InstanceKind::NonMember, InstanceKind::Adversarial}) {
    const auto a = gen_instances(4, 2, kind, 25, 99);
    const auto b = gen_instances(4, 2, kind, 25, 99);
    CHECK(a == b);
    for (const auto& word : a)
      CHECK(in_l2(word, 4, 2) == (kind == InstanceKind::Member));
  }
  const auto different_seed = gen_instances(4, 2, InstanceKind::Member, 25, 100);
  CHECK(different_seed != gen_instances(4, 2, InstanceKind::Member, 25, 99));
}

TEST_CASE("adversarial pairs realize the worst-case collision count") {
  const PrimeSet primes = odd_primes(8);
  const int n0 = max_common_primes(4).max_common;
  for (const auto& word : gen_instances(4, 0, InstanceKind::Adversarial, 40, 5)) {
    REQUIRE(word.size() == 9);
    const std::string x = word.substr(0, 4), y = word.substr(5, 4);
    CHECK_FALSE(in_l0(word, 4));
    CHECK(common_residue_count(primes, x, y) == n0);
  }
}

TEST_CASE("adversarial blocks maximize both fingerprint collisions") {
  const PrimeSet primes1 = odd_primes(8);
  const PrimeSet primes2 = odd_primes(10);
  const int n0 = max_common_primes(4).max_common;
  const int n0p = max_common_primes(8).max_common;
  for (const auto& word : gen_instances(4, 1, InstanceKind::Adversarial, 25, 6)) {
    const auto parsed = parse_block_string(word, 4, 1);
    REQUIRE(parsed.has_value());
    const auto& q = parsed->blocks[0];
    CHECK(common_residue_count(primes1, q[0], q[1]) == n0);
    CHECK(common_residue_count(primes2, q[0] + q[1], q[2] + q[3]) == n0p);
  }
}

TEST_CASE("gen_instances rejects impossible requests") {
  CHECK_THROWS_AS(gen_instances(0, 1, InstanceKind::Member, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_instances(4, -1, InstanceKind::Member, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_instances(4, 1, InstanceKind::Member, -1, 1), std::invalid_argument);
  // 2n exceeds the brute-force witness range.
  CHECK_THROWS_AS(gen_instances(13, 1, InstanceKind::Adversarial, 1, 1), std::out_of_range);
}

TEST_CASE("adversarial blocks stay valid at tiny n via the fallback") {
  for (const auto& word : gen_instances(2, 1, InstanceKind::Adversarial, 30, 11)) {
    CHECK_FALSE(in_l2(word, 2, 1));
    const auto parsed = parse_block_string(word, 2, 1);
    REQUIRE(parsed.has_value());
    CHECK(common_residue_count(odd_primes(4), parsed->blocks[0][0], parsed->blocks[0][1]) ==
          max_common_primes(2).max_common);
  }
}

TEST_CASE("corpus files round-trip with header metadata") {
  const CorpusMeta meta{4, 2, "member", 77};
  const auto words = gen_instances(4, 2, InstanceKind::Member, 5, 77);
  std::ostringstream sink;
  write_corpus(sink, meta, words);

  std::istringstream source(sink.str());
  const Corpus corpus = read_corpus(source);
  CHECK(corpus.meta.n == 4);
  CHECK(corpus.meta.k == 2);
  CHECK(corpus.meta.kind == "member");
  CHECK(corpus.meta.seed == 77);
  CHECK(corpus.words == words);
}

TEST_CASE("corpus comments need the hash-space prefix") {
  std::istringstream source("# n=2 kind=member\n##\n#\n01#10\n");
  const Corpus corpus = read_corpus(source);
  CHECK(corpus.meta.n == 2);
  REQUIRE(corpus.words.size() == 3);
  CHECK(corpus.words[0] == "##");  // sharp-only words are data, not comments
  CHECK(corpus.words[1] == "#");
  CHECK(corpus.words[2] == "01#10");
}

TEST_CASE("corpus rejects invalid characters") {
  std::istringstream source("01a#10\n");
  CHECK_THROWS_AS(read_corpus(source), std::invalid_argument);
}
