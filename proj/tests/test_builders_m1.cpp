#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <string>

#include "qfa/analysis.hpp"
#include "qfa/builders.hpp"
#include "qfa/languages.hpp"
#include "qfa/serialize.hpp"

using namespace qfa;
using Catch::Matchers::WithinAbs;

namespace {

// Independent state-count oracle: enumerate the construction's families
// directly from the prime lists, one name per state.
long long enumerate_m1_families(const M1Params& params, bool looped) {
  std::set<std::string> names;
  names.insert("start");
  for (int pk : params.primes1.primes)
    for (int pl : params.primes2.primes)
      for (int e = 0; e < pk; ++e)
        for (int f = 0; f < pl; ++f) {
          const std::string tag = std::to_string(pk) + "." + std::to_string(e) + "." +
                                  std::to_string(pl) + "." + std::to_string(f);
          for (int grid = 1; grid <= 4; ++grid)
            names.insert("grid" + std::to_string(grid) + "." + tag);
          if (e != 0) names.insert("hold." + tag);
          if (e != 0 || f != 0) names.insert("rej." + tag);
          if (looped && e == 0 && f == 0) names.insert("rej." + tag);
        }
  for (int m = 1; m <= params.primes1.count(); ++m)
    for (int pl : params.primes2.primes)
      for (int f = 0; f < pl; ++f)
        names.insert("s." + std::to_string(m) + "." + std::to_string(pl) + "." +
                     std::to_string(f));
  for (int pk : params.primes1.primes)
    for (int y = 1; y <= params.primes2.count(); ++y)
      names.insert("tpair." + std::to_string(pk) + "." + std::to_string(y));
  for (int z = 1; z <= params.primes1.count(); ++z) names.insert("tfinal." + std::to_string(z));
  return static_cast<long long>(names.size());
}

std::string l1_text(const std::string& w1, const std::string& w2, const std::string& w3,
                    const std::string& w4) {
  return w1 + "#" + w2 + "##" + w3 + "#" + w4 + "#";
}

}  // namespace

TEST_CASE("m1 state count matches the independent family enumeration") {
  // Distinct primes per family keep the name oracle collision-free.
  for (const auto& [a, b] : {std::pair{2, 2}, {1, 3}, {3, 1}, {2, 4}}) {
    const M1Params params{odd_primes(a), odd_primes(b)};
    CAPTURE(a, b);
    CHECK(build_m1q(params).num_states == enumerate_m1_families(params, false));
    CHECK(build_m1q(params).num_states == m1_state_count(params));
    CHECK(build_m1p(params).num_states == m1_state_count(params));
    CHECK(build_m2q(params).num_states == enumerate_m1_families(params, true));
    CHECK(build_m2q(params).num_states == m2_state_count(params));
  }
}

TEST_CASE("m1 and m2 builder outputs are well-formed") {
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b) {
      const M1Params params{odd_primes(a), odd_primes(b)};
      CAPTURE(a, b);
      CHECK(check_wellformed(build_m1q(params)).ok());
      CHECK(check_wellformed(build_m1p(params)).ok());
      CHECK(check_wellformed(build_m2q(params)).ok());
      CHECK(check_wellformed(build_m2p(params)).ok());
    }
}

TEST_CASE("unlooped m2 reproduces m1 column for column") {
  const M1Params params{odd_primes(2), odd_primes(3)};
  CHECK(spec_to_json(build_m2q(params, false)) == spec_to_json(build_m1q(params)));
  CHECK(spec_to_json(build_m2p(params, false)) == spec_to_json(build_m1p(params)));
}

TEST_CASE("first-path members gather full acceptance at the mid-word sharp") {
  const int n = 2;
  const M1Params params{odd_primes(2), odd_primes(3)};
  const QfaSpec machine = build_m1q(params);
  const std::string w1 = "01";
  const std::string text = l1_text(w1, "10", "11", "00");  // w2 = w1 reversed
  REQUIRE(in_l1(text, n));

  const RunResult run = run_qfa(machine, parse_word(text));
  CHECK_THAT(run.p_accept, WithinAbs(1.0, 1e-9));

  // Cumulative acceptance is already 1 right after the first sharp of the
  // double-sharp separator (step 2n + 2 of the framed word).
  const std::vector<int> probes = {2 * n + 2};
  const auto snaps = trace_run(machine, parse_word(text), probes);
  REQUIRE(snaps.size() == 1);
  CHECK_THAT(snaps[0].config.p_accept, WithinAbs(1.0, 1e-9));
}

TEST_CASE("second-path members follow the exact acceptance law") {
  const int n = 2;
  const M1Params params{odd_primes(2), odd_primes(3)};
  const QfaSpec machine = build_m1q(params);
  const int n1 = params.primes1.count();

  // Two mismatch pairs: difference 1 collides on no prime, difference 3 on
  // one of {3, 5}. In both cases w3w4 = reverse(w1w2).
  for (const auto& [w1, w2] : {std::pair<std::string, std::string>{"01", "00"}, {"11", "00"}}) {
    const std::string rev = detail::reversed(w1 + w2);
    const std::string text = l1_text(w1, w2, rev.substr(0, n), rev.substr(n, n));
    REQUIRE(in_l1(text, n));
    CAPTURE(text);

    const double beta =
        static_cast<double>(common_residue_count(params.primes1, w1, w2)) / n1;
    const double expected = beta * beta + (1.0 - beta * beta) * (1.0 - beta * beta);
    CHECK_THAT(run_qfa(machine, parse_word(text)).p_accept, WithinAbs(expected, 1e-9));
  }
}

TEST_CASE("the looped machine parks recovered mass as residual on a single block") {
  const int n = 2;
  const M1Params params{odd_primes(2), odd_primes(3)};
  const QfaSpec machine = build_m2q(params);

  const std::string w1 = "11", w2 = "00";  // difference 3: one colliding prime
  const std::string rev = detail::reversed(w1 + w2);
  const std::string text = l1_text(w1, w2, rev.substr(0, n), rev.substr(n, n));

  const double beta = static_cast<double>(common_residue_count(params.primes1, w1, w2)) /
                      params.primes1.count();
  const RunResult run = run_qfa(machine, parse_word(text));
  CHECK_THAT(run.p_accept, WithinAbs(beta * beta, 1e-9));
  // t_N1 is non-halting here: the recovered (1 - beta^2)^2 survives as
  // residual mass and counts as rejection at the recognition layer.
  CHECK_THAT(run.p_residual, WithinAbs((1.0 - beta * beta) * (1.0 - beta * beta), 1e-9));
}

TEST_CASE("a clean long-match block hands its mass to the next iteration") {
  const int n = 2;
  const M1Params params{odd_primes(2), odd_primes(3)};
  const QfaSpec machine = build_m2q(params);

  // Block 1 long-matches (recovery path), block 2 accepts via w1 = w2^R.
  const std::string w1 = "11", w2 = "00";
  const std::string rev = detail::reversed(w1 + w2);
  const std::string block1 = w1 + "#" + w2 + "##" + rev.substr(0, n) + "#" + rev.substr(n, n);
  const std::string block2 = "11#11##00#00";
  const std::string text = block1 + "###" + block2 + "#";
  REQUIRE(in_l2(text, n, 2));

  const double beta = static_cast<double>(common_residue_count(params.primes1, w1, w2)) /
                      params.primes1.count();
  const double recovery = (1.0 - beta * beta) * (1.0 - beta * beta);
  const RunResult run = run_qfa(machine, parse_word(text));
  CHECK_THAT(run.p_accept, WithinAbs(beta * beta + recovery, 1e-9));
}

TEST_CASE("quantum and classical m1 share states and column support") {
  const M1Params params{odd_primes(2), odd_primes(2)};
  const QfaSpec quantum = build_m1q(params);
  const PfaSpec classical = build_m1p(params);
  REQUIRE(quantum.num_states == classical.num_states);
  CHECK(quantum.state_names == classical.state_names);
  for (int si = 0; si < kNumSymbols; ++si) {
    const Symbol symbol = static_cast<Symbol>(si);
    for (StateId src = 0; src < quantum.num_states; ++src) {
      REQUIRE(quantum.has_column(symbol, src) == classical.has_column(symbol, src));
      if (!quantum.has_column(symbol, src)) continue;
      const auto& qcol = quantum.column(symbol, src);
      for (const auto& pe : classical.column(symbol, src)) {
        const bool contained = std::any_of(qcol.begin(), qcol.end(),
                                           [&](const auto& qe) { return qe.target == pe.target; });
        CHECK(contained);
      }
    }
  }
}

TEST_CASE("derived parameters match the stated settings") {
  // n = 4: N0 = 2, N0' = 3.
  const M1Params t1c0 = theorem1_params(4, 0, 3);
  CHECK(t1c0.primes1.count() == 4);  // ceil(2 * 2 * 4^0)
  CHECK(t1c0.primes2.count() == 9);  // 3 * 3

  const M1Params t1c1 = theorem1_params(4, 1, 3);
  CHECK(t1c1.primes1.count() == 8);  // ceil(2 * 2 * 2)

  const M1Params l7 = lemma7_params(4, 3);
  CHECK(l7.primes1.count() == 4);  // ceil(2 * sqrt(4))
  CHECK(l7.primes2.count() == 9);

  const M1Params t2 = theorem2_params(4, 1, 4.0, 3);
  CHECK(t2.primes1.count() == 2);  // ceil(2 * 4 / 4)
  CHECK(t2.primes2.count() == 9);

  // With c = 2 the margin condition N0/N1 + N0'/N2 <= 1/2 holds.
  const M1Params t1c2 = theorem1_params(4, 2, 3);
  const double margin = 2.0 / t1c2.primes1.count() + 3.0 / t1c2.primes2.count();
  CHECK(margin <= 0.5);

  CHECK_THROWS_AS(theorem1_params(4, -1, 3), std::invalid_argument);
  CHECK_THROWS_AS(theorem2_params(4, 1, 0.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(lemma7_params(1, 3), std::invalid_argument);  // N0(1) = 0
}

TEST_CASE("fourier block columns are orthonormal") {
  const FourierBlock block{5, +1};
  for (int k = 1; k <= 5; ++k) {
    std::complex<double> norm = 0.0;
    for (int l = 1; l <= 5; ++l) norm += std::norm(block.amplitude(k, l));
    CHECK_THAT(norm.real(), WithinAbs(1.0, 1e-12));
    for (int k2 = k + 1; k2 <= 5; ++k2) {
      std::complex<double> inner = 0.0;
      for (int l = 1; l <= 5; ++l)
        inner += std::conj(block.amplitude(k, l)) * block.amplitude(k2, l);
      CHECK_THAT(std::abs(inner), WithinAbs(0.0, 1e-12));
    }
  }
}
