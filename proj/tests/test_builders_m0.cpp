#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "qfa/analysis.hpp"
#include "qfa/builders.hpp"
#include "qfa/languages.hpp"

using namespace qfa;
using Catch::Matchers::WithinAbs;
using cplx = std::complex<double>;

TEST_CASE("m0 state counts follow the construction formula") {
  CHECK(build_m0q(odd_primes(2)).num_states == 25);  // 1 + 3 * (3 + 5)
  CHECK(build_m0q(odd_primes(1)).num_states == 10);  // 1 + 3 * 3
  for (int count = 1; count <= 12; ++count) {
    const PrimeSet primes = odd_primes(count);
    CHECK(build_m0q(primes).num_states == m0_state_count(primes));
    CHECK(build_m0p(primes).num_states == m0_state_count(primes));
  }
}

TEST_CASE("m0 has a single accepting state") {
  for (int count : {1, 2, 5}) {
    const QfaSpec spec = build_m0q(odd_primes(count));
    REQUIRE(spec.partition.accepting.size() == 1);
    CHECK(spec.state_name(spec.partition.accepting[0]) == "s" + std::to_string(count));
  }
}

TEST_CASE("empty prime set is rejected") {
  CHECK_THROWS_AS(build_m0q(PrimeSet{}), std::invalid_argument);
  CHECK_THROWS_AS(build_m0p(PrimeSet{}), std::invalid_argument);
}

TEST_CASE("m0 builder output is well-formed across the sweep") {
  for (int count = 1; count <= 8; ++count) {
    CAPTURE(count);
    CHECK(check_wellformed(build_m0q(odd_primes(count))).ok());
    CHECK(check_wellformed(build_m0p(odd_primes(count))).ok());
  }
}

TEST_CASE("reading w then w reversed returns every branch to the zero residue") {
  const PrimeSet primes = odd_primes(4);
  const QfaSpec machine = build_m0q(primes);
  const M0Layout layout(primes);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int len = 1 + static_cast<int>(rng() % 10);
    std::string w(len, '0');
    for (char& c : w) c = static_cast<char>('0' + (rng() & 1));
    const std::string text = w + "#" + std::string(w.rbegin(), w.rend());

    const auto framed = frame_word(parse_word(text));
    auto cfg = initial_configuration(machine);
    for (std::size_t i = 0; i + 1 < framed.size(); ++i) cfg = step(machine, cfg, framed[i]);

    // Before the right endmarker every branch must sit at phase-2 residue 0
    // with amplitude exactly 1/sqrt(N).
    REQUIRE(cfg.amplitudes.size() == static_cast<std::size_t>(primes.count()));
    const double expected = 1.0 / std::sqrt(static_cast<double>(primes.count()));
    for (int k = 0; k < primes.count(); ++k) {
      CHECK(cfg.amplitudes[k].first == layout.phase2(k, 0));
      CHECK_THAT(std::abs(cfg.amplitudes[k].second - cplx(expected)), WithinAbs(0.0, 1e-12));
    }
  }
}

TEST_CASE("quantum and classical m0 share states and column support") {
  const PrimeSet primes = odd_primes(3);
  const QfaSpec quantum = build_m0q(primes);
  const PfaSpec classical = build_m0p(primes);

  REQUIRE(quantum.num_states == classical.num_states);
  CHECK(quantum.state_names == classical.state_names);
  CHECK(quantum.partition.accepting == classical.partition.accepting);
  CHECK(quantum.partition.rejecting == classical.partition.rejecting);

  for (int si = 0; si < kNumSymbols; ++si) {
    const Symbol symbol = static_cast<Symbol>(si);
    for (StateId src = 0; src < quantum.num_states; ++src) {
      CAPTURE(si, src);
      REQUIRE(quantum.has_column(symbol, src) == classical.has_column(symbol, src));
      if (!quantum.has_column(symbol, src)) continue;
      const auto& qcol = quantum.column(symbol, src);
      const auto& pcol = classical.column(symbol, src);
      if (qcol.size() == 1 && std::abs(qcol[0].amplitude - cplx(1.0)) < 1e-15) {
        // Deterministic columns are shared exactly.
        REQUIRE(pcol.size() == 1);
        CHECK(pcol[0].target == qcol[0].target);
        CHECK(pcol[0].amplitude == 1.0);
      } else {
        // Superposition columns: the classical targets are a subset.
        for (const auto& pe : pcol) {
          const bool contained = std::any_of(qcol.begin(), qcol.end(), [&](const auto& qe) {
            return qe.target == pe.target;
          });
          CHECK(contained);
        }
      }
    }
  }
}

TEST_CASE("exhaustive n=3 sweep matches the closed-form laws") {
  const PrimeSet primes = odd_primes(5);
  const QfaSpec quantum = build_m0q(primes);
  const PfaSpec classical = build_m0p(primes);
  for (std::uint64_t x = 0; x < 8; ++x)
    for (std::uint64_t y = 0; y < 8; ++y) {
      const std::string xs = detail::bits_of_value(x, 3), ys = detail::bits_of_value(y, 3);
      const std::string text = xs + "#" + ys;
      const auto word = parse_word(text);
      const double q = run_qfa(quantum, word).p_accept;
      const double c = run_pfa(classical, word).p_accept;
      CHECK_THAT(q, WithinAbs(m0_accept_exact(primes, xs, ys, Model::Quantum), 1e-9));
      CHECK_THAT(c, WithinAbs(m0_accept_exact(primes, xs, ys, Model::Classical), 1e-12));
      CHECK_THAT(q, WithinAbs(c * c, 1e-9));
    }
}

TEST_CASE("unreachable fourier targets are retained in the classical machine") {
  const PrimeSet primes = odd_primes(3);
  const PfaSpec classical = build_m0p(primes);
  const M0Layout layout(primes);
  // s_1 .. s_(N-1) exist and are rejecting even though no column feeds them.
  for (int l = 1; l < primes.count(); ++l) {
    const StateId id = layout.fourier_target(l);
    CHECK(classical.state_class(id) == StateClass::Rejecting);
  }
}
