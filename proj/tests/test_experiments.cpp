#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "qfa/experiments.hpp"

using namespace qfa;

TEST_CASE("lemma3 and lemma4 experiments pass at small scale") {
  for (const auto& rows : {experiment_lemma3(3, 6), experiment_lemma4(3, 6)}) {
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
      CAPTURE(r.experiment, r.row, r.observed, r.predicted_lo, r.predicted_hi);
      CHECK(r.pass);
    }
  }
}

TEST_CASE("lemma7 experiment passes exhaustively at n=2") {
  ExperimentConfig cfg;
  cfg.id = "lemma7";
  cfg.n = 2;
  cfg.d = 3;
  const auto rows = experiment_lemma7(cfg);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    CAPTURE(r.row, r.observed, r.predicted_lo, r.predicted_hi);
    CHECK(r.pass);
  }
}

TEST_CASE("lemma8 experiment passes exhaustively at n=2") {
  ExperimentConfig cfg;
  cfg.id = "lemma8";
  cfg.n = 2;
  cfg.d = 3;
  const auto rows = experiment_lemma8(cfg);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CAPTURE(r.row, r.observed, r.predicted_lo, r.predicted_hi);
    CHECK(r.pass);
  }
}

TEST_CASE("theorem1 experiment recognizes the block language at n=2") {
  ExperimentConfig cfg;
  cfg.id = "theorem1";
  cfg.n = 2;
  cfg.c = 1;
  cfg.d = 3;
  cfg.members = 25;
  cfg.nonmembers = 25;
  cfg.seed = 11;
  const auto rows = experiment_theorem1(cfg);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CAPTURE(r.row, r.observed, r.note);
    CHECK(r.pass);
  }
}

TEST_CASE("theorem2 experiment matches the accumulation law") {
  ExperimentConfig cfg;
  cfg.id = "theorem2";
  cfg.n = 4;
  cfg.c = 1;
  cfg.a = 4.0;
  cfg.d = 3;
  cfg.k = 4;
  const auto rows = experiment_theorem2(cfg);
  REQUIRE(rows.size() == static_cast<std::size_t>(cfg.k) + 1);
  for (const auto& r : rows) {
    CAPTURE(r.row, r.observed, r.predicted_lo);
    CHECK(r.pass);
  }
  // The fixed block collides on exactly one of the two primes: a' = 1/2.
  double a_prime = 0.0;
  for (const auto& [key, value] : rows[0].parameters)
    if (key == "a_prime") a_prime = value;
  CHECK_THAT(a_prime, Catch::Matchers::WithinAbs(0.5, 1e-12));
}

TEST_CASE("states experiment audits the construction formulas") {
  ExperimentConfig m0;
  m0.id = "states";
  m0.machine = "m0";
  m0.max_primes = 6;
  for (const auto& r : experiment_states(m0)) CHECK(r.pass);

  ExperimentConfig m1;
  m1.id = "states";
  m1.machine = "m1";
  m1.max_primes = 2;
  for (const auto& r : experiment_states(m1)) CHECK(r.pass);

  ExperimentConfig bad;
  bad.id = "states";
  bad.machine = "m9";
  CHECK_THROWS_AS(experiment_states(bad), std::invalid_argument);
}

TEST_CASE("run_experiment validates up front") {
  ExperimentConfig cfg;
  cfg.id = "nope";
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
  cfg.id = "lemma3";
  cfg.n = 0;
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
  cfg.n = 13;
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("report writers are deterministic and mirror each other") {
  const auto rows = experiment_lemma3(2, 4);
  std::ostringstream csv_a, csv_b, json_a;
  write_reports_csv(csv_a, rows);
  write_reports_csv(csv_b, rows);
  CHECK(csv_a.str() == csv_b.str());
  CHECK(csv_a.str().find("lemma3,members_accept_one") != std::string::npos);

  write_reports_json(json_a, rows);
  const auto parsed = nlohmann::json::parse(json_a.str());
  REQUIRE(parsed.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(parsed[i].at("row") == rows[i].row);
    CHECK(parsed[i].at("observed") == rows[i].observed);
    CHECK(parsed[i].at("pass") == rows[i].pass);
  }
}

TEST_CASE("an empty corpus yields a header-only CSV") {
  const QfaSpec machine = build_m0q(odd_primes(2));
  std::ostringstream out;
  run_corpus_csv(out, machine, {}, nullptr, 0.5);
  CHECK(out.str() == "word,p_accept,p_reject,p_residual,oracle_member,decision,error\n");
}

TEST_CASE("corpus CSV reports per-word results and records errors") {
  const QfaSpec machine = build_m0q(odd_primes(2));
  std::ostringstream out;
  // The middle word hits an undefined column (two sharps on the pair
  // machine); the run must continue past it.
  run_corpus_csv(out, machine, {"11#11", "0#0#0", "01#01"},
                 [](std::string_view w) { return in_l0(w, 2); }, 0.5);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "word,p_accept,p_reject,p_residual,oracle_member,decision,error");
  std::getline(lines, line);
  CHECK(line == "11#11,1.000000000000,0.000000000000,0.000000000000,true,accept,");
  std::getline(lines, line);
  CHECK(line.find("0#0#0,,,,,") == 0);
  CHECK(line.find("SHARP") != std::string::npos);
  std::getline(lines, line);
  CHECK(line == "01#01,0.000000000000,1.000000000000,0.000000000000,false,reject,");
}
