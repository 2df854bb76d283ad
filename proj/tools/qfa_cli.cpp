// Command-line workbench: build the fingerprint automata, run words and
// corpora, verify well-formedness, generate instances, and reproduce the
// acceptance-law experiments as CSV/JSON tables.

#include <fstream>
#include <iostream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "qfa/analysis.hpp"
#include "qfa/automaton.hpp"
#include "qfa/builders.hpp"
#include "qfa/experiments.hpp"
#include "qfa/languages.hpp"
#include "qfa/numbers.hpp"
#include "qfa/serialize.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAssertion = 2;

struct BuildOptions {
  std::string machine;
  std::string out;
  int primes = 0;
  int n1 = 0, n2 = 0;
  int n = 0, c = 1, d = 3;
  double a = 0.0;
};

qfa::M1Params derive_m1_params(const BuildOptions& opt) {
  if (opt.n1 > 0 && opt.n2 > 0)
    return qfa::M1Params{qfa::odd_primes(opt.n1), qfa::odd_primes(opt.n2)};
  if (opt.n > 0) {
    if (opt.machine == "m2q") return qfa::theorem1_params(opt.n, opt.c, opt.d);
    if (opt.machine == "m2p" && opt.a > 0.0)
      return qfa::theorem2_params(opt.n, opt.c, opt.a, opt.d);
    if (opt.machine == "m2p") return qfa::theorem1_params(opt.n, opt.c, opt.d);
    return qfa::lemma7_params(opt.n, opt.d);
  }
  throw CLI::ValidationError(opt.machine + " needs --n1/--n2 or a derivation via --n");
}

template <typename Amp>
void print_spec_summary(const qfa::MachineSpec<Amp>& spec) {
  std::cout << "states " << spec.num_states << "\n"
            << "accepting " << spec.partition.accepting.size() << "\n"
            << "rejecting " << spec.partition.rejecting.size() << "\n"
            << "nonhalting " << spec.partition.nonhalting.size() << "\n";
  for (int si = 0; si < qfa::kNumSymbols; ++si) {
    const auto symbol = static_cast<qfa::Symbol>(si);
    int defined = 0;
    for (qfa::StateId s = 0; s < spec.num_states; ++s)
      if (spec.has_column(symbol, s)) ++defined;
    std::cout << "columns[" << qfa::symbol_name(symbol) << "] " << defined << "\n";
  }
}

int cmd_build(const BuildOptions& opt) {
  qfa::AnySpec spec = [&]() -> qfa::AnySpec {
    if (opt.machine == "m0q" || opt.machine == "m0p") {
      if (opt.primes <= 0)
        throw CLI::ValidationError("m0 machines need --primes >= 1");
      const qfa::PrimeSet primes = qfa::odd_primes(opt.primes);
      if (opt.machine == "m0q") return qfa::build_m0q(primes);
      return qfa::build_m0p(primes);
    }
    const qfa::M1Params params = derive_m1_params(opt);
    if (opt.machine == "m1q") return qfa::build_m1q(params);
    if (opt.machine == "m1p") return qfa::build_m1p(params);
    if (opt.machine == "m2q") return qfa::build_m2q(params);
    if (opt.machine == "m2p") return qfa::build_m2p(params);
    throw CLI::ValidationError("unknown machine \"" + opt.machine + "\"");
  }();

  std::visit([&](const auto& s) {
    print_spec_summary(s);
    if (!opt.out.empty()) {
      qfa::save_spec(opt.out, s);
      std::cout << "wrote " << opt.out << "\n";
    }
  }, spec);
  return kExitOk;
}

int cmd_run(const std::string& spec_path, const std::string& word_text) {
  const qfa::AnySpec spec = qfa::load_spec(spec_path);
  const std::vector<qfa::Symbol> word = qfa::parse_word(word_text);
  const qfa::RunResult result =
      std::visit([&](const auto& s) { return qfa::run_word(s, word); }, spec);
  std::cout << "p_accept " << qfa::fmt_fixed12(result.p_accept) << "\n"
            << "p_reject " << qfa::fmt_fixed12(result.p_reject) << "\n"
            << "p_residual " << qfa::fmt_fixed12(result.p_residual) << "\n";
  return kExitOk;
}

int cmd_verify(const std::string& spec_path) {
  const qfa::AnySpec spec = qfa::load_spec(spec_path);
  const qfa::WellformedReport report =
      std::visit([](const auto& s) { return qfa::check_wellformed(s); }, spec);
  if (report.ok()) {
    std::cout << "ok: 0 violations\n";
    return kExitOk;
  }
  for (const auto& v : report.violations)
    std::cout << v.code << ": " << v.message << " (deviation " << qfa::fmt_general(v.deviation)
              << ")\n";
  std::cout << report.violations.size() << " violations\n";
  return kExitAssertion;
}

struct CorpusOptions {
  std::string spec_path, corpus_path, out, oracle;
  int n = 0, k = 0;
  double cutpoint = 0.5;
};

int cmd_corpus(const CorpusOptions& opt) {
  const qfa::AnySpec spec = qfa::load_spec(opt.spec_path);
  const qfa::Corpus corpus = qfa::read_corpus(opt.corpus_path);
  const int n = opt.n > 0 ? opt.n : corpus.meta.n;
  const int k = opt.k > 0 ? opt.k : corpus.meta.k;

  std::function<bool(std::string_view)> oracle;
  if (opt.oracle == "l0")
    oracle = [n](std::string_view w) { return qfa::in_l0(w, n); };
  else if (opt.oracle == "l1")
    oracle = [n](std::string_view w) { return qfa::in_l1(w, n); };
  else if (opt.oracle == "l2")
    oracle = [n, k](std::string_view w) { return qfa::in_l2(w, n, k); };
  else if (!opt.oracle.empty())
    throw CLI::ValidationError("unknown oracle \"" + opt.oracle + "\"");

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!opt.out.empty()) {
    file.open(opt.out);
    if (!file) throw std::runtime_error("cannot open " + opt.out + " for writing");
    out = &file;
  }
  std::visit([&](const auto& s) { qfa::run_corpus_csv(*out, s, corpus.words, oracle, opt.cutpoint); },
             spec);
  return kExitOk;
}

struct GenOptions {
  int n = 4, k = 0, count = 16;
  std::string kind = "member";
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_gen(const GenOptions& opt) {
  const qfa::InstanceKind kind = qfa::instance_kind_from_name(opt.kind);
  const std::vector<std::string> words = qfa::gen_instances(opt.n, opt.k, kind, opt.count, opt.seed);
  const qfa::CorpusMeta meta{opt.n, opt.k, opt.kind, opt.seed};
  if (opt.out.empty()) {
    qfa::write_corpus(std::cout, meta, words);
  } else {
    qfa::write_corpus(opt.out, meta, words);
    std::cout << "wrote " << words.size() << " words to " << opt.out << "\n";
  }
  return kExitOk;
}

int cmd_experiment(const qfa::ExperimentConfig& cfg, const std::string& out,
                   const std::string& format) {
  const std::vector<qfa::BoundReport> reports = qfa::run_experiment(cfg);
  if (format == "json")
    qfa::write_reports_json(std::cout, reports);
  else
    qfa::write_reports_csv(std::cout, reports);
  if (!out.empty()) {
    std::ofstream csv(out + ".csv");
    if (!csv) throw std::runtime_error("cannot open " + out + ".csv for writing");
    qfa::write_reports_csv(csv, reports);
    std::ofstream json(out + ".json");
    if (!json) throw std::runtime_error("cannot open " + out + ".json for writing");
    qfa::write_reports_json(json, reports);
  }
  return qfa::all_pass(reports) ? kExitOk : kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fingerprint automata workbench: build, simulate and verify the "
               "reversal-language qfa/pfa constructions"};
  app.require_subcommand(1);

  BuildOptions build_opt;
  CLI::App* build = app.add_subcommand("build", "construct a machine and dump its spec");
  build->add_option("machine", build_opt.machine, "one of m0q m0p m1q m1p m2q m2p")->required();
  build->add_option("--primes", build_opt.primes, "prime count for m0 machines");
  build->add_option("--n1", build_opt.n1, "prime count for the w1/w2 check");
  build->add_option("--n2", build_opt.n2, "prime count for the concatenation check");
  build->add_option("--n", build_opt.n, "block bit length for derived parameters");
  build->add_option("--c", build_opt.c, "iteration exponent");
  build->add_option("--d", build_opt.d, "N2 multiplier");
  build->add_option("--a", build_opt.a, "acceptance scaling constant (m2p)");
  build->add_option("--out", build_opt.out, "spec dump path");

  std::string run_spec, run_word;
  CLI::App* run = app.add_subcommand("run", "run one word and print the exact outcome");
  run->add_option("spec", run_spec, "spec dump file")->required();
  run->add_option("word", run_word, "word over {0,1,#}")->required();

  CorpusOptions corpus_opt;
  CLI::App* corpus = app.add_subcommand("corpus", "run every word of a corpus, emit CSV");
  corpus->add_option("spec", corpus_opt.spec_path)->required();
  corpus->add_option("corpus", corpus_opt.corpus_path)->required();
  corpus->add_option("--oracle", corpus_opt.oracle, "membership oracle: l0, l1 or l2");
  corpus->add_option("--n", corpus_opt.n, "block length (default: corpus header)");
  corpus->add_option("--k", corpus_opt.k, "block count (default: corpus header)");
  corpus->add_option("--cutpoint", corpus_opt.cutpoint, "decision cutpoint")->default_val(0.5);
  corpus->add_option("--out", corpus_opt.out, "CSV path (default: stdout)");

  std::string verify_spec;
  CLI::App* verify = app.add_subcommand("verify", "check spec well-formedness");
  verify->add_option("spec", verify_spec)->required();

  GenOptions gen_opt;
  CLI::App* gen = app.add_subcommand("gen", "generate a seeded instance corpus");
  gen->add_option("--n", gen_opt.n, "block bit length")->required();
  gen->add_option("--k", gen_opt.k, "block count (0 = single pair x#y)");
  gen->add_option("--kind", gen_opt.kind, "member, nonmember or adversarial");
  gen->add_option("--count", gen_opt.count, "number of instances");
  gen->add_option("--seed", gen_opt.seed, "generator seed");
  gen->add_option("--out", gen_opt.out, "corpus path (default: stdout)");

  qfa::ExperimentConfig exp_cfg;
  std::string exp_out, exp_format = "csv";
  CLI::App* experiment =
      app.add_subcommand("experiment", "reproduce one acceptance-law experiment");
  experiment->add_option("id", exp_cfg.id,
                         "lemma3, lemma4, lemma7, lemma8, theorem1, theorem2 or states")
      ->required();
  experiment->add_option("--n", exp_cfg.n, "block bit length");
  experiment->add_option("--c", exp_cfg.c, "iteration exponent");
  experiment->add_option("--d", exp_cfg.d, "N2 multiplier");
  experiment->add_option("--a", exp_cfg.a, "acceptance scaling constant");
  experiment->add_option("--k", exp_cfg.k, "theorem2: largest repetition count");
  experiment->add_option("--primes", exp_cfg.primes, "lemma3/lemma4 prime count");
  experiment->add_option("--n1", exp_cfg.n1, "explicit N1 for lemma7/lemma8");
  experiment->add_option("--n2", exp_cfg.n2, "explicit N2 for lemma7/lemma8");
  experiment->add_option("--members", exp_cfg.members, "theorem1 member corpus size");
  experiment->add_option("--nonmembers", exp_cfg.nonmembers, "theorem1 nonmember corpus size");
  experiment->add_option("--samples", exp_cfg.samples, "lemma7/lemma8 sampled sweep size");
  experiment->add_flag("--exhaustive", exp_cfg.exhaustive, "force the full 2^(4n) sweep");
  experiment->add_option("--seed", exp_cfg.seed, "corpus seed");
  experiment->add_option("--cutpoint", exp_cfg.cutpoint, "recognition cutpoint");
  experiment->add_option("--machine", exp_cfg.machine, "states audit target: m0, m1 or m2");
  experiment->add_option("--max-primes", exp_cfg.max_primes, "states audit sweep bound");
  experiment->add_option("--out", exp_out, "write <out>.csv and <out>.json");
  experiment->add_option("--format", exp_format, "stdout format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
    if (build->parsed()) return cmd_build(build_opt);
    if (run->parsed()) return cmd_run(run_spec, run_word);
    if (corpus->parsed()) return cmd_corpus(corpus_opt);
    if (verify->parsed()) return cmd_verify(verify_spec);
    if (gen->parsed()) return cmd_gen(gen_opt);
    if (experiment->parsed()) return cmd_experiment(exp_cfg, exp_out, exp_format);
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
