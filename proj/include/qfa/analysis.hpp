#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qfa/automaton.hpp"
#include "qfa/builders.hpp"
#include "qfa/numbers.hpp"

namespace qfa {

/// One predicted-vs-observed comparison row. A row passes when the observed
/// value lies inside [predicted_lo - tolerance, predicted_hi + tolerance].
struct BoundReport {
  std::string experiment;
  std::string row;
  std::vector<std::pair<std::string, double>> parameters;
  double predicted_lo = 0.0;
  double predicted_hi = 0.0;
  double observed = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;

  BoundReport& evaluate() {
    pass = observed >= predicted_lo - tolerance && observed <= predicted_hi + tolerance;
    return *this;
  }
};

inline bool all_pass(const std::vector<BoundReport>& reports) {
  for (const auto& r : reports)
    if (!r.pass) return false;
  return true;
}

enum class Model { Quantum, Classical };

/// Number of fingerprint primes on which value(x) and value(y^R) agree.
inline int common_residue_count(const PrimeSet& primes, std::string_view x, std::string_view y) {
  const std::string y_reversed(y.rbegin(), y.rend());
  int t = 0;
  for (int p : primes.primes)
    if (residue_of_word(p, x) == residue_of_word(p, y_reversed)) ++t;
  return t;
}

/// Closed-form acceptance of the single-pair machines on word x # y:
/// (t/N)^2 for the quantum machine, t/N for the emulating pfa, where t is
/// the common-residue count.
inline double m0_accept_exact(const PrimeSet& primes, std::string_view x, std::string_view y,
                              Model model) {
  if (x.size() != y.size())
    throw std::invalid_argument("m0_accept_exact: x and y must have equal length");
  const double ratio =
      static_cast<double>(common_residue_count(primes, x, y)) / primes.count();
  return model == Model::Quantum ? ratio * ratio : ratio;
}

/// Exact acceptance of the four-word machines on one exact-shape tuple
/// (w1, w2, w3, w4), as a closed form in fingerprint collision counts.
/// With D12 = val(w1) - val(w2^R), D43 = val(w4^R) - val(w3) and
/// E = D12 - D43, the primes1 family splits into
///   t1  = #{p | D12}            (short-check collisions; b = t1/N1),
///   t1e = #{p | D12 and p | E}  (collision branches whose inverse-transform
///                                remnant survives the reverse grids),
///   u   = #{p with p∤D12, p | E}   (held branches that recover to zero),
///   v   = #{p with p∤D12, p | D43} (inverse-transform leakage that lands on
///                                   the zero residue),
/// and t2 counts primes2 dividing the concatenation difference (g = t2/N2).
/// The classical machine accepts with  b + (u/N1) g;  the quantum one with
/// b^2 + g^2 ((t1e (1-b) + u - v b) / N1)^2. On long-match words (E = 0)
/// these collapse to 1 and b^2 + (1-b^2)^2 g^2.
inline double m1_accept_exact(const M1Params& params, const std::array<std::string, 4>& quad,
                              Model model) {
  auto value = [](std::string_view s) {
    long long v = 0;
    for (char c : s) v = (v << 1) | (c == '1' ? 1 : 0);
    return v;
  };
  auto reversed = [](const std::string& s) { return std::string(s.rbegin(), s.rend()); };
  auto divides = [](int p, long long x) { return ((x % p) + p) % p == 0; };

  const long long d12 = value(quad[0]) - value(reversed(quad[1]));
  const long long d43 = value(reversed(quad[3])) - value(quad[2]);
  const long long e_diff = d12 - d43;
  const long long d_long = value(quad[0] + quad[1]) - value(reversed(quad[2] + quad[3]));

  int t1 = 0, t1e = 0, u = 0, v = 0;
  for (int p : params.primes1.primes) {
    if (divides(p, d12)) {
      ++t1;
      if (divides(p, e_diff)) ++t1e;
    } else {
      if (divides(p, e_diff)) ++u;
      if (divides(p, d43)) ++v;
    }
  }
  int t2 = 0;
  for (int p : params.primes2.primes)
    if (divides(p, d_long)) ++t2;

  const double n1 = params.primes1.count();
  const double n2 = params.primes2.count();
  const double b = t1 / n1;
  const double g = t2 / n2;
  if (model == Model::Classical) return b + (u / n1) * g;
  const double survivors = t1e * (1.0 - b) + u - v * b;
  return b * b + g * g * (survivors / n1) * (survivors / n1);
}

/// The four-word machine's stated acceptance bounds. accept_lower is the
/// headline form 1 - b^2 + b^4 with b = n0/n1; accept_lower_proof_form is
/// the derivation's b^2 + (1 - b^2)^2, which expands to the same value.
/// reject_side_upper is b^2 + (1 - b^2) (n0p/n2 + b)^2.
struct Lemma7Bounds {
  double accept_lower = 0.0;
  double accept_lower_proof_form = 0.0;
  double reject_side_upper = 0.0;
};

inline Lemma7Bounds lemma7_bounds(int n0, int n0p, int n1, int n2) {
  if (n1 < 1 || n2 < 1 || n0 < 0 || n0p < 0 || n0 > n1 || n0p > n2)
    throw std::invalid_argument("lemma7_bounds: need 0 <= n0 <= n1 and 0 <= n0p <= n2");
  const double b = static_cast<double>(n0) / n1;
  const double g = static_cast<double>(n0p) / n2;
  Lemma7Bounds out;
  out.accept_lower = 1.0 - b * b + b * b * b * b;
  out.accept_lower_proof_form = b * b + (1.0 - b * b) * (1.0 - b * b);
  out.reject_side_upper = b * b + (1.0 - b * b) * (g + b) * (g + b);
  return out;
}

/// Acceptance accumulated over k iterations at per-iteration rate a/n^c:
/// 1 - (1 - a/n^c)^k.
inline double theorem2_accumulation(double a, int n, int c, int k) {
  if (k < 0) throw std::invalid_argument("theorem2_accumulation: k must be >= 0");
  const double rate = a / std::pow(static_cast<double>(n), static_cast<double>(c));
  if (rate <= 0.0 || rate > 1.0)
    throw std::invalid_argument("theorem2_accumulation: a/n^c must be in (0, 1]");
  return 1.0 - std::pow(1.0 - rate, static_cast<double>(k));
}

/// Thrown when a lemma checker's control-run precondition does not hold on
/// the supplied instance.
class InapplicableInstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

struct SplitDecomposition {
  QfaConfiguration psi1;  // non-halting part, exactly the machine's post-measurement state
  std::vector<std::pair<StateId, std::complex<double>>> psi2;  // accepted at the split step
  double norm1_sq = 0.0;
  double norm2_sq = 0.0;
  std::vector<Symbol> suffix;  // framed symbols after the split step
};

inline SplitDecomposition split_at(const QfaSpec& machine, std::span<const Symbol> word,
                                   int split_step) {
  const std::vector<Symbol> framed = frame_word(word);
  if (split_step < 0 || split_step >= static_cast<int>(framed.size()))
    throw std::invalid_argument("lemma check: split step outside the framed word");
  QfaConfiguration cfg = initial_configuration(machine);
  StepOutcome<std::complex<double>> at_split;
  for (int i = 0; i <= split_step; ++i) {
    if (i == split_step && cfg.p_accept + cfg.p_reject > kProbabilityTol)
      throw InapplicableInstanceError(
          "lemma check: state is not norm one at the split step (earlier halting)");
    at_split = step_detailed(machine, cfg, framed[i]);
    cfg = at_split.config;
  }
  if (at_split.measured_reject_mass > kProbabilityTol)
    throw InapplicableInstanceError(
        "lemma check: split step measured rejecting mass; decomposition needs accept-only");
  SplitDecomposition out;
  out.psi1 = cfg;
  out.psi1.p_accept = 0.0;
  out.psi1.p_reject = 0.0;
  out.psi2 = std::move(at_split.measured_accepting);
  out.norm1_sq = out.psi1.live_mass();
  for (const auto& [id, amp] : out.psi2) out.norm2_sq += std::norm(amp);
  out.suffix.assign(framed.begin() + split_step + 1, framed.end());
  return out;
}

/// The control machine: the accepting states measured at the split turn
/// non-halting, so the suffix acts on the whole pre-measurement state.
inline QfaSpec with_states_unhalted(QfaSpec spec, std::span<const std::pair<StateId, std::complex<double>>> ids) {
  for (const auto& [id, amp] : ids) {
    auto& acc = spec.partition.accepting;
    acc.erase(std::remove(acc.begin(), acc.end(), id), acc.end());
    spec.partition.nonhalting.push_back(id);
  }
  std::sort(spec.partition.nonhalting.begin(), spec.partition.nonhalting.end());
  spec.rebuild_class_cache();
  return spec;
}

inline double control_acceptance(const QfaSpec& machine, const SplitDecomposition& split) {
  const QfaSpec control = with_states_unhalted(machine, split.psi2);
  QfaConfiguration psi;
  psi.amplitudes = split.psi1.amplitudes;
  for (const auto& entry : split.psi2) psi.amplitudes.push_back(entry);
  std::sort(psi.amplitudes.begin(), psi.amplitudes.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return run_from(control, std::move(psi), split.suffix).p_accept;
}

}  // namespace detail

/// Lemma 5, numerically: split the run at `split_step` into the surviving
/// part psi1 and the just-accepted part psi2. When the suffix drives the
/// full state psi = psi1 + psi2 to acceptance with probability one (control
/// run on the machine with the split-step accepting states unhalted),
/// replaying the suffix on psi1 alone must accept with probability at least
/// |psi1|^4.
inline BoundReport lemma5_check(const QfaSpec& machine, std::span<const Symbol> word,
                                int split_step) {
  const auto split = detail::split_at(machine, word, split_step);
  const double control = detail::control_acceptance(machine, split);
  if (std::abs(control - 1.0) > kAmplitudeTol)
    throw InapplicableInstanceError(
        "lemma5_check: control run accepts with probability " + std::to_string(control) +
        ", not 1");
  const double replay = run_from(machine, split.psi1, split.suffix).p_accept;
  BoundReport report;
  report.experiment = "lemma5";
  report.row = "replay_acceptance_vs_norm4";
  report.parameters = {{"split_step", static_cast<double>(split_step)},
                       {"norm1_sq", split.norm1_sq},
                       {"norm2_sq", split.norm2_sq},
                       {"control_accept", control}};
  report.predicted_lo = split.norm1_sq * split.norm1_sq;
  report.predicted_hi = 1.0;
  report.observed = replay;
  report.tolerance = kAmplitudeTol;
  return report.evaluate();
}

/// Lemma 6, numerically: with the control acceptance alpha^2 measured from
/// the same decomposition, the replay on psi1 alone accepts with at most
/// |psi1|^2 (alpha |psi1| + |psi2|)^2. The analytic alpha candidate is kept
/// in the report for comparison; the measured one is asserted.
inline BoundReport lemma6_check(const QfaSpec& machine, std::span<const Symbol> word,
                                int split_step, double alpha_analytic) {
  const auto split = detail::split_at(machine, word, split_step);
  const double control = detail::control_acceptance(machine, split);
  const double alpha = std::sqrt(std::max(0.0, control));
  const double replay = run_from(machine, split.psi1, split.suffix).p_accept;
  const double norm1 = std::sqrt(split.norm1_sq);
  const double norm2 = std::sqrt(split.norm2_sq);
  BoundReport report;
  report.experiment = "lemma6";
  report.row = "replay_acceptance_vs_mixed_bound";
  report.parameters = {{"split_step", static_cast<double>(split_step)},
                       {"norm1_sq", split.norm1_sq},
                       {"norm2_sq", split.norm2_sq},
                       {"alpha_measured", alpha},
                       {"alpha_analytic", alpha_analytic}};
  report.predicted_lo = 0.0;
  report.predicted_hi = split.norm1_sq * (alpha * norm1 + norm2) * (alpha * norm1 + norm2);
  report.observed = replay;
  report.tolerance = kAmplitudeTol;
  return report.evaluate();
}

/// Cutpoint recognition over a corpus: every member must accept with
/// probability above the cutpoint and every nonmember below it; residual
/// mass counts as rejection. The report carries margin statistics and the
/// first violating words.
struct RecognitionOutcome {
  BoundReport report;
  int members = 0;
  int nonmembers = 0;
  double min_member_accept = std::numeric_limits<double>::infinity();
  double max_nonmember_accept = -std::numeric_limits<double>::infinity();
  std::vector<std::string> violating_words;
};

template <typename Amp>
RecognitionOutcome recognizes(const MachineSpec<Amp>& machine,
                              const std::vector<std::string>& corpus,
                              const std::function<bool(std::string_view)>& oracle,
                              double cutpoint = 0.5) {
  RecognitionOutcome out;
  int violations = 0;
  for (const auto& text : corpus) {
    const std::vector<Symbol> word = parse_word(text);
    const RunResult result = run_word(machine, word);
    const bool member = oracle(text);
    const bool decided_member = result.p_accept > cutpoint;
    if (member) {
      ++out.members;
      out.min_member_accept = std::min(out.min_member_accept, result.p_accept);
    } else {
      ++out.nonmembers;
      out.max_nonmember_accept = std::max(out.max_nonmember_accept, result.p_accept);
    }
    if (member != decided_member) {
      ++violations;
      if (out.violating_words.size() < 8) out.violating_words.push_back(text);
    }
  }
  out.report.experiment = "recognition";
  out.report.row = "misclassified_words";
  out.report.parameters = {{"cutpoint", cutpoint},
                           {"members", static_cast<double>(out.members)},
                           {"nonmembers", static_cast<double>(out.nonmembers)},
                           {"min_member_accept", out.min_member_accept},
                           {"max_nonmember_accept", out.max_nonmember_accept}};
  out.report.predicted_lo = 0.0;
  out.report.predicted_hi = 0.0;
  out.report.observed = violations;
  out.report.tolerance = 0.0;
  out.report.evaluate();
  if (!out.violating_words.empty()) {
    out.report.note = "violations:";
    for (const auto& w : out.violating_words) out.report.note += " " + w;
  }
  return out;
}

enum class CountFormula { M0, M1, M2 };

/// Compares an actual state count against the exact construction formula
/// (1 + 3 sum p_k for the single-pair machine).
inline BoundReport state_count_audit(int actual_states, CountFormula formula,
                                     const PrimeSet& primes) {
  if (formula != CountFormula::M0)
    throw std::invalid_argument("state_count_audit: prime-set overload is for the m0 formula");
  BoundReport report;
  report.experiment = "states";
  report.row = "m0_exact_count";
  report.parameters = {{"num_primes", static_cast<double>(primes.count())},
                       {"sum_primes", static_cast<double>(primes.sum())}};
  report.predicted_lo = report.predicted_hi = static_cast<double>(m0_state_count(primes));
  report.observed = actual_states;
  report.tolerance = 0.0;
  return report.evaluate();
}

/// M1/M2 overload: exact family count, with the quadratic envelope ratio
/// actual / (sum p_k * sum p_l) reported alongside.
inline BoundReport state_count_audit(int actual_states, CountFormula formula,
                                     const M1Params& params) {
  if (formula != CountFormula::M1 && formula != CountFormula::M2)
    throw std::invalid_argument("state_count_audit: params overload is for the m1/m2 formulas");
  const long long expected =
      formula == CountFormula::M1 ? m1_state_count(params) : m2_state_count(params);
  const double envelope =
      static_cast<double>(params.primes1.sum()) * static_cast<double>(params.primes2.sum());
  BoundReport report;
  report.experiment = "states";
  report.row = formula == CountFormula::M1 ? "m1_exact_count" : "m2_exact_count";
  report.parameters = {{"n1", static_cast<double>(params.primes1.count())},
                       {"n2", static_cast<double>(params.primes2.count())},
                       {"envelope_ratio", actual_states / envelope}};
  report.predicted_lo = report.predicted_hi = static_cast<double>(expected);
  report.observed = actual_states;
  report.tolerance = 0.0;
  return report.evaluate();
}

}  // namespace qfa
