#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

namespace qfa {

// Tolerances for the two amplitude domains. Machines here are small, so
// roundoff stays far below both.
inline constexpr double kAmplitudeTol = 1e-9;    // complex amplitude checks
inline constexpr double kProbabilityTol = 1e-12; // real probability checks

using StateId = int;

/// Tape alphabet. Words supplied by users contain only Bit0/Bit1/Sharp;
/// the runner adds the endmarkers.
enum class Symbol : std::uint8_t { LeftEnd = 0, Bit0, Bit1, Sharp, RightEnd };
inline constexpr int kNumSymbols = 5;

inline const char* symbol_name(Symbol s) {
  switch (s) {
    case Symbol::LeftEnd: return "LEFT_END";
    case Symbol::Bit0: return "0";
    case Symbol::Bit1: return "1";
    case Symbol::Sharp: return "SHARP";
    case Symbol::RightEnd: return "RIGHT_END";
  }
  return "?";
}

/// Parses a user word over {0,1,#} ('#' is the sharp separator).
inline std::vector<Symbol> parse_word(std::string_view text) {
  std::vector<Symbol> word;
  word.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '0': word.push_back(Symbol::Bit0); break;
      case '1': word.push_back(Symbol::Bit1); break;
      case '#': word.push_back(Symbol::Sharp); break;
      default:
        throw std::invalid_argument(std::string("parse_word: invalid character '") + c +
                                    "' (expected 0, 1 or #)");
    }
  }
  return word;
}

enum class StateClass : std::uint8_t { Accepting, Rejecting, NonHalting };

/// The accept/reject/non-halt split of the state set. The three lists must
/// be disjoint and cover every state; check_wellformed verifies this.
struct StatePartition {
  std::vector<StateId> accepting;
  std::vector<StateId> rejecting;
  std::vector<StateId> nonhalting;
};

/// Thrown when a run puts amplitude on a state that has no transition
/// column for the next symbol. Surfaces builder transcription bugs.
class IncompleteSpecError : public std::runtime_error {
 public:
  IncompleteSpecError(std::string state, Symbol symbol)
      : std::runtime_error("no transition column for state " + state + " on symbol " +
                           symbol_name(symbol)),
        state_name(std::move(state)),
        symbol(symbol) {}

  std::string state_name;
  Symbol symbol;
};

namespace detail {
inline double mass_of(const std::complex<double>& a) { return std::norm(a); }
inline double mass_of(double a) { return a; }
template <typename Amp>
constexpr double domain_tol() {
  if constexpr (std::is_same_v<Amp, double>)
    return kProbabilityTol;
  else
    return kAmplitudeTol;
}
}  // namespace detail

/// A measure-many one-way automaton over amplitude type `Amp`
/// (std::complex<double> for the quantum model, double for the
/// probabilistic one). Transition columns are stored sparsely, per symbol
/// and source state, and only where the construction defines them;
/// stepping onto an undefined column is an error, not an implicit
/// identity.
template <typename Amp>
struct MachineSpec {
  struct Entry {
    StateId target;
    Amp amplitude;
  };
  using Column = std::vector<Entry>;

  int num_states = 0;
  StateId initial = 0;
  StatePartition partition;
  std::vector<std::string> state_names;                 // id -> readable name
  std::array<std::vector<Column>, kNumSymbols> columns; // [symbol][source]

  void init(int n) {
    num_states = n;
    state_names.assign(n, {});
    for (auto& per_symbol : columns) per_symbol.assign(n, {});
    class_cache_.assign(n, StateClass::NonHalting);
  }

  bool has_column(Symbol s, StateId src) const {
    return !columns[static_cast<int>(s)][src].empty();
  }
  const Column& column(Symbol s, StateId src) const {
    return columns[static_cast<int>(s)][src];
  }

  /// Installs one column; entries are kept sorted by target id so that all
  /// downstream summations run in a fixed deterministic order.
  void set_column(Symbol s, StateId src, Column entries) {
    if (src < 0 || src >= num_states)
      throw std::invalid_argument("set_column: source id out of range");
    if (entries.empty()) throw std::invalid_argument("set_column: empty column");
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.target < b.target; });
    for (const Entry& e : entries)
      if (e.target < 0 || e.target >= num_states)
        throw std::invalid_argument("set_column: target id out of range");
    columns[static_cast<int>(s)][src] = std::move(entries);
  }

  StateClass state_class(StateId id) const { return class_cache_[id]; }

  const std::string& state_name(StateId id) const { return state_names[id]; }

  /// Rebuilds the id -> class lookup from the partition lists. Builders and
  /// loaders call this once the partition is final. Overlaps or gaps are
  /// reported by check_wellformed, not here.
  void rebuild_class_cache() {
    class_cache_.assign(num_states, StateClass::NonHalting);
    for (StateId id : partition.accepting)
      if (id >= 0 && id < num_states) class_cache_[id] = StateClass::Accepting;
    for (StateId id : partition.rejecting)
      if (id >= 0 && id < num_states) class_cache_[id] = StateClass::Rejecting;
  }

 private:
  std::vector<StateClass> class_cache_;
};

using QfaSpec = MachineSpec<std::complex<double>>;
using PfaSpec = MachineSpec<double>;

/// Sparse superposition (or probability distribution) over non-halting
/// states plus cumulative halting probabilities. The amplitude list is kept
/// sorted by state id.
template <typename Amp>
struct Configuration {
  std::vector<std::pair<StateId, Amp>> amplitudes;
  double p_accept = 0.0;
  double p_reject = 0.0;

  double live_mass() const {
    double m = 0.0;
    for (const auto& [id, a] : amplitudes) m += detail::mass_of(a);
    return m;
  }
};

using QfaConfiguration = Configuration<std::complex<double>>;
using PfaConfiguration = Configuration<double>;

template <typename Amp>
Configuration<Amp> initial_configuration(const MachineSpec<Amp>& spec) {
  Configuration<Amp> cfg;
  cfg.amplitudes.emplace_back(spec.initial, Amp(1));
  return cfg;
}

/// Exact outcome of a full run: cumulative acceptance, rejection, and the
/// mass still unhalted when input ends.
struct RunResult {
  double p_accept = 0.0;
  double p_reject = 0.0;
  double p_residual = 0.0;
};

/// One transition step with the amplitudes measured out at this step kept
/// on the side (the lemma checkers need the just-measured accepting part).
template <typename Amp>
struct StepOutcome {
  Configuration<Amp> config;
  std::vector<std::pair<StateId, Amp>> measured_accepting;
  double measured_reject_mass = 0.0;
};

/// Applies one symbol: routes every live amplitude through its column,
/// accumulates per target (ascending state id), then measures: mass on
/// accepting/rejecting states moves to the cumulative counters and the
/// non-halting projection becomes the new, unnormalized configuration.
template <typename Amp>
StepOutcome<Amp> step_detailed(const MachineSpec<Amp>& spec, const Configuration<Amp>& cfg,
                               Symbol symbol) {
  std::vector<std::pair<StateId, Amp>> contributions;
  for (const auto& [src, amp] : cfg.amplitudes) {
    const auto& col = spec.column(symbol, src);
    if (col.empty()) throw IncompleteSpecError(spec.state_name(src), symbol);
    for (const auto& entry : col) contributions.emplace_back(entry.target, amp * entry.amplitude);
  }
  std::stable_sort(contributions.begin(), contributions.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  StepOutcome<Amp> out;
  out.config.p_accept = cfg.p_accept;
  out.config.p_reject = cfg.p_reject;
  std::size_t i = 0;
  while (i < contributions.size()) {
    const StateId id = contributions[i].first;
    Amp total = contributions[i].second;
    for (++i; i < contributions.size() && contributions[i].first == id; ++i)
      total += contributions[i].second;
    switch (spec.state_class(id)) {
      case StateClass::Accepting:
        out.config.p_accept += detail::mass_of(total);
        out.measured_accepting.emplace_back(id, total);
        break;
      case StateClass::Rejecting:
        out.config.p_reject += detail::mass_of(total);
        out.measured_reject_mass += detail::mass_of(total);
        break;
      case StateClass::NonHalting:
        out.config.amplitudes.emplace_back(id, total);
        break;
    }
  }
  return out;
}

template <typename Amp>
Configuration<Amp> step(const MachineSpec<Amp>& spec, const Configuration<Amp>& cfg,
                        Symbol symbol) {
  return step_detailed(spec, cfg, symbol).config;
}

inline QfaConfiguration qfa_step(const QfaSpec& spec, const QfaConfiguration& cfg, Symbol s) {
  return step(spec, cfg, s);
}
inline PfaConfiguration pfa_step(const PfaSpec& spec, const PfaConfiguration& cfg, Symbol s) {
  return step(spec, cfg, s);
}

inline std::vector<Symbol> frame_word(std::span<const Symbol> word) {
  for (Symbol s : word)
    if (s == Symbol::LeftEnd || s == Symbol::RightEnd)
      throw std::invalid_argument("run: word must not contain endmarkers");
  std::vector<Symbol> framed;
  framed.reserve(word.size() + 2);
  framed.push_back(Symbol::LeftEnd);
  framed.insert(framed.end(), word.begin(), word.end());
  framed.push_back(Symbol::RightEnd);
  return framed;
}

/// Continues a run from an explicit configuration over the given symbols
/// (no endmarkers added). Used by the replay-based lemma checkers.
template <typename Amp>
RunResult run_from(const MachineSpec<Amp>& spec, Configuration<Amp> cfg,
                   std::span<const Symbol> symbols) {
  for (Symbol s : symbols) cfg = step(spec, cfg, s);
  return RunResult{cfg.p_accept, cfg.p_reject, cfg.live_mass()};
}

/// Runs LEFT_END + word + RIGHT_END from unit mass on the initial state.
template <typename Amp>
RunResult run_word(const MachineSpec<Amp>& spec, std::span<const Symbol> word) {
  return run_from(spec, initial_configuration(spec), frame_word(word));
}

inline RunResult run_qfa(const QfaSpec& spec, std::span<const Symbol> word) {
  return run_word(spec, word);
}
inline RunResult run_pfa(const PfaSpec& spec, std::span<const Symbol> word) {
  return run_word(spec, word);
}

/// Deep snapshot of the configuration right after a probed step, plus the
/// amplitudes measured out at that step.
template <typename Amp>
struct StepSnapshot {
  int step = 0;  // 0 = after LEFT_END, 1..len = word symbols, len+1 = after RIGHT_END
  Configuration<Amp> config;
  std::vector<std::pair<StateId, Amp>> measured_accepting;
  double measured_reject_mass = 0.0;
};

/// Runs the framed word and returns snapshots immediately after each probed
/// step index, in probe order.
template <typename Amp>
std::vector<StepSnapshot<Amp>> trace_run(const MachineSpec<Amp>& spec,
                                         std::span<const Symbol> word,
                                         std::span<const int> probes) {
  const std::vector<Symbol> framed = frame_word(word);
  const int num_steps = static_cast<int>(framed.size());
  for (int p : probes)
    if (p < 0 || p >= num_steps)
      throw std::invalid_argument("trace_run: probe index " + std::to_string(p) +
                                  " outside [0, " + std::to_string(num_steps) + ")");
  std::vector<StepSnapshot<Amp>> snapshots;
  if (probes.empty()) return snapshots;
  const int last = *std::max_element(probes.begin(), probes.end());

  std::vector<StepSnapshot<Amp>> by_step(last + 1);
  Configuration<Amp> cfg = initial_configuration(spec);
  for (int i = 0; i <= last; ++i) {
    StepOutcome<Amp> out = step_detailed(spec, cfg, framed[i]);
    cfg = out.config;
    by_step[i] = StepSnapshot<Amp>{i, cfg, std::move(out.measured_accepting),
                                   out.measured_reject_mass};
  }
  snapshots.reserve(probes.size());
  for (int p : probes) snapshots.push_back(by_step[p]);
  return snapshots;
}

/// One well-formedness defect: which check failed, where, and by how much.
struct Violation {
  std::string code;     // e.g. "column-norm", "orthogonality", "partition-overlap"
  std::string message;  // human-readable, names states and symbol
  double deviation = 0.0;
};

struct WellformedReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

namespace detail {

template <typename Amp>
void check_partition(const MachineSpec<Amp>& spec, WellformedReport& report) {
  std::vector<int> seen(spec.num_states, 0);
  auto scan = [&](const std::vector<StateId>& ids, const char* which) {
    for (StateId id : ids) {
      if (id < 0 || id >= spec.num_states) {
        report.violations.push_back({"partition-range",
                                     std::string(which) + " list contains out-of-range id " +
                                         std::to_string(id),
                                     0.0});
        continue;
      }
      if (++seen[id] > 1)
        report.violations.push_back({"partition-overlap",
                                     "state " + spec.state_name(id) +
                                         " appears in more than one partition class",
                                     0.0});
    }
  };
  scan(spec.partition.accepting, "accepting");
  scan(spec.partition.rejecting, "rejecting");
  scan(spec.partition.nonhalting, "nonhalting");
  for (StateId id = 0; id < spec.num_states; ++id)
    if (seen[id] == 0)
      report.violations.push_back(
          {"partition-gap", "state " + spec.state_name(id) + " is in no partition class", 0.0});
  if (spec.initial < 0 || spec.initial >= spec.num_states ||
      spec.state_class(spec.initial) != StateClass::NonHalting)
    report.violations.push_back({"initial-state", "initial state is not non-halting", 0.0});
}

}  // namespace detail

/// Verifies every QfaSpec invariant: partition consistency, unit column
/// norms, and pairwise orthogonality of the defined columns per symbol
/// (unitary extendability). Violations become report entries, not errors.
inline WellformedReport check_wellformed(const QfaSpec& spec) {
  WellformedReport report;
  detail::check_partition(spec, report);
  for (int si = 0; si < kNumSymbols; ++si) {
    const Symbol symbol = static_cast<Symbol>(si);
    std::vector<StateId> sources;
    for (StateId src = 0; src < spec.num_states; ++src)
      if (spec.has_column(symbol, src)) sources.push_back(src);

    // Unit norms.
    for (StateId src : sources) {
      double norm2 = 0.0;
      for (const auto& e : spec.column(symbol, src)) norm2 += std::norm(e.amplitude);
      const double dev = std::abs(1.0 - norm2);
      if (dev > kAmplitudeTol)
        report.violations.push_back(
            {"column-norm",
             "column " + std::string(symbol_name(symbol)) + "/" + spec.state_name(src) +
                 " has squared norm " + std::to_string(norm2),
             dev});
    }

    // Pairwise orthogonality, via target-grouped Gram accumulation: only
    // columns sharing a target state can have a nonzero inner product.
    std::vector<std::vector<std::pair<int, std::complex<double>>>> by_target(spec.num_states);
    for (int ci = 0; ci < static_cast<int>(sources.size()); ++ci)
      for (const auto& e : spec.column(symbol, sources[ci]))
        by_target[e.target].emplace_back(ci, e.amplitude);
    std::vector<std::vector<std::pair<int, std::complex<double>>>> gram(sources.size());
    for (const auto& hits : by_target)
      for (std::size_t a = 0; a < hits.size(); ++a)
        for (std::size_t b = a + 1; b < hits.size(); ++b) {
          auto& row = gram[hits[a].first];
          const int other = hits[b].first;
          auto it = std::find_if(row.begin(), row.end(),
                                 [other](const auto& kv) { return kv.first == other; });
          const std::complex<double> term = std::conj(hits[a].second) * hits[b].second;
          if (it == row.end())
            row.emplace_back(other, term);
          else
            it->second += term;
        }
    for (std::size_t a = 0; a < gram.size(); ++a)
      for (const auto& [b, inner] : gram[a]) {
        const double dev = std::abs(inner);
        if (dev > kAmplitudeTol)
          report.violations.push_back(
              {"orthogonality",
               "columns " + std::string(symbol_name(symbol)) + "/" + spec.state_name(sources[a]) +
                   " and " + std::string(symbol_name(symbol)) + "/" + spec.state_name(sources[b]) +
                   " are not orthogonal",
               dev});
      }
  }
  return report;
}

/// PfaSpec invariants: partition consistency, entries in [0,1], and each
/// defined column summing to one.
inline WellformedReport check_wellformed(const PfaSpec& spec) {
  WellformedReport report;
  detail::check_partition(spec, report);
  for (int si = 0; si < kNumSymbols; ++si) {
    const Symbol symbol = static_cast<Symbol>(si);
    for (StateId src = 0; src < spec.num_states; ++src) {
      if (!spec.has_column(symbol, src)) continue;
      double sum = 0.0;
      for (const auto& e : spec.column(symbol, src)) {
        sum += e.amplitude;
        if (e.amplitude < -kProbabilityTol || e.amplitude > 1.0 + kProbabilityTol)
          report.violations.push_back(
              {"entry-range",
               "column " + std::string(symbol_name(symbol)) + "/" + spec.state_name(src) +
                   " has entry " + std::to_string(e.amplitude) + " outside [0,1]",
               std::max(-e.amplitude, e.amplitude - 1.0)});
      }
      const double dev = std::abs(1.0 - sum);
      if (dev > kProbabilityTol)
        report.violations.push_back(
            {"column-sum",
             "column " + std::string(symbol_name(symbol)) + "/" + spec.state_name(src) +
                 " sums to " + std::to_string(sum),
             dev});
    }
  }
  return report;
}

}  // namespace qfa
