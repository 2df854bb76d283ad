#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfa/automaton.hpp"
#include "qfa/numbers.hpp"

namespace qfa {

/// An N-point Fourier gathering block: source index k maps to targets
/// l = 1..N with amplitude exp(sign * 2pi*i * k*l / N) / sqrt(N). The N
/// induced columns are pairwise orthogonal unit vectors. sign = +1 is the
/// forward transform, -1 the inverse.
struct FourierBlock {
  int size = 1;
  int sign = +1;

  /// Amplitude for 1-based indices k (source) and l (target). The phase is
  /// computed from the reduced angle directly so it cannot drift for large
  /// k*l products.
  std::complex<double> amplitude(int k, int l) const {
    const long long reduced = (static_cast<long long>(k) * l) % size;
    const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(reduced) / size;
    return std::polar(1.0 / std::sqrt(static_cast<double>(size)), angle);
  }
};

// ---------------------------------------------------------------------------
// M0: the single-pair reversal checker (one prime family).
// ---------------------------------------------------------------------------

/// Id layout of the M0 machines. Families, in id order: the start state,
/// the phase-1 division grid, the phase-2 reverse-division grid, the
/// per-prime reject states (residue != 0), and the Fourier target states
/// s_1..s_N. Total 1 + 3 * sum(p_k).
class M0Layout {
 public:
  explicit M0Layout(PrimeSet primes) : primes_(std::move(primes)) {
    const int n = primes_.count();
    prefix_.assign(n + 1, 0);
    for (int k = 0; k < n; ++k) prefix_[k + 1] = prefix_[k] + primes_.primes[k];
    base_phase1_ = 1;
    base_phase2_ = base_phase1_ + prefix_[n];
    base_reject_ = base_phase2_ + prefix_[n];
    base_s_ = base_reject_ + (prefix_[n] - n);
    num_states_ = base_s_ + n;
  }

  const PrimeSet& primes() const { return primes_; }
  int num_states() const { return num_states_; }
  StateId start() const { return 0; }
  StateId phase1(int k, int j) const { return base_phase1_ + prefix_[k] + j; }
  StateId phase2(int k, int j) const { return base_phase2_ + prefix_[k] + j; }
  StateId reject(int k, int j) const { return base_reject_ + prefix_[k] - k + (j - 1); }
  StateId fourier_target(int l) const { return base_s_ + (l - 1); }  // l in 1..N

  std::vector<std::string> names() const {
    std::vector<std::string> out(num_states_);
    out[0] = "q0";
    for (int k = 0; k < primes_.count(); ++k) {
      const int p = primes_.primes[k];
      for (int j = 0; j < p; ++j) {
        out[phase1(k, j)] = "q[" + std::to_string(p) + "," + std::to_string(j) + ",1]";
        out[phase2(k, j)] = "q[" + std::to_string(p) + "," + std::to_string(j) + ",2]";
        if (j >= 1)
          out[reject(k, j)] = "q[" + std::to_string(p) + "," + std::to_string(j) + ",rej]";
      }
    }
    for (int l = 1; l <= primes_.count(); ++l) out[fourier_target(l)] = "s" + std::to_string(l);
    return out;
  }

 private:
  PrimeSet primes_;
  std::vector<int> prefix_;
  int base_phase1_ = 0, base_phase2_ = 0, base_reject_ = 0, base_s_ = 0;
  int num_states_ = 0;
};

namespace detail {

template <typename Amp>
MachineSpec<Amp> build_m0_impl(const PrimeSet& primes) {
  if (primes.count() == 0) throw std::invalid_argument("build_m0: prime set must be nonempty");
  constexpr bool quantum = !std::is_same_v<Amp, double>;
  const int n = primes.count();
  const M0Layout layout(primes);

  MachineSpec<Amp> spec;
  spec.init(layout.num_states());
  spec.state_names = layout.names();
  spec.initial = layout.start();

  // Left endmarker: split into one division branch per prime.
  {
    typename MachineSpec<Amp>::Column col;
    for (int k = 0; k < n; ++k) {
      if constexpr (quantum)
        col.push_back({layout.phase1(k, 0), Amp(1.0 / std::sqrt(static_cast<double>(n)))});
      else
        col.push_back({layout.phase1(k, 0), Amp(1.0 / n)});
    }
    spec.set_column(Symbol::LeftEnd, layout.start(), std::move(col));
  }

  // Bits: forward division in phase 1, reverse division in phase 2.
  for (int bit = 0; bit <= 1; ++bit) {
    const Symbol sym = bit ? Symbol::Bit1 : Symbol::Bit0;
    for (int k = 0; k < n; ++k) {
      const int p = primes.primes[k];
      for (int j = 0; j < p; ++j) {
        spec.set_column(sym, layout.phase1(k, j),
                        {{layout.phase1(k, forward_div_step(p, j, bit)), Amp(1)}});
        spec.set_column(sym, layout.phase2(k, j),
                        {{layout.phase2(k, reverse_div_step(p, j, bit)), Amp(1)}});
      }
    }
  }

  // Sharp: shift each branch from phase 1 to phase 2 at the same residue.
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < primes.primes[k]; ++j)
      spec.set_column(Symbol::Sharp, layout.phase1(k, j), {{layout.phase2(k, j), Amp(1)}});

  // Right endmarker: Fourier gathering from the zero-residue states, reject
  // from everything else. The emulating pfa routes the zero-residue mass
  // straight to s_N instead.
  const FourierBlock fourier{n, +1};
  for (int k = 0; k < n; ++k) {
    typename MachineSpec<Amp>::Column col;
    if constexpr (quantum) {
      for (int l = 1; l <= n; ++l)
        col.push_back({layout.fourier_target(l), fourier.amplitude(k + 1, l)});
    } else {
      col.push_back({layout.fourier_target(n), Amp(1)});
    }
    spec.set_column(Symbol::RightEnd, layout.phase2(k, 0), std::move(col));
    for (int j = 1; j < primes.primes[k]; ++j)
      spec.set_column(Symbol::RightEnd, layout.phase2(k, j), {{layout.reject(k, j), Amp(1)}});
  }

  spec.partition.accepting.push_back(layout.fourier_target(n));
  for (int k = 0; k < n; ++k)
    for (int j = 1; j < primes.primes[k]; ++j)
      spec.partition.rejecting.push_back(layout.reject(k, j));
  for (int l = 1; l < n; ++l) spec.partition.rejecting.push_back(layout.fourier_target(l));
  std::sort(spec.partition.rejecting.begin(), spec.partition.rejecting.end());
  for (StateId id = 0; id < spec.num_states; ++id) {
    if (id == layout.fourier_target(n)) continue;
    if (std::binary_search(spec.partition.rejecting.begin(), spec.partition.rejecting.end(), id))
      continue;
    spec.partition.nonhalting.push_back(id);
  }
  spec.rebuild_class_cache();
  return spec;
}

}  // namespace detail

/// Quantum single-pair checker: accepts w#w^R with probability one, other
/// pairs with (t/N)^2 where t counts colliding fingerprint primes.
inline QfaSpec build_m0q(const PrimeSet& primes) {
  return detail::build_m0_impl<std::complex<double>>(primes);
}

/// Probabilistic emulation of build_m0q: identical states and columns
/// except the endmarker split carries probability 1/N per branch and the
/// Fourier gathering becomes a deterministic move to s_N.
inline PfaSpec build_m0p(const PrimeSet& primes) { return detail::build_m0_impl<double>(primes); }

inline long long m0_state_count(const PrimeSet& primes) { return 1 + 3 * primes.sum(); }

// ---------------------------------------------------------------------------
// M1 / M2: the four-word machine and its iterated variant.
// ---------------------------------------------------------------------------

/// Prime families for the two concurrent fingerprint checks: primes1 (N1
/// moduli) watches w1 against w2 reversed, primes2 (N2 moduli) watches the
/// concatenation w1w2 against w3w4 reversed.
struct M1Params {
  PrimeSet primes1;
  PrimeSet primes2;
};

/// Id layout of the M1/M2 machines. Per (k, l) prime pair the residue pair
/// (e, f) walks through four reading grids; between them sit the hold
/// states parked during the mid-word Fourier gathering, the Fourier targets
/// s_(m, l, f), the reject grid, and the two end-gathering families
/// t_(p_k, y) and t_z. The looped variant appends one extra reject state
/// per (k, l) pair so the right endmarker is total on reading grid 4.
class M1Layout {
 public:
  M1Layout(M1Params params, bool looped) : params_(std::move(params)), looped_(looped) {
    const int n1 = params_.primes1.count();
    const int n2 = params_.primes2.count();
    if (n1 == 0 || n2 == 0)
      throw std::invalid_argument("M1Layout: both prime sets must be nonempty");
    p2_prefix_.assign(n2 + 1, 0);
    for (int l = 0; l < n2; ++l) p2_prefix_[l + 1] = p2_prefix_[l] + params_.primes2.primes[l];
    pair_prefix_.assign(n1 * n2 + 1, 0);
    hold_prefix_.assign(n1 * n2 + 1, 0);
    for (int k = 0; k < n1; ++k)
      for (int l = 0; l < n2; ++l) {
        const int idx = k * n2 + l;
        const int pk = params_.primes1.primes[k];
        const int pl = params_.primes2.primes[l];
        pair_prefix_[idx + 1] = pair_prefix_[idx] + pk * pl;
        hold_prefix_[idx + 1] = hold_prefix_[idx] + (pk - 1) * pl;
      }
    const int grid = pair_prefix_[n1 * n2];
    base_stage_[0] = 1;
    base_stage_[1] = base_stage_[0] + grid;
    base_hold_ = base_stage_[1] + grid;
    base_stage_[2] = base_hold_ + hold_prefix_[n1 * n2];
    base_stage_[3] = base_stage_[2] + grid;
    base_s_ = base_stage_[3] + grid;
    base_reject_ = base_s_ + n1 * p2_prefix_[n2];
    base_t_pair_ = base_reject_ + (grid - n1 * n2);
    base_t_final_ = base_t_pair_ + n1 * n2;
    base_reject00_ = base_t_final_ + n1;
    num_states_ = base_reject00_ + (looped_ ? n1 * n2 : 0);
  }

  const M1Params& params() const { return params_; }
  bool looped() const { return looped_; }
  int n1() const { return params_.primes1.count(); }
  int n2() const { return params_.primes2.count(); }
  int prime1(int k) const { return params_.primes1.primes[k]; }
  int prime2(int l) const { return params_.primes2.primes[l]; }
  int num_states() const { return num_states_; }

  StateId start() const { return 0; }

  /// Reading grids st = 1..4; k, l are 0-based prime indices, (e, f) the
  /// residue pair.
  StateId stage(int st, int k, int e, int l, int f) const {
    return base_stage_[st - 1] + pair_prefix_[k * n2() + l] + e * prime2(l) + f;
  }
  StateId hold(int k, int e, int l, int f) const {  // e in [1, p_k)
    return base_hold_ + hold_prefix_[k * n2() + l] + (e - 1) * prime2(l) + f;
  }
  StateId s_state(int m, int l, int f) const {  // m in 1..N1
    return base_s_ + (m - 1) * p2_prefix_[n2()] + p2_prefix_[l] + f;
  }
  StateId reject(int k, int e, int l, int f) const {  // (e, f) != (0, 0)
    return base_reject_ + pair_prefix_[k * n2() + l] - (k * n2() + l) + e * prime2(l) + f - 1;
  }
  StateId reject00(int k, int l) const {  // looped variant only
    return base_reject00_ + k * n2() + l;
  }
  StateId t_pair(int k, int y) const { return base_t_pair_ + k * n2() + (y - 1); }  // y in 1..N2
  StateId t_final(int z) const { return base_t_final_ + (z - 1); }                  // z in 1..N1

  /// The accepting family measured at the mid-word Fourier gathering.
  std::vector<StateId> stage3_accepting() const {
    std::vector<StateId> out;
    for (int l = 0; l < n2(); ++l)
      for (int f = 0; f < prime2(l); ++f) out.push_back(s_state(n1(), l, f));
    return out;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out(num_states_);
    out[0] = "q0";
    auto pair_tag = [this](int k, int e, int l, int f) {
      return std::to_string(prime1(k)) + "," + std::to_string(e) + "|" +
             std::to_string(prime2(l)) + "," + std::to_string(f);
    };
    for (int k = 0; k < n1(); ++k)
      for (int l = 0; l < n2(); ++l)
        for (int e = 0; e < prime1(k); ++e)
          for (int f = 0; f < prime2(l); ++f) {
            for (int st = 1; st <= 4; ++st)
              out[stage(st, k, e, l, f)] =
                  "q[" + pair_tag(k, e, l, f) + "|" + std::to_string(st) + "]";
            if (e >= 1) out[hold(k, e, l, f)] = "q[" + pair_tag(k, e, l, f) + "|hold]";
            if (e != 0 || f != 0) out[reject(k, e, l, f)] = "q[" + pair_tag(k, e, l, f) + "|rej]";
          }
    for (int m = 1; m <= n1(); ++m)
      for (int l = 0; l < n2(); ++l)
        for (int f = 0; f < prime2(l); ++f)
          out[s_state(m, l, f)] = "s[" + std::to_string(m) + "|" + std::to_string(prime2(l)) +
                                  "," + std::to_string(f) + "]";
    for (int k = 0; k < n1(); ++k)
      for (int y = 1; y <= n2(); ++y)
        out[t_pair(k, y)] = "t[" + std::to_string(prime1(k)) + "|" + std::to_string(y) + "]";
    for (int z = 1; z <= n1(); ++z) out[t_final(z)] = "t" + std::to_string(z);
    if (looped_)
      for (int k = 0; k < n1(); ++k)
        for (int l = 0; l < n2(); ++l) out[reject00(k, l)] = "q[" + pair_tag(k, 0, l, 0) + "|rej]";
    return out;
  }

 private:
  M1Params params_;
  bool looped_;
  std::vector<int> p2_prefix_, pair_prefix_, hold_prefix_;
  int base_stage_[4] = {0, 0, 0, 0};
  int base_hold_ = 0, base_s_ = 0, base_reject_ = 0, base_t_pair_ = 0, base_t_final_ = 0,
      base_reject00_ = 0;
  int num_states_ = 0;
};

namespace detail {

template <typename Amp>
MachineSpec<Amp> build_m1_impl(const M1Params& params, bool looped) {
  constexpr bool quantum = !std::is_same_v<Amp, double>;
  const M1Layout layout(params, looped);
  const int n1 = layout.n1();
  const int n2 = layout.n2();

  MachineSpec<Amp> spec;
  spec.init(layout.num_states());
  spec.state_names = layout.names();
  spec.initial = layout.start();

  const double split = 1.0 / (static_cast<double>(n1) * n2);

  // Left endmarker: split into one branch per (k, l) prime pair.
  {
    typename MachineSpec<Amp>::Column col;
    for (int k = 0; k < n1; ++k)
      for (int l = 0; l < n2; ++l) {
        if constexpr (quantum)
          col.push_back({layout.stage(1, k, 0, l, 0), Amp(std::sqrt(split))});
        else
          col.push_back({layout.stage(1, k, 0, l, 0), Amp(split)});
      }
    spec.set_column(Symbol::LeftEnd, layout.start(), std::move(col));
  }

  // Bits: per reading grid, e and f advance by the forward or reverse
  // division map. Grid 1 reads w1 (both forward), grid 2 reads w2
  // (e reverses, f continues forward across the concatenation), grid 3
  // reads w3 (e forward again, f reverses), grid 4 reads w4 (both reverse).
  for (int bit = 0; bit <= 1; ++bit) {
    const Symbol sym = bit ? Symbol::Bit1 : Symbol::Bit0;
    for (int k = 0; k < n1; ++k) {
      const int pk = layout.prime1(k);
      for (int l = 0; l < n2; ++l) {
        const int pl = layout.prime2(l);
        for (int e = 0; e < pk; ++e)
          for (int f = 0; f < pl; ++f) {
            const int ef = forward_div_step(pk, e, bit);
            const int er = reverse_div_step(pk, e, bit);
            const int ff = forward_div_step(pl, f, bit);
            const int fr = reverse_div_step(pl, f, bit);
            spec.set_column(sym, layout.stage(1, k, e, l, f),
                            {{layout.stage(1, k, ef, l, ff), Amp(1)}});
            spec.set_column(sym, layout.stage(2, k, e, l, f),
                            {{layout.stage(2, k, er, l, ff), Amp(1)}});
            spec.set_column(sym, layout.stage(3, k, e, l, f),
                            {{layout.stage(3, k, ef, l, fr), Amp(1)}});
            spec.set_column(sym, layout.stage(4, k, e, l, f),
                            {{layout.stage(4, k, er, l, fr), Amp(1)}});
          }
      }
    }
  }

  const FourierBlock gather1{n1, +1};
  const FourierBlock scatter1{n1, -1};
  const FourierBlock gather2{n2, +1};

  // Sharps. One symbol carries the whole mid-machine choreography; the
  // columns stay mutually orthogonal because each family targets its own
  // disjoint state family.
  for (int k = 0; k < n1; ++k) {
    const int pk = layout.prime1(k);
    for (int l = 0; l < n2; ++l) {
      const int pl = layout.prime2(l);
      for (int e = 0; e < pk; ++e)
        for (int f = 0; f < pl; ++f) {
          // Grid 1 -> grid 2 shift between w1 and w2.
          spec.set_column(Symbol::Sharp, layout.stage(1, k, e, l, f),
                          {{layout.stage(2, k, e, l, f), Amp(1)}});
          // Grid 3 -> grid 4 shift between w3 and w4.
          spec.set_column(Symbol::Sharp, layout.stage(3, k, e, l, f),
                          {{layout.stage(4, k, e, l, f), Amp(1)}});
          if (e >= 1) {
            // Nonzero e parks in a hold state across the double sharp...
            spec.set_column(Symbol::Sharp, layout.stage(2, k, e, l, f),
                            {{layout.hold(k, e, l, f), Amp(1)}});
            // ...and resumes in grid 3 on the second sharp.
            spec.set_column(Symbol::Sharp, layout.hold(k, e, l, f),
                            {{layout.stage(3, k, e, l, f), Amp(1)}});
          }
          // Grid 4 at (0, 0) feeds the end gathering; everything else
          // rejects. The inverse transform can leave mass on e != 0,
          // f = 0 states, so the reject column must cover every nonzero
          // residue pair, not just f != 0.
          if (e != 0 || f != 0)
            spec.set_column(Symbol::Sharp, layout.stage(4, k, e, l, f),
                            {{layout.reject(k, e, l, f), Amp(1)}});
        }

      // Zero-e states Fourier-gather over k into the s family (the pfa
      // emulation moves the mass straight to the accepting s_(N1, l, f)).
      for (int f = 0; f < pl; ++f) {
        typename MachineSpec<Amp>::Column col;
        if constexpr (quantum) {
          for (int m = 1; m <= n1; ++m)
            col.push_back({layout.s_state(m, l, f), gather1.amplitude(k + 1, m)});
        } else {
          col.push_back({layout.s_state(n1, l, f), Amp(1)});
        }
        spec.set_column(Symbol::Sharp, layout.stage(2, k, 0, l, f), std::move(col));
      }

      // Grid 4 origin gathers over l into the t_pair family.
      {
        typename MachineSpec<Amp>::Column col;
        if constexpr (quantum) {
          for (int y = 1; y <= n2; ++y)
            col.push_back({layout.t_pair(k, y), gather2.amplitude(l + 1, y)});
        } else {
          col.push_back({layout.t_pair(k, n2), Amp(1)});
        }
        spec.set_column(Symbol::Sharp, layout.stage(4, k, 0, l, 0), std::move(col));
      }
    }
  }

  // Inverse transform off the s family back into grid 3 (second sharp).
  // The pfa emulation passes s_(m, l, f) through to its own branch.
  for (int m = 1; m <= n1; ++m)
    for (int l = 0; l < n2; ++l)
      for (int f = 0; f < layout.prime2(l); ++f) {
        typename MachineSpec<Amp>::Column col;
        if constexpr (quantum) {
          for (int r = 1; r <= n1; ++r)
            col.push_back({layout.stage(3, r - 1, 0, l, f), scatter1.amplitude(m, r)});
        } else {
          col.push_back({layout.stage(3, m - 1, 0, l, f), Amp(1)});
        }
        spec.set_column(Symbol::Sharp, layout.s_state(m, l, f), std::move(col));
      }

  // Final gathering from t_(p_k, N2) over k into t_1..t_N1, keyed on the
  // right endmarker; the looped variant repeats it on sharp so iterations
  // can resolve mid-word, and returns t_N1 to the start-of-block split.
  auto t_final_column = [&](int k) {
    typename MachineSpec<Amp>::Column col;
    if constexpr (quantum) {
      for (int z = 1; z <= n1; ++z)
        col.push_back({layout.t_final(z), gather1.amplitude(k + 1, z)});
    } else {
      col.push_back({layout.t_final(n1), Amp(1)});
    }
    return col;
  };
  for (int k = 0; k < n1; ++k)
    spec.set_column(Symbol::RightEnd, layout.t_pair(k, n2), t_final_column(k));

  if (looped) {
    for (int k = 0; k < n1; ++k)
      spec.set_column(Symbol::Sharp, layout.t_pair(k, n2), t_final_column(k));
    {
      typename MachineSpec<Amp>::Column col;
      for (int k = 0; k < n1; ++k)
        for (int l = 0; l < n2; ++l) {
          if constexpr (quantum)
            col.push_back({layout.stage(1, k, 0, l, 0), Amp(std::sqrt(split))});
          else
            col.push_back({layout.stage(1, k, 0, l, 0), Amp(split)});
        }
      spec.set_column(Symbol::Sharp, layout.t_final(n1), std::move(col));
    }
    // Right endmarker is total on grid 4: a word ending mid-block rejects.
    for (int k = 0; k < n1; ++k)
      for (int l = 0; l < n2; ++l)
        for (int e = 0; e < layout.prime1(k); ++e)
          for (int f = 0; f < layout.prime2(l); ++f) {
            const StateId target =
                (e == 0 && f == 0) ? layout.reject00(k, l) : layout.reject(k, e, l, f);
            spec.set_column(Symbol::RightEnd, layout.stage(4, k, e, l, f), {{target, Amp(1)}});
          }
  }

  // Partition. Accepting: the full-gathering s states, plus t_N1 in the
  // unlooped machine (the looped one keeps t_N1 live for the next block).
  for (int l = 0; l < n2; ++l)
    for (int f = 0; f < layout.prime2(l); ++f)
      spec.partition.accepting.push_back(layout.s_state(n1, l, f));
  if (!looped) spec.partition.accepting.push_back(layout.t_final(n1));
  for (int k = 0; k < n1; ++k)
    for (int l = 0; l < n2; ++l)
      for (int e = 0; e < layout.prime1(k); ++e)
        for (int f = 0; f < layout.prime2(l); ++f)
          if (e != 0 || f != 0) spec.partition.rejecting.push_back(layout.reject(k, e, l, f));
  for (int k = 0; k < n1; ++k)
    for (int y = 1; y < n2; ++y) spec.partition.rejecting.push_back(layout.t_pair(k, y));
  for (int z = 1; z < n1; ++z) spec.partition.rejecting.push_back(layout.t_final(z));
  if (looped)
    for (int k = 0; k < n1; ++k)
      for (int l = 0; l < n2; ++l) spec.partition.rejecting.push_back(layout.reject00(k, l));

  std::sort(spec.partition.accepting.begin(), spec.partition.accepting.end());
  std::sort(spec.partition.rejecting.begin(), spec.partition.rejecting.end());
  for (StateId id = 0; id < spec.num_states; ++id) {
    if (std::binary_search(spec.partition.accepting.begin(), spec.partition.accepting.end(), id))
      continue;
    if (std::binary_search(spec.partition.rejecting.begin(), spec.partition.rejecting.end(), id))
      continue;
    spec.partition.nonhalting.push_back(id);
  }
  spec.rebuild_class_cache();
  return spec;
}

}  // namespace detail

/// Quantum four-word machine: checks w1 = w2^R with the primes1 family
/// while the primes2 family fingerprints w1w2 against (w3w4)^R, recovering
/// the unaccepted amplitude through the inverse transform and the reverse
/// reading grids.
inline QfaSpec build_m1q(const M1Params& params) {
  return detail::build_m1_impl<std::complex<double>>(params, false);
}

/// Probabilistic emulation of build_m1q: Fourier and inverse-Fourier blocks
/// become deterministic moves, everything else is shared.
inline PfaSpec build_m1p(const M1Params& params) {
  return detail::build_m1_impl<double>(params, false);
}

/// Iterated variant: the end gathering re-keys onto sharp, t_N1 turns
/// non-halting and re-splits into the next block, and the right endmarker
/// becomes total (mass still mid-block when input ends is rejected). With
/// loop = false this reproduces build_m1q column for column.
inline QfaSpec build_m2q(const M1Params& params, bool loop = true) {
  return detail::build_m1_impl<std::complex<double>>(params, loop);
}

inline PfaSpec build_m2p(const M1Params& params, bool loop = true) {
  return detail::build_m1_impl<double>(params, loop);
}

inline long long m1_state_count(const M1Params& params) {
  return 6 * params.primes1.sum() * params.primes2.sum() + params.primes1.count() + 1;
}
inline long long m2_state_count(const M1Params& params) {
  return m1_state_count(params) +
         static_cast<long long>(params.primes1.count()) * params.primes2.count();
}

// ---------------------------------------------------------------------------
// Parameter derivations.
// ---------------------------------------------------------------------------

/// Block length, iteration exponent, N2 multiplier and the acceptance
/// scaling constant for the iterated machines.
struct TheoremParams {
  int n = 4;
  int c = 1;
  int d = 3;
  double a = 4.0;
};

namespace detail {
inline int ceil_positive(double v, const char* what) {
  const int result = static_cast<int>(std::ceil(v - 1e-9));
  if (result < 1)
    throw std::invalid_argument(std::string(what) +
                                ": derived prime count is not positive (n too small?)");
  return result;
}
}  // namespace detail

/// N1 = ceil(N0 * sqrt(n)) and N2 = d * N0': the single-block trade-off
/// making the quantum mid-word error rate 1/n.
inline M1Params lemma7_params(int n, int d) {
  if (d < 1) throw std::invalid_argument("lemma7_params: d must be >= 1");
  const int n0 = max_common_primes(n).max_common;
  const int n0p = max_common_primes(2 * n).max_common;
  const int num1 = detail::ceil_positive(n0 * std::sqrt(static_cast<double>(n)), "lemma7_params");
  return M1Params{odd_primes(num1), odd_primes(d * n0p)};
}

/// N1 = ceil(2 * N0 * n^(c/2)) and N2 = d * N0': the iterated quantum
/// machine's parameterization.
inline M1Params theorem1_params(int n, int c, int d) {
  if (c < 0 || d < 1) throw std::invalid_argument("theorem1_params: need c >= 0 and d >= 1");
  const int n0 = max_common_primes(n).max_common;
  const int n0p = max_common_primes(2 * n).max_common;
  const int num1 = detail::ceil_positive(
      2.0 * n0 * std::pow(static_cast<double>(n), 0.5 * c), "theorem1_params");
  return M1Params{odd_primes(num1), odd_primes(d * n0p)};
}

inline M1Params theorem1_params(const TheoremParams& tp) {
  return theorem1_params(tp.n, tp.c, tp.d);
}

/// N1 = ceil(N0 * n^c / a) and N2 = d * N0': the emulating-pfa
/// parameterization whose per-iteration acceptance is about a / n^c.
inline M1Params theorem2_params(int n, int c, double a, int d) {
  if (c < 0 || d < 1 || a <= 0.0)
    throw std::invalid_argument("theorem2_params: need c >= 0, d >= 1, a > 0");
  const int n0 = max_common_primes(n).max_common;
  const int n0p = max_common_primes(2 * n).max_common;
  const int num1 = detail::ceil_positive(
      n0 * std::pow(static_cast<double>(n), static_cast<double>(c)) / a, "theorem2_params");
  return M1Params{odd_primes(num1), odd_primes(d * n0p)};
}

inline M1Params theorem2_params(const TheoremParams& tp) {
  return theorem2_params(tp.n, tp.c, tp.a, tp.d);
}

}  // namespace qfa
