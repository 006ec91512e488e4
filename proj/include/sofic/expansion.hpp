#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sofic/perm.hpp"
#include "sofic/rational.hpp"
#include "sofic/rng.hpp"

namespace sofic {

/// lambda = 0.1 is the working value throughout; configurable everywhere.
inline const Rat kDefaultLambda = Rat(1, 10);

/// Degrees up to this are checked by full subset enumeration (2^n bitset
/// masks, seconds-scale); beyond it only the one-sided sampled refuter runs.
inline constexpr std::uint32_t kExactExpanderLimit = 20;

enum class ExpVerdict { EXACT_PASS, REFUTED, SAMPLED_NO_REFUTATION };

inline const char* to_string(ExpVerdict v) {
  switch (v) {
    case ExpVerdict::EXACT_PASS: return "EXACT_PASS";
    case ExpVerdict::REFUTED: return "REFUTED";
    default: return "SAMPLED_NO_REFUTATION";
  }
}

/// Verdict plus everything needed to re-check it: a REFUTED certificate's
/// witness violates the defining inequality under exact arithmetic; an
/// EXACT_PASS carries the minimal boundary/trace ratio found.
struct ExpansionCertificate {
  Rat lambda;
  ExpVerdict verdict = ExpVerdict::SAMPLED_NO_REFUTATION;
  std::optional<Subset> witness;
  std::optional<Rat> min_ratio;
  long long trials = 0;
  std::uint64_t seed = 0;
};

/// sum_i |S delta p_i(S)| / n, the total boundary mass of S under the tuple.
/// Equals sum_i d_H(e, p_i e p_i*) for the diagonal projection e on S.
inline Rat boundary_sum(const GenTuple& t, const Subset& s) {
  if (s.degree() != t.degree())
    throw std::invalid_argument("boundary_sum: degree mismatch");
  std::uint64_t total = 0;
  for (const Perm& p : t.gens()) total += s.sym_diff_count(s.image_under(p));
  return Rat(static_cast<long long>(total), t.degree());
}

/// True iff S violates the expander condition at lambda, i.e.
/// lambda*Tr(S) >= boundary_sum (equality counts as a violation because
/// the definition's inequality is strict).
inline bool violates_expansion(const GenTuple& t, const Subset& s, const Rat& lambda) {
  if (s.empty() || 2ull * s.count() > t.degree()) return false;
  return lambda * s.trace() >= boundary_sum(t, s);
}

/// Full enumeration of all nonempty S with |S| <= n/2, in ascending bitmask
/// order. REFUTED returns the first violating subset; EXACT_PASS carries the
/// minimum of boundary/trace over all admissible subsets. Degree 1 has no
/// admissible subset and passes vacuously (min_ratio absent).
inline ExpansionCertificate check_expander_exact(const GenTuple& t, const Rat& lambda,
                                                 std::uint32_t exact_limit = kExactExpanderLimit) {
  std::uint32_t n = t.degree();
  if (n > exact_limit || n > 25)
    throw std::domain_error("check_expander_exact: degree over exact limit");
  ExpansionCertificate cert;
  cert.lambda = lambda;
  if (n == 1) {
    cert.verdict = ExpVerdict::EXACT_PASS;
    return cert;
  }
  std::uint32_t k = t.arity();
  std::vector<std::vector<std::uint32_t>> gen(k);
  for (std::uint32_t g = 0; g < k; ++g) gen[g] = t.gen(g).images();

  const std::uint64_t a = lambda.num() < 0 ? 0 : static_cast<std::uint64_t>(lambda.num());
  const std::uint64_t b = static_cast<std::uint64_t>(lambda.den());
  const std::uint32_t half = n / 2;
  std::uint64_t best_num = 0, best_den = 0;  // min of boundary/|S|
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::uint32_t size = static_cast<std::uint32_t>(__builtin_popcount(mask));
    if (size > half) continue;
    std::uint64_t boundary = 0;
    for (std::uint32_t g = 0; g < k; ++g) {
      std::uint32_t image = 0;
      for (std::uint32_t m = mask; m; m &= m - 1)
        image |= 1u << gen[g][static_cast<std::uint32_t>(__builtin_ctz(m))];
      boundary += static_cast<std::uint32_t>(__builtin_popcount(mask ^ image));
    }
    if (a * size >= b * boundary) {
      Subset s(n);
      for (std::uint32_t m = mask; m; m &= m - 1)
        s.insert(static_cast<std::uint32_t>(__builtin_ctz(m)));
      cert.verdict = ExpVerdict::REFUTED;
      cert.witness = s;
      cert.min_ratio = Rat(static_cast<long long>(boundary), size);
      return cert;
    }
    if (best_den == 0 || boundary * best_den < best_num * size) {
      best_num = boundary;
      best_den = size;
    }
  }
  cert.verdict = ExpVerdict::EXACT_PASS;
  cert.min_ratio = Rat(static_cast<long long>(best_num), static_cast<long long>(best_den));
  return cert;
}

namespace detail {

// Greedy steepest descent on boundary/|S| by single-element toggles. The
// boundary deltas are maintained in O(k) per toggle via the indicator
// c_g(x) = [x in S] xor [p_g^{-1}(x) in S]. Returns true (and fills
// `witness`) as soon as the current subset violates expansion at a/b.
class SubsetDescent {
public:
  SubsetDescent(const GenTuple& t) : n_(t.degree()), k_(t.arity()), memb_(n_, 0) {
    for (const Perm& p : t.gens()) {
      fwd_.push_back(p.images());
      inv_.push_back(p.inverse().images());
    }
  }

  void reset(const std::vector<std::uint32_t>& members) {
    std::fill(memb_.begin(), memb_.end(), 0);
    size_ = 0;
    for (std::uint32_t v : members) {
      if (!memb_[v]) { memb_[v] = 1; ++size_; }
    }
    boundary_ = 0;
    for (std::uint32_t g = 0; g < k_; ++g)
      for (std::uint32_t x = 0; x < n_; ++x)
        boundary_ += memb_[x] ^ memb_[inv_[g][x]];
  }

  // Net boundary change if v were toggled.
  long long toggle_delta(std::uint32_t v) const {
    long long d = 0;
    for (std::uint32_t g = 0; g < k_; ++g) {
      std::uint32_t w = fwd_[g][v];
      std::uint32_t pv = inv_[g][v];
      // term at position v: memb[v] ^ memb[pinv(v)]
      d -= memb_[v] ^ memb_[pv];
      d += (memb_[v] ^ 1) ^ (pv == v ? (memb_[v] ^ 1) : memb_[pv]);
      // term at position w = p(v): memb[w] ^ memb[v]; skip if same term
      if (w != v) {
        d -= memb_[w] ^ memb_[v];
        d += memb_[w] ^ (memb_[v] ^ 1);
      }
    }
    return d;
  }

  void toggle(std::uint32_t v) {
    boundary_ = static_cast<std::uint64_t>(static_cast<long long>(boundary_) + toggle_delta(v));
    size_ += memb_[v] ? -1 : 1;
    memb_[v] ^= 1;
  }

  bool violates(std::uint64_t a, std::uint64_t b) const {
    return size_ >= 1 && 2ull * size_ <= n_ && a * size_ >= b * boundary_;
  }

  std::uint64_t boundary() const { return boundary_; }
  std::uint32_t size() const { return size_; }

  Subset to_subset() const {
    Subset s(n_);
    for (std::uint32_t i = 0; i < n_; ++i)
      if (memb_[i]) s.insert(i);
    return s;
  }

  // One steepest-descent pass; returns true if a strictly improving move
  // was committed.
  bool step() {
    bool have = false;
    std::uint32_t best_v = 0;
    std::uint64_t best_num = 0, best_den = 1;
    for (std::uint32_t v = 0; v < n_; ++v) {
      std::uint32_t new_size = size_ + (memb_[v] ? -1 : 1);
      if (new_size < 1 || 2ull * new_size > n_) continue;
      std::uint64_t new_boundary =
          static_cast<std::uint64_t>(static_cast<long long>(boundary_) + toggle_delta(v));
      if (!have || new_boundary * best_den < best_num * new_size) {
        have = true;
        best_v = v;
        best_num = new_boundary;
        best_den = new_size;
      }
    }
    if (!have) return false;
    if (best_num * size_ >= boundary_ * best_den) return false;  // no strict improvement
    toggle(best_v);
    return true;
  }

private:
  std::uint32_t n_, k_;
  std::vector<std::vector<std::uint32_t>> fwd_, inv_;
  std::vector<std::uint8_t> memb_;
  std::uint32_t size_ = 0;
  std::uint64_t boundary_ = 0;
};

}  // namespace detail

/// One-sided check for degrees beyond exact enumeration: random subsets
/// followed by greedy local descent on boundary/trace. A REFUTED verdict is
/// sound (the witness re-checks exactly); no-refutation proves nothing.
/// Trial i draws its RNG from substream(seed, i), so the outcome does not
/// depend on scheduling.
inline ExpansionCertificate refute_expander_sampled(const GenTuple& t, const Rat& lambda,
                                                    long long trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("refute_expander_sampled: trials must be >= 1");
  std::uint32_t n = t.degree();
  ExpansionCertificate cert;
  cert.lambda = lambda;
  cert.seed = seed;
  const std::uint64_t a = lambda.num() < 0 ? 0 : static_cast<std::uint64_t>(lambda.num());
  const std::uint64_t b = static_cast<std::uint64_t>(lambda.den());
  detail::SubsetDescent descent(t);
  Rng root(seed);
  std::uint64_t best_num = 0, best_den = 0;
  auto note_ratio = [&] {
    if (descent.size() == 0) return;
    if (best_den == 0 || descent.boundary() * best_den < best_num * descent.size()) {
      best_num = descent.boundary();
      best_den = descent.size();
    }
  };
  for (long long trial = 0; trial < trials; ++trial) {
    cert.trials = trial + 1;
    Rng rng = root.substream(static_cast<std::uint64_t>(trial));
    std::uint32_t size = 1 + static_cast<std::uint32_t>(rng.below(std::max(1u, n / 2)));
    std::vector<std::uint32_t> pick = rng.random_images(n);
    pick.resize(size);
    descent.reset(pick);
    note_ratio();
    // Ratio strictly decreases each committed move, so this terminates;
    // the cap only guards against pathological long plateaus-free chains.
    for (std::uint32_t moves = 0; moves < 8 * n; ++moves) {
      if (descent.violates(a, b)) {
        cert.verdict = ExpVerdict::REFUTED;
        cert.witness = descent.to_subset();
        cert.min_ratio = Rat(static_cast<long long>(descent.boundary()), descent.size());
        return cert;
      }
      if (!descent.step()) break;
      note_ratio();
    }
    if (descent.violates(a, b)) {
      cert.verdict = ExpVerdict::REFUTED;
      cert.witness = descent.to_subset();
      cert.min_ratio = Rat(static_cast<long long>(descent.boundary()), descent.size());
      return cert;
    }
  }
  cert.verdict = ExpVerdict::SAMPLED_NO_REFUTATION;
  if (best_den)
    cert.min_ratio = Rat(static_cast<long long>(best_num), static_cast<long long>(best_den));
  return cert;
}

/// Dispatches to the exact checker when feasible, the sampled refuter
/// otherwise.
inline ExpansionCertificate check_expander(const GenTuple& t, const Rat& lambda,
                                           long long sampled_trials = 64,
                                           std::uint64_t seed = 0,
                                           std::uint32_t exact_limit = kExactExpanderLimit) {
  if (t.degree() <= exact_limit) return check_expander_exact(t, lambda, exact_limit);
  return refute_expander_sampled(t, lambda, sampled_trials, seed);
}

/// Outcome of the rejection sampler for pairs (a_n, c). `tries` is the
/// number of candidates drawn, an experimental datum in its own right.
struct ExpanderSample {
  bool found = false;
  GenTuple tuple;
  ExpansionCertificate cert;
  Rat freeness;
  int tries = 0;
};

/// Draws uniform random c until (a_n, c) passes the expansion check at
/// lambda and freeness_defect(., radius) < 1/2. Most draws succeed at
/// moderate n; the observed failure rate is reported, never asserted.
inline ExpanderSample sample_expander_pair(std::uint32_t n, const Rat& lambda,
                                           std::uint32_t radius, int max_tries,
                                           std::uint64_t seed,
                                           std::uint32_t exact_limit = kExactExpanderLimit,
                                           long long sampled_trials = 64) {
  if (n < 2) throw std::invalid_argument("sample_expander_pair: need n >= 2");
  ExpanderSample out;
  Perm a = cycle(n);
  Rng root(seed);
  for (int i = 0; i < max_tries; ++i) {
    out.tries = i + 1;
    Rng rng = root.substream(static_cast<std::uint64_t>(i));
    Perm c(rng.random_images(n));
    GenTuple t({a, c});
    ExpansionCertificate cert =
        check_expander(t, lambda, sampled_trials, rng.next(), exact_limit);
    if (cert.verdict == ExpVerdict::REFUTED) continue;
    Rat defect = freeness_defect(t, radius);
    if (!(defect < Rat(1, 2))) continue;
    out.found = true;
    out.tuple = t;
    out.cert = cert;
    out.freeness = defect;
    return out;
  }
  return out;
}

}  // namespace sofic
