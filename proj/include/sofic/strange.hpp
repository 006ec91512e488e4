#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sofic/census.hpp"
#include "sofic/conjugacy.hpp"
#include "sofic/expansion.hpp"
#include "sofic/perm.hpp"
#include "sofic/rational.hpp"
#include "sofic/rng.hpp"

namespace sofic {

// ---------------------------------------------------------------------------
// Almost disjoint families F_t = { floor(10^k t) : k >= 1 }
// ---------------------------------------------------------------------------

struct AlmostDisjointSet {
  Rat t;  // index in [1/10, 1), exact
  std::vector<std::uint64_t> elems;
};

/// Truncations of the sets F_t for sampled t: any two distinct returned
/// sets agree only on a prefix whose length is controlled by |t - t'|.
/// Elements are computed in exact integer arithmetic.
inline std::vector<AlmostDisjointSet> almost_disjoint_family(std::uint32_t count,
                                                             std::uint64_t seed,
                                                             std::uint32_t terms = 8) {
  if (count < 1) throw std::invalid_argument("almost_disjoint_family: count must be >= 1");
  if (terms > 18) throw std::invalid_argument("almost_disjoint_family: terms capped at 18");
  constexpr std::uint64_t kDen = 1'000'000'000ull;  // t has nine digits
  Rng root(seed);
  std::vector<AlmostDisjointSet> out;
  for (std::uint32_t idx = 0; idx < count; ++idx) {
    Rng rng = root.substream(idx);
    std::uint64_t z = kDen / 10 + rng.below(kDen - kDen / 10);  // in [10^8, 10^9)
    AlmostDisjointSet s;
    s.t = Rat(static_cast<long long>(z), static_cast<long long>(kDen));
    __uint128_t scaled = z;
    for (std::uint32_t k = 1; k <= terms; ++k) {
      scaled *= 10;
      s.elems.push_back(static_cast<std::uint64_t>(scaled / kDen));
    }
    out.push_back(std::move(s));
  }
  return out;
}

/// F_t truncation for an explicitly given rational t (used by tests against
/// hand-computed values).
inline std::vector<std::uint64_t> almost_disjoint_set(const Rat& t, std::uint32_t terms) {
  if (!(t >= Rat(1, 10)) || !(t < Rat(1)))
    throw std::invalid_argument("almost_disjoint_set: t must lie in [1/10, 1)");
  if (terms > 18) throw std::invalid_argument("almost_disjoint_set: terms capped at 18");
  std::vector<std::uint64_t> out;
  __uint128_t num = static_cast<std::uint64_t>(t.num());
  for (std::uint32_t k = 1; k <= terms; ++k) {
    num *= 10;
    out.push_back(static_cast<std::uint64_t>(num / static_cast<std::uint64_t>(t.den())));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Families of pairwise-far expander pairs
// ---------------------------------------------------------------------------

/// One pairwise distance record. EXACT values certify d_S > lambda;
/// heuristic values are annealed upper bounds and count as evidence only
/// (an upper bound above lambda does not bound d_S from below).
struct PairEvidence {
  std::uint32_t i = 0, j = 0;
  Rat value;
  bool exact = false;
  Perm witness;
};

struct FarExpanderFamily {
  std::uint32_t n = 0;
  Rat lambda;
  Rat separation;
  std::uint32_t radius = 0;
  std::uint32_t target = 0;
  std::vector<Perm> members;
  std::vector<ExpansionCertificate> certs;
  std::vector<Rat> freeness;
  std::vector<PairEvidence> pairwise;
  std::uint64_t seed = 0;
  std::uint64_t candidates_tried = 0;
  bool complete = false;
};

/// Rejection-samples permutations c so that every accepted (a, c) passes the
/// expansion check at lambda, has freeness defect below 1/k on the given
/// word ball, and sits at (evidenced) conjugacy distance above `separation`
/// from every previously accepted member. The expansion and separation
/// thresholds are independent knobs; both default to 1/10. Budget
/// exhaustion returns the partial family.
inline FarExpanderFamily pick_far_expanders(std::uint32_t n, std::uint32_t k,
                                            const Rat& lambda, const Rat& separation,
                                            std::uint32_t radius,
                                            std::uint64_t seed, std::uint64_t budget,
                                            std::uint64_t anneal_steps = 20000,
                                            std::uint32_t exact_limit = kExactExpanderLimit) {
  if (k < 1) throw std::invalid_argument("pick_far_expanders: k must be >= 1");
  FarExpanderFamily fam;
  fam.n = n;
  fam.lambda = lambda;
  fam.separation = separation;
  fam.radius = radius;
  fam.target = k;
  fam.seed = seed;
  Perm a = cycle(n);
  Rng root(seed);
  for (std::uint64_t cand = 0; cand < budget && fam.members.size() < k; ++cand) {
    fam.candidates_tried = cand + 1;
    Rng rng = root.substream(cand);
    Perm c(rng.random_images(n));
    GenTuple t({a, c});
    ExpansionCertificate cert = check_expander(t, lambda, 32, rng.next(), exact_limit);
    if (cert.verdict == ExpVerdict::REFUTED) continue;
    Rat defect = freeness_defect(t, radius);
    if (!(defect < Rat(1, k))) continue;
    bool far = true;
    std::vector<PairEvidence> evidence;
    for (std::uint32_t m = 0; m < fam.members.size() && far; ++m) {
      GenTuple prev({a, fam.members[m]});
      ConjugacyResult d = conjugacy_search(prev, t, anneal_steps, rng.next());
      if (!(d.value > separation)) {
        far = false;
        break;
      }
      evidence.push_back({m, static_cast<std::uint32_t>(fam.members.size()),
                          d.value, d.exact, d.witness});
    }
    if (!far) continue;
    fam.members.push_back(c);
    fam.certs.push_back(cert);
    fam.freeness.push_back(defect);
    for (auto& e : evidence) fam.pairwise.push_back(std::move(e));
  }
  fam.complete = fam.members.size() == k;
  return fam;
}

// ---------------------------------------------------------------------------
// T-candidates: block-diagonal permutations with small Coxeter length
// ---------------------------------------------------------------------------

/// floor(1/delta) blocks of size floor(n/k); the last block absorbs the
/// remainder.
inline std::vector<std::uint32_t> t_block_sizes(std::uint32_t n, const Rat& delta) {
  if (!(delta > Rat(0))) throw std::invalid_argument("t_block_sizes: delta must be positive");
  std::uint32_t k = static_cast<std::uint32_t>(delta.den() / delta.num());
  if (k < 1) k = 1;
  if (n < k) throw std::invalid_argument("t_block_sizes: need n >= floor(1/delta)");
  std::uint32_t m = n / k;
  std::vector<std::uint32_t> sizes(k, m);
  sizes.back() += n % k;
  return sizes;
}

/// Block-diagonal permutation: an independent uniform permutation inside
/// each block.
inline Perm random_block_diagonal(const std::vector<std::uint32_t>& sizes, Rng& rng) {
  std::vector<std::uint32_t> img;
  std::uint32_t offset = 0;
  for (std::uint32_t size : sizes) {
    for (std::uint32_t v : rng.random_images(size)) img.push_back(offset + v);
    offset += size;
  }
  return Perm(std::move(img));
}

struct TCandidate {
  bool found = false;
  Perm p;
  Rat delta;
  Rat coxeter_len;
  Word worst;
  Rat worst_fix;
  std::vector<std::uint32_t> block_sizes;
  std::uint32_t tries_used = 0;
};

/// Draws block-diagonal candidates until one passes in_T(p, delta); in_T is
/// the oracle, the block shape only biases the draw toward small Coxeter
/// length.
inline TCandidate build_T_candidate(std::uint32_t n, const Rat& delta, std::uint64_t seed,
                                    std::uint32_t tries,
                                    std::uint64_t budget = kDefaultWordBallBudget) {
  TCandidate out;
  out.delta = delta;
  out.block_sizes = t_block_sizes(n, delta);
  Rng root(seed);
  for (std::uint32_t i = 0; i < tries; ++i) {
    out.tries_used = i + 1;
    Rng rng = root.substream(i);
    Perm p = random_block_diagonal(out.block_sizes, rng);
    TMembership m = in_T(p, delta, budget);
    if (m.member) {
      out.found = true;
      out.p = p;
      out.coxeter_len = m.coxeter_len;
      out.worst = m.worst;
      out.worst_fix = m.worst_fix;
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// K-membership refutation sampling (degrees beyond the exhaustive loop)
// ---------------------------------------------------------------------------

struct KRefutation {
  long long trials = 0;
  std::uint64_t seed = 0;
  bool refuted = false;
  std::optional<Perm> witness;
  std::string strategy = "mixed(uniform,cycle-power,small-support,block-swap)";
};

namespace detail {

inline bool k_violates(const Perm& b, const Perm& c, const Rat& delta) {
  std::uint32_t n = c.degree();
  const std::uint64_t u = static_cast<std::uint64_t>(delta.num() < 0 ? 0 : delta.num());
  const std::uint64_t v = static_cast<std::uint64_t>(delta.den());
  std::uint64_t moved = 0, cab = 0, cbc = 0;
  const auto& bi = b.images();
  const auto& ci = c.images();
  for (std::uint32_t i = 0; i < n; ++i) {
    moved += bi[i] != i;
    cab += (bi[i] + 1) % n != bi[(i + 1) % n];
    cbc += ci[bi[i]] != bi[ci[i]];
  }
  return moved * v > 22 * std::max({cab * v, cbc * v, u * n});
}

}  // namespace detail

/// Searches for b violating the K_n^delta inequality for c, mixing uniform
/// draws with the structured candidates that violate in degenerate cases:
/// powers of the cycle, small-support permutations, and block swaps.
/// Deterministic replay from (seed, trials, block_sizes).
inline KRefutation sample_k_refutation(const Perm& c, const Rat& delta, long long trials,
                                       std::uint64_t seed,
                                       const std::vector<std::uint32_t>& block_sizes = {}) {
  std::uint32_t n = c.degree();
  KRefutation out;
  out.seed = seed;
  Rng root(seed);
  std::vector<std::uint32_t> offsets;
  {
    std::uint32_t off = 0;
    for (std::uint32_t s : block_sizes) {
      offsets.push_back(off);
      off += s;
    }
  }
  for (long long trial = 0; trial < trials; ++trial) {
    out.trials = trial + 1;
    Rng rng = root.substream(static_cast<std::uint64_t>(trial));
    Perm b;
    switch (trial % 4) {
      case 0: {  // uniform
        b = Perm(rng.random_images(n));
        break;
      }
      case 1: {  // power of the cycle
        std::uint32_t j = 1 + static_cast<std::uint32_t>(rng.below(n - 1));
        std::vector<std::uint32_t> img(n);
        for (std::uint32_t i = 0; i < n; ++i) img[i] = (i + j) % n;
        b = Perm(std::move(img));
        break;
      }
      case 2: {  // small support: a few random transpositions
        std::vector<std::uint32_t> img(n);
        for (std::uint32_t i = 0; i < n; ++i) img[i] = i;
        std::uint32_t swaps = 1 + static_cast<std::uint32_t>(rng.below(3));
        for (std::uint32_t s = 0; s < swaps; ++s) {
          std::uint32_t i = static_cast<std::uint32_t>(rng.below(n));
          std::uint32_t j = static_cast<std::uint32_t>(rng.below(n));
          std::swap(img[i], img[j]);
        }
        b = Perm(std::move(img));
        break;
      }
      default: {  // wholesale swap of two equal-size blocks
        std::vector<std::uint32_t> img(n);
        for (std::uint32_t i = 0; i < n; ++i) img[i] = i;
        if (block_sizes.size() >= 2) {
          std::uint32_t p = static_cast<std::uint32_t>(rng.below(block_sizes.size()));
          std::uint32_t q = static_cast<std::uint32_t>(rng.below(block_sizes.size()));
          if (p != q && block_sizes[p] == block_sizes[q]) {
            for (std::uint32_t i = 0; i < block_sizes[p]; ++i) {
              img[offsets[p] + i] = offsets[q] + i;
              img[offsets[q] + i] = offsets[p] + i;
            }
          } else if (!block_sizes.empty()) {  // fallback: shuffle inside one block
            std::uint32_t bidx = p;
            auto shuffled = rng.random_images(block_sizes[bidx]);
            for (std::uint32_t i = 0; i < block_sizes[bidx]; ++i)
              img[offsets[bidx] + i] = offsets[bidx] + shuffled[i];
          }
        } else {
          b = Perm(rng.random_images(n));
          break;
        }
        b = Perm(std::move(img));
        break;
      }
    }
    if (detail::k_violates(b, c, delta)) {
      out.refuted = true;
      out.witness = b;
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// The strange-representation candidate: p in K & T simultaneously
// ---------------------------------------------------------------------------

struct StrangeCandidate {
  Perm p;
  Rat delta;
  Rat coxeter_len;
  Word worst;
  Rat worst_fix;
  std::vector<std::uint32_t> block_sizes;
  std::uint32_t t_tries_used = 0;
  bool k_exhaustive = false;  // in_K ran over all b rather than by sampling
  KRefutation k_refutation;
};

/// T-candidate first, then K-membership evidence: exhaustive when the
/// degree allows, sampled refutation otherwise. Throws when no T-candidate
/// appears within t_tries.
inline StrangeCandidate build_strange_candidate(std::uint32_t n, const Rat& delta,
                                                std::uint64_t seed, std::uint32_t t_tries,
                                                long long k_trials,
                                                std::uint64_t budget = kDefaultWordBallBudget) {
  Rng root(seed);
  TCandidate tc = build_T_candidate(n, delta, root.substream(1).next(), t_tries, budget);
  if (!tc.found) throw std::runtime_error("build_strange_candidate: no T-candidate found");
  StrangeCandidate out;
  out.p = tc.p;
  out.delta = delta;
  out.coxeter_len = tc.coxeter_len;
  out.worst = tc.worst;
  out.worst_fix = tc.worst_fix;
  out.block_sizes = tc.block_sizes;
  out.t_tries_used = tc.tries_used;
  if (n <= kDoubleLoopLimit) {
    out.k_exhaustive = true;
    MembershipResult m = in_K(out.p, delta);
    out.k_refutation.trials = 0;
    out.k_refutation.strategy = "exhaustive";
    out.k_refutation.refuted = !m.member;
    out.k_refutation.witness = m.witness;
  } else {
    out.k_refutation = sample_k_refutation(out.p, delta, k_trials,
                                           root.substream(2).next(), out.block_sizes);
  }
  return out;
}

}  // namespace sofic
