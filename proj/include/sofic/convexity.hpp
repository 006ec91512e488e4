#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "sofic/conjugacy.hpp"
#include "sofic/expansion.hpp"
#include "sofic/perm.hpp"
#include "sofic/rational.hpp"

namespace sofic {

// ---------------------------------------------------------------------------
// Orbits: the exactly-invariant subsets at finite level
// ---------------------------------------------------------------------------

/// Orbit partition of {0..n-1} under the group generated by the tuple,
/// via union-find. Orbits are returned sorted by their least element.
/// A subset has boundary_sum zero iff it is a union of these orbits.
inline std::vector<Subset> orbit_subsets(const GenTuple& t) {
  std::uint32_t n = t.degree();
  std::vector<std::uint32_t> parent(n);
  for (std::uint32_t i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](std::uint32_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (const Perm& p : t.gens()) {
    for (std::uint32_t i = 0; i < n; ++i) {
      std::uint32_t a = find(i), b = find(p.at(i));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<std::vector<std::uint32_t>> groups(n);
  for (std::uint32_t i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::vector<Subset> orbits;
  for (std::uint32_t root = 0; root < n; ++root)
    if (!groups[root].empty()) orbits.push_back(Subset::of(n, groups[root]));
  return orbits;
}

// ---------------------------------------------------------------------------
// Cuts
// ---------------------------------------------------------------------------

/// Restriction of a tuple to a subset. When the subset is exactly invariant
/// (defect 0) the cut is exact; otherwise escaping points were rerouted to
/// unused targets inside S, ascending, and `patched` counts them.
struct CutResult {
  GenTuple restricted;
  Rat defect;
  std::uint64_t patched = 0;
};

/// Relabels S to {0..|S|-1} order-preservingly and restricts each generator.
/// defect = boundary_sum(t, S) before repair.
inline CutResult cut(const GenTuple& t, const Subset& s) {
  if (s.degree() != t.degree()) throw std::invalid_argument("cut: degree mismatch");
  if (s.empty()) throw std::invalid_argument("cut: subset must be nonempty");
  std::uint32_t n = t.degree();
  std::vector<std::uint32_t> pos(n, PartialPerm::kUndefined);
  std::vector<std::uint32_t> members = s.members();
  for (std::uint32_t r = 0; r < members.size(); ++r) pos[members[r]] = r;
  CutResult out;
  out.defect = boundary_sum(t, s);
  std::vector<Perm> gens;
  for (const Perm& p : t.gens()) {
    std::vector<std::uint32_t> img(members.size(), PartialPerm::kUndefined);
    for (std::uint32_t r = 0; r < members.size(); ++r) {
      std::uint32_t target = p.at(members[r]);
      if (s.contains(target)) img[r] = pos[target];
    }
    PartialPerm partial(std::move(img));
    out.patched += members.size() - partial.defined_count();
    gens.push_back(complete(partial));
  }
  out.restricted = GenTuple(std::move(gens));
  return out;
}

// ---------------------------------------------------------------------------
// Convex combinations with exact rational weights
// ---------------------------------------------------------------------------

inline void validate_weights(const std::vector<Rat>& weights) {
  Rat total(0);
  for (const Rat& w : weights) {
    if (!(w > Rat(0))) throw std::invalid_argument("weights must be positive");
    total += w;
  }
  if (total != Rat(1)) throw std::invalid_argument("weights must sum to 1 exactly");
}

/// A combination together with its block projections: block i carries mass
/// exactly weights[i], and cutting by it recovers tuple i up to the
/// canonical relabel.
struct Combination {
  GenTuple tuple;
  std::vector<Subset> blocks;
};

/// Direct sum in which tuple i appears as its amplification by
/// r_i = (w_i * scale) * (lcm(degrees) / n_i) copies, so block masses equal
/// the weight vector exactly. Requires every w_i * scale to be an integer.
inline Combination convex_combine(const std::vector<GenTuple>& ts,
                                  const std::vector<Rat>& weights,
                                  std::uint64_t scale) {
  if (ts.empty() || ts.size() != weights.size())
    throw std::invalid_argument("convex_combine: need matching tuples and weights");
  validate_weights(weights);
  std::uint32_t k = ts[0].arity();
  for (const GenTuple& t : ts)
    if (t.arity() != k) throw std::invalid_argument("convex_combine: tuples differ in length");
  std::uint64_t lcm_deg = 1;
  for (const GenTuple& t : ts) lcm_deg = std::lcm(lcm_deg, static_cast<std::uint64_t>(t.degree()));
  std::vector<std::uint64_t> reps(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    Rat m = weights[i] * Rat(static_cast<long long>(scale));
    if (!m.is_integer() || m.num() <= 0)
      throw std::invalid_argument("convex_combine: weights not exactly representable at scale");
    reps[i] = static_cast<std::uint64_t>(m.num()) * (lcm_deg / ts[i].degree());
  }
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < ts.size(); ++i)
    total += reps[i] * ts[i].degree();
  if (total > kMaxDegree) throw std::overflow_error("convex_combine: combined degree too large");

  std::vector<Perm> gens;
  std::vector<Subset> blocks;
  for (std::uint32_t g = 0; g < k; ++g) {
    Perm acc = tensor_id(ts[0].gen(g), static_cast<std::uint32_t>(reps[0]));
    for (std::size_t i = 1; i < ts.size(); ++i)
      acc = direct_sum(acc, tensor_id(ts[i].gen(g), static_cast<std::uint32_t>(reps[i])));
    gens.push_back(std::move(acc));
  }
  std::uint32_t offset = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    std::uint32_t len = static_cast<std::uint32_t>(reps[i] * ts[i].degree());
    Subset b(static_cast<std::uint32_t>(total));
    for (std::uint32_t j = 0; j < len; ++j) b.insert(offset + j);
    blocks.push_back(std::move(b));
    offset += len;
  }
  return {GenTuple(std::move(gens)), std::move(blocks)};
}

// ---------------------------------------------------------------------------
// Decomposition check
// ---------------------------------------------------------------------------

/// For an exactly invariant S: does cut(t,S) (+) cut(t,S^c) equal t after
/// the canonical relabel? Checked bit-exactly.
inline bool verify_decomposition(const GenTuple& t, const Subset& s) {
  if (!boundary_sum(t, s).is_zero())
    throw std::invalid_argument("verify_decomposition: subset not exactly invariant");
  Subset sc = s.complement();
  if (s.empty() || sc.empty())
    return true;  // trivial split: one side is all of t
  CutResult first = cut(t, s);
  CutResult second = cut(t, sc);
  // relabel sigma: new index -> original index, S ascending then S^c ascending
  std::vector<std::uint32_t> order = s.members();
  for (std::uint32_t v : sc.members()) order.push_back(v);
  Perm sigma((std::vector<std::uint32_t>(order)));
  Perm sigma_inv = sigma.inverse();
  for (std::uint32_t g = 0; g < t.arity(); ++g) {
    Perm ds = direct_sum(first.restricted.gen(g), second.restricted.gen(g));
    if (compose(sigma, compose(ds, sigma_inv)) != t.gen(g)) return false;
  }
  return true;
}

}  // namespace sofic
