#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sofic/perm.hpp"
#include "sofic/rational.hpp"
#include "sofic/rng.hpp"

namespace sofic {

/// Exhaustive conjugacy minimisation is feasible up to this degree
/// (8! = 40320 conjugators).
inline constexpr std::uint32_t kExactConjugacyLimit = 8;

struct ConjugacyResult {
  Rat value;    // sum_i d_H(x_i, p y_i p*) at the witness
  Perm witness; // the conjugator p attaining it
  bool exact = false;
};

namespace detail {

/// sum_i |{m : x_i(m) != p(y_i(p^{-1}(m)))}|, the unnormalised conjugacy cost.
inline std::uint64_t conjugacy_cost(const GenTuple& x, const GenTuple& y,
                                    const std::vector<std::uint32_t>& p,
                                    const std::vector<std::uint32_t>& pinv) {
  std::uint64_t total = 0;
  std::uint32_t n = x.degree();
  for (std::uint32_t i = 0; i < x.arity(); ++i) {
    const auto& xi = x.gen(i).images();
    const auto& yi = y.gen(i).images();
    for (std::uint32_t m = 0; m < n; ++m) total += xi[m] != p[yi[pinv[m]]];
  }
  return total;
}

inline void check_same_shape(const GenTuple& x, const GenTuple& y) {
  if (x.degree() != y.degree() || x.arity() != y.arity())
    throw std::invalid_argument("conjugacy: tuples differ in degree or length");
}

}  // namespace detail

/// True minimum of sum_i d_H(x_i, p y_i p*) over all p, by enumeration in
/// lexicographic order (ties resolved to the first conjugator).
inline ConjugacyResult exact_conjugacy_min(const GenTuple& x, const GenTuple& y) {
  detail::check_same_shape(x, y);
  std::uint32_t n = x.degree();
  if (n > kExactConjugacyLimit)
    throw std::domain_error("exact_conjugacy_min: degree over exact limit");
  std::vector<std::uint32_t> p(n), pinv(n);
  for (std::uint32_t i = 0; i < n; ++i) p[i] = i;
  std::uint64_t best = UINT64_MAX;
  std::vector<std::uint32_t> best_p;
  do {
    for (std::uint32_t i = 0; i < n; ++i) pinv[p[i]] = i;
    std::uint64_t cost = detail::conjugacy_cost(x, y, p, pinv);
    if (cost < best) {
      best = cost;
      best_p = p;
      if (best == 0) break;
    }
  } while (std::next_permutation(p.begin(), p.end()));
  return {Rat(static_cast<long long>(best), n), Perm(best_p), true};
}

/// Simulated annealing over conjugators: transposition moves, geometric
/// cooling, seeded and deterministic. Returns an upper bound on the
/// conjugacy distance together with the conjugator attaining it.
inline ConjugacyResult anneal_conjugacy(const GenTuple& x, const GenTuple& y,
                                        std::uint64_t steps, std::uint64_t seed) {
  detail::check_same_shape(x, y);
  std::uint32_t n = x.degree();
  Rng rng(seed);
  std::vector<std::uint32_t> p = rng.random_images(n), pinv(n);
  auto recompute_inv = [&] {
    for (std::uint32_t i = 0; i < n; ++i) pinv[p[i]] = i;
  };
  recompute_inv();
  std::uint64_t cost = detail::conjugacy_cost(x, y, p, pinv);
  std::vector<std::uint32_t> best_p = p;
  std::uint64_t best = cost;
  double t0 = std::max(1.0, 0.25 * n * x.arity()), t1 = 0.02;
  double decay = steps > 1 ? std::pow(t1 / t0, 1.0 / static_cast<double>(steps - 1)) : 1.0;
  double temp = t0;
  for (std::uint64_t s = 0; s < steps && best > 0; ++s, temp *= decay) {
    std::uint32_t i = static_cast<std::uint32_t>(rng.below(n));
    std::uint32_t j = static_cast<std::uint32_t>(rng.below(n));
    if (i == j) continue;
    std::swap(p[i], p[j]);
    pinv[p[i]] = i;
    pinv[p[j]] = j;
    std::uint64_t next = detail::conjugacy_cost(x, y, p, pinv);
    double delta = static_cast<double>(next) - static_cast<double>(cost);
    if (next <= cost || rng.uniform01() < std::exp(-delta / temp)) {
      cost = next;
      if (cost < best) {
        best = cost;
        best_p = p;
      }
    } else {
      std::swap(p[i], p[j]);  // reject
      pinv[p[i]] = i;
      pinv[p[j]] = j;
    }
  }
  return {Rat(static_cast<long long>(best), n), Perm(best_p), false};
}

/// Exact minimum when the degree allows it, annealed upper bound otherwise.
inline ConjugacyResult conjugacy_search(const GenTuple& x, const GenTuple& y,
                                        std::uint64_t budget, std::uint64_t seed,
                                        std::uint32_t exact_limit = kExactConjugacyLimit) {
  if (x.degree() <= exact_limit) return exact_conjugacy_min(x, y);
  return anneal_conjugacy(x, y, budget, seed);
}

}  // namespace sofic
