#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sofic/conjugacy.hpp"
#include "sofic/perm.hpp"
#include "sofic/rational.hpp"

namespace sofic {

// Exhaustive enumeration ceilings (minutes-scale on one core).
inline constexpr std::uint32_t kSingleLoopLimit = 9;  // one pass over P_n
inline constexpr std::uint32_t kDoubleLoopLimit = 7;  // pass over P_n per c
inline constexpr std::uint32_t kSBallLimit = 5;       // (n!)^2 conjugator work per c

enum class Verdict { STRICT, EQUAL, VIOLATED, ASYMPTOTIC_REGIME_ONLY };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::STRICT: return "STRICT";
    case Verdict::EQUAL: return "EQUAL";
    case Verdict::VIOLATED: return "VIOLATED";
    default: return "ASYMPTOTIC_REGIME_ONLY";
  }
}

/// A counting bound, exact when the exponents land on integers and the
/// value fits, otherwise an 80-bit approximation with both sides recorded.
struct BoundValue {
  bool exact = false;
  Rat value;
  long double approx = 0.0L;
  std::string expr;
};

/// One verified counting statement. `direction` says which way the claimed
/// inequality points ("<": count below bound, ">": count above bound).
struct CountReport {
  std::string prop;
  std::uint32_t n = 0;
  Rat parameter;
  long long count = 0;
  BoundValue bound;
  char direction = '<';
  Verdict satisfied = Verdict::STRICT;
  bool asymptotic_claim = false;  // the claim holds only for large enough n
  bool hypothesis_ok = true;
  double seconds = 0.0;
  std::string enumeration_order = "lex";
  std::vector<Perm> witnesses;
  std::vector<Perm> witness_conjugators;  // parallel to witnesses where relevant
  bool witnesses_complete = true;
};

inline constexpr std::size_t kWitnessCap = 1000;

namespace detail {

inline std::uint64_t factorial(std::uint32_t n) {
  std::uint64_t f = 1;
  for (std::uint32_t i = 2; i <= n; ++i) f *= i;
  return f;
}

inline Rat rat_pow(const Rat& base, std::uint32_t e) {
  Rat r(1);
  for (std::uint32_t i = 0; i < e; ++i) r *= base;
  return r;
}

/// floor(n * q) for a nonnegative rational q.
inline long long floor_scale(std::uint32_t n, const Rat& q) {
  if (q.num() < 0) throw std::invalid_argument("parameter must be nonnegative");
  return static_cast<long long>((static_cast<__int128>(n) * q.num()) / q.den());
}

template <class Fn>
void for_each_perm(std::uint32_t n, Fn&& fn) {
  std::vector<std::uint32_t> p(n);
  for (std::uint32_t i = 0; i < n; ++i) p[i] = i;
  do {
    fn(static_cast<const std::vector<std::uint32_t>&>(p));
  } while (std::next_permutation(p.begin(), p.end()));
}

inline Verdict classify(long long count, const BoundValue& bound, char direction,
                        bool asymptotic, bool hypothesis_ok) {
  if (!hypothesis_ok) return Verdict::ASYMPTOTIC_REGIME_ONLY;
  int cmp;
  if (bound.exact) {
    Rat c(count);
    cmp = c < bound.value ? -1 : (c == bound.value ? 0 : 1);
  } else {
    long double c = static_cast<long double>(count);
    cmp = c < bound.approx ? -1 : (c == bound.approx ? 0 : 1);
  }
  if (direction == '>') cmp = -cmp;
  if (cmp < 0) return Verdict::STRICT;
  if (cmp == 0) return Verdict::EQUAL;
  return asymptotic ? Verdict::ASYMPTOTIC_REGIME_ONLY : Verdict::VIOLATED;
}

class Stopwatch {
public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Hamming balls and near-commutants
// ---------------------------------------------------------------------------

/// |{y : d_H(x,y) < eps}| against n^floor(n*eps). Holds for every n; the
/// count does not depend on x (translate by x^{-1}).
inline CountReport count_hamming_ball(const Perm& x, const Rat& eps,
                                      std::uint32_t limit = kSingleLoopLimit) {
  std::uint32_t n = x.degree();
  if (n > limit) throw std::domain_error("count_hamming_ball: degree over limit");
  detail::Stopwatch sw;
  CountReport rep;
  rep.prop = "hamming-ball";
  rep.n = n;
  rep.parameter = eps;
  const std::uint64_t u = static_cast<std::uint64_t>(eps.num() < 0 ? 0 : eps.num());
  const std::uint64_t v = static_cast<std::uint64_t>(eps.den());
  const auto& xi = x.images();
  detail::for_each_perm(n, [&](const std::vector<std::uint32_t>& y) {
    std::uint64_t c = 0;
    for (std::uint32_t i = 0; i < n; ++i) c += xi[i] != y[i];
    if (c * v < u * n) {
      ++rep.count;
      if (rep.witnesses.size() < kWitnessCap)
        rep.witnesses.push_back(Perm(y));
      else
        rep.witnesses_complete = false;
    }
  });
  long long e = detail::floor_scale(n, eps);
  rep.bound.exact = true;
  rep.bound.value = detail::rat_pow(Rat(n), static_cast<std::uint32_t>(e));
  rep.bound.approx = rep.bound.value.to_long_double();
  rep.bound.expr = "n^floor(n*eps)";
  rep.satisfied = detail::classify(rep.count, rep.bound, '<', false, true);
  rep.seconds = sw.seconds();
  return rep;
}

/// |{y : d_H(a y, y a) < eps}| against n^(floor(n*eps)+1), a the n-cycle.
inline CountReport count_cycle_commuting(std::uint32_t n, const Rat& eps,
                                         std::uint32_t limit = kSingleLoopLimit) {
  if (n > limit) throw std::domain_error("count_cycle_commuting: degree over limit");
  if (n < 1) throw std::invalid_argument("count_cycle_commuting: n must be positive");
  detail::Stopwatch sw;
  CountReport rep;
  rep.prop = "cycle-commutant";
  rep.n = n;
  rep.parameter = eps;
  const std::uint64_t u = static_cast<std::uint64_t>(eps.num() < 0 ? 0 : eps.num());
  const std::uint64_t v = static_cast<std::uint64_t>(eps.den());
  detail::for_each_perm(n, [&](const std::vector<std::uint32_t>& y) {
    std::uint64_t c = 0;
    for (std::uint32_t i = 0; i < n; ++i) c += (y[i] + 1) % n != y[(i + 1) % n];
    if (c * v < u * n) {
      ++rep.count;
      if (rep.witnesses.size() < kWitnessCap)
        rep.witnesses.push_back(Perm(y));
      else
        rep.witnesses_complete = false;
    }
  });
  long long e = detail::floor_scale(n, eps) + 1;
  rep.bound.exact = true;
  rep.bound.value = detail::rat_pow(Rat(n), static_cast<std::uint32_t>(e));
  rep.bound.approx = rep.bound.value.to_long_double();
  rep.bound.expr = "n^(floor(n*eps)+1)";
  rep.satisfied = detail::classify(rep.count, rep.bound, '<', false, true);
  rep.seconds = sw.seconds();
  return rep;
}

/// |{c : d_H(bc,cb) < delta}| against n!/n^(4n*delta), claimed for large n
/// under the hypothesis d_H(b,1) > 11*delta. The hypothesis is checked and
/// reported; a failing hypothesis or an out-of-regime count is flagged
/// ASYMPTOTIC_REGIME_ONLY, never silently passed.
inline CountReport count_near_commuting(const Perm& b, const Rat& delta,
                                        std::uint32_t limit = kSingleLoopLimit) {
  std::uint32_t n = b.degree();
  if (n > limit) throw std::domain_error("count_near_commuting: degree over limit");
  detail::Stopwatch sw;
  CountReport rep;
  rep.prop = "near-commutant";
  rep.n = n;
  rep.parameter = delta;
  rep.asymptotic_claim = true;
  const std::uint64_t u = static_cast<std::uint64_t>(delta.num() < 0 ? 0 : delta.num());
  const std::uint64_t v = static_cast<std::uint64_t>(delta.den());
  rep.hypothesis_ok =
      static_cast<std::uint64_t>(hamming_count(b, Perm::identity(n))) * v > 11 * u * n;
  const auto& bi = b.images();
  detail::for_each_perm(n, [&](const std::vector<std::uint32_t>& c) {
    std::uint64_t cnt = 0;
    for (std::uint32_t i = 0; i < n; ++i) cnt += bi[c[i]] != c[bi[i]];
    if (cnt * v < u * n) {
      ++rep.count;
      if (rep.witnesses.size() < kWitnessCap)
        rep.witnesses.push_back(Perm(c));
      else
        rep.witnesses_complete = false;
    }
  });
  Rat exponent = Rat(4) * Rat(n) * delta;  // n! / n^(4 n delta)
  std::uint64_t nf = detail::factorial(n);
  rep.bound.expr = "n!/n^(4*n*delta)";
  if (exponent.is_integer() && exponent.num() >= 0 && exponent.num() <= 40) {
    try {
      rep.bound.value = Rat(static_cast<long long>(nf)) /
                        detail::rat_pow(Rat(n), static_cast<std::uint32_t>(exponent.num()));
      rep.bound.exact = true;
      rep.bound.approx = rep.bound.value.to_long_double();
    } catch (const std::overflow_error&) {
      rep.bound.exact = false;
    }
  }
  if (!rep.bound.exact)
    rep.bound.approx = static_cast<long double>(nf) *
                       std::pow(static_cast<long double>(n), -exponent.to_long_double());
  rep.satisfied = detail::classify(rep.count, rep.bound, '<', true, rep.hypothesis_ok);
  rep.seconds = sw.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// Conjugacy distance d_S and its balls
// ---------------------------------------------------------------------------

enum class SDistanceMode { EXACT, HEURISTIC };

/// d_S(x, y) = min_p sum_i d_H(x_i, p y_i p*). EXACT enumerates all n!
/// conjugators; HEURISTIC anneals and returns an upper bound. Either way
/// the witness re-evaluates to the returned value.
inline ConjugacyResult s_distance(const GenTuple& x, const GenTuple& y, SDistanceMode mode,
                                  std::uint64_t budget = 200000, std::uint64_t seed = 0) {
  if (mode == SDistanceMode::EXACT) return exact_conjugacy_min(x, y);
  return anneal_conjugacy(x, y, budget, seed);
}

/// |{c : d_S((a,b),(a,c)) < lambda}| against n^(2*floor(n*lambda)+1), by
/// full double enumeration. Witness conjugators are stored per member.
inline CountReport count_s_ball(const Perm& b, const Rat& lambda,
                                std::uint32_t limit = kSBallLimit) {
  std::uint32_t n = b.degree();
  if (n > limit) throw std::domain_error("count_s_ball: degree over limit");
  detail::Stopwatch sw;
  CountReport rep;
  rep.prop = "s-ball";
  rep.n = n;
  rep.parameter = lambda;
  const std::uint64_t u = static_cast<std::uint64_t>(lambda.num() < 0 ? 0 : lambda.num());
  const std::uint64_t v = static_cast<std::uint64_t>(lambda.den());
  const auto& bi = b.images();
  const Perm a = cycle(n);
  const auto& ai = a.images();
  // threshold: total differing rows * v < u * n
  detail::for_each_perm(n, [&](const std::vector<std::uint32_t>& c) {
    bool member = false;
    std::vector<std::uint32_t> found_p;
    std::vector<std::uint32_t> pinv(n);
    detail::for_each_perm(n, [&](const std::vector<std::uint32_t>& p) {
      if (member) return;
      for (std::uint32_t i = 0; i < n; ++i) pinv[p[i]] = i;
      std::uint64_t cnt = 0;
      for (std::uint32_t m = 0; m < n; ++m) cnt += ai[m] != p[ai[pinv[m]]];
      for (std::uint32_t m = 0; m < n; ++m) cnt += bi[m] != p[c[pinv[m]]];
      if (cnt * v < u * n) {
        member = true;
        found_p.assign(p.begin(), p.end());
      }
    });
    if (member) {
      ++rep.count;
      if (rep.witnesses.size() < kWitnessCap) {
        rep.witnesses.push_back(Perm(c));
        rep.witness_conjugators.push_back(Perm(found_p));
      } else {
        rep.witnesses_complete = false;
      }
    }
  });
  long long e = 2 * detail::floor_scale(n, lambda) + 1;
  rep.bound.exact = true;
  rep.bound.value = detail::rat_pow(Rat(n), static_cast<std::uint32_t>(e));
  rep.bound.approx = rep.bound.value.to_long_double();
  rep.bound.expr = "n^(2*floor(n*lambda)+1)";
  rep.satisfied = detail::classify(rep.count, rep.bound, '<', false, true);
  rep.seconds = sw.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// The sets L_n^delta, K_n^delta, T_n^delta
// ---------------------------------------------------------------------------

struct MembershipResult {
  bool member = true;
  std::optional<Perm> witness;  // violating b when member is false
};

/// c is in L_n^delta iff no b has d_H(b,1) > 11*delta, d_H(ab,ba) < delta
/// and d_H(cb,bc) < delta. Exhaustive over b; monotone in delta.
inline MembershipResult in_L(const Perm& c, const Rat& delta,
                             std::uint32_t limit = kDoubleLoopLimit) {
  std::uint32_t n = c.degree();
  if (n > limit) throw std::domain_error("in_L: degree over limit");
  const std::uint64_t u = static_cast<std::uint64_t>(delta.num() < 0 ? 0 : delta.num());
  const std::uint64_t v = static_cast<std::uint64_t>(delta.den());
  const auto& ci = c.images();
  MembershipResult out;
  detail::for_each_perm(n, [&](const std::vector<std::uint32_t>& b) {
    if (!out.member) return;
    std::uint64_t moved = 0, cab = 0, cbc = 0;
    for (std::uint32_t i = 0; i < n; ++i) {
      moved += b[i] != i;
      cab += (b[i] + 1) % n != b[(i + 1) % n];
      cbc += ci[b[i]] != b[ci[i]];
    }
    if (moved * v > 11 * u * n && cab * v < u * n && cbc * v < u * n) {
      out.member = false;
      out.witness = Perm(b);
    }
  });
  return out;
}

/// c is in K_n^delta iff every b satisfies
///   d_H(b,1) <= 22 * max{d_H(ab,ba), d_H(bc,cb), delta}.
/// Definition-direct exhaustive loop over b.
inline MembershipResult in_K(const Perm& c, const Rat& delta,
                             std::uint32_t limit = kDoubleLoopLimit) {
  std::uint32_t n = c.degree();
  if (n > limit) throw std::domain_error("in_K: degree over limit");
  const std::uint64_t u = static_cast<std::uint64_t>(delta.num() < 0 ? 0 : delta.num());
  const std::uint64_t v = static_cast<std::uint64_t>(delta.den());
  const auto& ci = c.images();
  MembershipResult out;
  detail::for_each_perm(n, [&](const std::vector<std::uint32_t>& b) {
    if (!out.member) return;
    std::uint64_t moved = 0, cab = 0, cbc = 0;
    for (std::uint32_t i = 0; i < n; ++i) {
      moved += b[i] != i;
      cab += (b[i] + 1) % n != b[(i + 1) % n];
      cbc += ci[b[i]] != b[ci[i]];
    }
    std::uint64_t lhs = moved * v;
    std::uint64_t rhs = 22 * std::max({cab * v, cbc * v, u * n});
    if (lhs > rhs) {
      out.member = false;
      out.witness = Perm(b);
    }
  });
  return out;
}

/// Per-degree tables shared by the set censuses: every b in lex order with
/// its moved-point count and its near-commutation count against the cycle.
class PermStats {
public:
  explicit PermStats(std::uint32_t n, std::uint32_t limit = kDoubleLoopLimit) : n_(n) {
    if (n > limit) throw std::domain_error("PermStats: degree over limit");
    detail::for_each_perm(n, [&](const std::vector<std::uint32_t>& b) {
      std::uint32_t moved = 0, cab = 0;
      for (std::uint32_t i = 0; i < n; ++i) {
        moved += b[i] != i;
        cab += (b[i] + 1) % n != b[(i + 1) % n];
      }
      perms_.push_back(b);
      moved_.push_back(moved);
      cab_.push_back(cab);
    });
  }

  std::uint32_t degree() const { return n_; }
  std::size_t size() const { return perms_.size(); }
  const std::vector<std::uint32_t>& images(std::size_t i) const { return perms_[i]; }
  std::uint32_t moved(std::size_t i) const { return moved_[i]; }
  std::uint32_t cycle_defect(std::size_t i) const { return cab_[i]; }

  /// Indices of b that can witness an L-violation at delta, i.e.
  /// d_H(b,1) > 11*delta and d_H(ab,ba) < delta. Small for small delta.
  std::vector<std::size_t> l_candidates(const Rat& delta) const {
    const std::uint64_t u = static_cast<std::uint64_t>(delta.num() < 0 ? 0 : delta.num());
    const std::uint64_t v = static_cast<std::uint64_t>(delta.den());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < perms_.size(); ++i)
      if (std::uint64_t(moved_[i]) * v > 11 * u * n_ && std::uint64_t(cab_[i]) * v < u * n_)
        out.push_back(i);
    return out;
  }

  /// Indices of b that can witness a K-violation at delta for some c:
  /// d_H(b,1) > 22*d_H(ab,ba) and d_H(b,1) > 22*delta.
  std::vector<std::size_t> k_candidates(const Rat& delta) const {
    const std::uint64_t u = static_cast<std::uint64_t>(delta.num() < 0 ? 0 : delta.num());
    const std::uint64_t v = static_cast<std::uint64_t>(delta.den());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < perms_.size(); ++i)
      if (std::uint64_t(moved_[i]) > 22 * std::uint64_t(cab_[i]) &&
          std::uint64_t(moved_[i]) * v > 22 * u * n_)
        out.push_back(i);
    return out;
  }

private:
  std::uint32_t n_;
  std::vector<std::vector<std::uint32_t>> perms_;
  std::vector<std::uint32_t> moved_;
  std::vector<std::uint32_t> cab_;
};

namespace detail {

inline std::uint64_t cnt_bc_cb(const std::vector<std::uint32_t>& b,
                               const std::vector<std::uint32_t>& c) {
  std::uint64_t cnt = 0;
  for (std::size_t i = 0; i < b.size(); ++i) cnt += c[b[i]] != b[c[i]];
  return cnt;
}

}  // namespace detail

/// Membership bitmaps over P_n in lex order, computed with the candidate
/// pre-filter. Agreement with the definition-direct loops is itself a
/// tested property.
inline std::vector<bool> l_set_bitmap(const PermStats& stats, const Rat& delta) {
  const std::uint64_t u = static_cast<std::uint64_t>(delta.num() < 0 ? 0 : delta.num());
  const std::uint64_t v = static_cast<std::uint64_t>(delta.den());
  std::uint32_t n = stats.degree();
  auto cands = stats.l_candidates(delta);
  std::vector<bool> out(stats.size(), true);
  for (std::size_t ci = 0; ci < stats.size(); ++ci) {
    const auto& c = stats.images(ci);
    for (std::size_t bi : cands) {
      if (detail::cnt_bc_cb(stats.images(bi), c) * v < u * n) {
        out[ci] = false;
        break;
      }
    }
  }
  return out;
}

inline std::vector<bool> k_set_bitmap(const PermStats& stats, const Rat& delta) {
  auto cands = stats.k_candidates(delta);
  std::vector<bool> out(stats.size(), true);
  for (std::size_t ci = 0; ci < stats.size(); ++ci) {
    const auto& c = stats.images(ci);
    for (std::size_t bi : cands) {
      // b violates for this c iff moved(b) > 22*cnt(bc,cb) as well
      if (std::uint64_t(stats.moved(bi)) > 22 * detail::cnt_bc_cb(stats.images(bi), c)) {
        out[ci] = false;
        break;
      }
    }
  }
  return out;
}

/// Card L_n^delta against the lower bound (1 - n^(-2*delta*n)) * n!.
inline CountReport count_L_set(std::uint32_t n, const Rat& delta,
                               std::uint32_t limit = kDoubleLoopLimit) {
  detail::Stopwatch sw;
  PermStats stats(n, limit);
  auto bits = l_set_bitmap(stats, delta);
  CountReport rep;
  rep.prop = "L-card";
  rep.n = n;
  rep.parameter = delta;
  rep.direction = '>';
  rep.asymptotic_claim = true;
  for (bool b : bits) rep.count += b;
  std::uint64_t nf = detail::factorial(n);
  Rat e = Rat(2) * delta * Rat(n);
  rep.bound.expr = "(1-n^(-2*delta*n))*n!";
  if (e.is_integer() && e.num() >= 0 && e.num() <= 40) {
    try {
      Rat p = detail::rat_pow(Rat(n), static_cast<std::uint32_t>(e.num()));
      rep.bound.value = (Rat(1) - Rat(1) / p) * Rat(static_cast<long long>(nf));
      rep.bound.exact = true;
      rep.bound.approx = rep.bound.value.to_long_double();
    } catch (const std::overflow_error&) {
      rep.bound.exact = false;
    }
  }
  if (!rep.bound.exact)
    rep.bound.approx = (1.0L - std::pow(static_cast<long double>(n), -e.to_long_double())) *
                       static_cast<long double>(nf);
  rep.satisfied = detail::classify(rep.count, rep.bound, '>', true, true);
  rep.seconds = sw.seconds();
  return rep;
}

/// Card K_n^delta against the lower bound (1 - n^(-delta*n)) * n!.
inline CountReport count_K_set(std::uint32_t n, const Rat& delta,
                               std::uint32_t limit = kDoubleLoopLimit) {
  detail::Stopwatch sw;
  PermStats stats(n, limit);
  auto bits = k_set_bitmap(stats, delta);
  CountReport rep;
  rep.prop = "K-card";
  rep.n = n;
  rep.parameter = delta;
  rep.direction = '>';
  rep.asymptotic_claim = true;
  for (bool b : bits) rep.count += b;
  std::uint64_t nf = detail::factorial(n);
  Rat e = delta * Rat(n);
  rep.bound.expr = "(1-n^(-delta*n))*n!";
  if (e.is_integer() && e.num() >= 0 && e.num() <= 40) {
    try {
      Rat p = detail::rat_pow(Rat(n), static_cast<std::uint32_t>(e.num()));
      rep.bound.value = (Rat(1) - Rat(1) / p) * Rat(static_cast<long long>(nf));
      rep.bound.exact = true;
      rep.bound.approx = rep.bound.value.to_long_double();
    } catch (const std::overflow_error&) {
      rep.bound.exact = false;
    }
  }
  if (!rep.bound.exact)
    rep.bound.approx = (1.0L - std::pow(static_cast<long double>(n), -e.to_long_double())) *
                       static_cast<long double>(nf);
  rep.satisfied = detail::classify(rep.count, rep.bound, '>', true, true);
  rep.seconds = sw.seconds();
  return rep;
}

/// Result of checking K_n^delta >= L_n^delta cap L_n^{2 delta} cap ... cap
/// L_n^{2^k delta}, k minimal with 2^(k+2)*delta > 1.
struct KLInclusionReport {
  std::uint32_t n = 0;
  Rat delta;
  std::uint32_t levels = 0;  // k+1 intersected L sets
  long long card_K = 0;
  long long card_L_intersection = 0;
  long long violations = 0;  // c in every L level but outside K
  bool inclusion_holds = false;
  double seconds = 0.0;
};

inline std::uint32_t kl_levels(const Rat& delta) {
  // smallest k >= 0 with 2^(k+2) * delta > 1
  std::uint32_t k = 0;
  Rat scale = Rat(4) * delta;
  while (!(scale > Rat(1)) && k < 62) {
    scale *= Rat(2);
    ++k;
  }
  return k + 1;
}

inline KLInclusionReport kl_inclusion_check(std::uint32_t n, const Rat& delta,
                                            std::uint32_t limit = kDoubleLoopLimit) {
  detail::Stopwatch sw;
  PermStats stats(n, limit);
  KLInclusionReport rep;
  rep.n = n;
  rep.delta = delta;
  rep.levels = kl_levels(delta);
  std::vector<bool> inter(stats.size(), true);
  Rat level = delta;
  for (std::uint32_t j = 0; j < rep.levels; ++j) {
    auto bits = l_set_bitmap(stats, level);
    for (std::size_t i = 0; i < inter.size(); ++i) inter[i] = inter[i] && bits[i];
    level *= Rat(2);
  }
  auto kbits = k_set_bitmap(stats, delta);
  for (std::size_t i = 0; i < inter.size(); ++i) {
    rep.card_K += kbits[i];
    rep.card_L_intersection += inter[i];
    rep.violations += inter[i] && !kbits[i];
  }
  rep.inclusion_holds = rep.violations == 0;
  rep.seconds = sw.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// T_n^delta: small Coxeter length with approximate freeness
// ---------------------------------------------------------------------------

struct TMembership {
  bool member = false;
  Rat coxeter_len;
  Word worst;  // word in the ball with the largest fixed-point trace
  Rat worst_fix;
};

/// p is in T_n^delta iff l_C(p) < 2*delta and every nontrivial word w of
/// length <= 1/delta has d_H(w(a,p), id) > 1 - delta, i.e. Tr(w(a,p)) < delta.
inline TMembership in_T(const Perm& p, const Rat& delta,
                        std::uint64_t budget = kDefaultWordBallBudget) {
  if (!(delta > Rat(0))) throw std::invalid_argument("in_T: delta must be positive");
  std::uint32_t radius = static_cast<std::uint32_t>(delta.den() / delta.num());
  TMembership out;
  out.coxeter_len = coxeter(p);
  if (radius == 0) {  // delta >= 1: the word condition quantifies over nothing
    out.member = out.coxeter_len < Rat(2) * delta;
    return out;
  }
  GenTuple t({cycle(p.degree()), p});
  auto [word, fix] = worst_word(t, radius, budget);
  out.worst = word;
  out.worst_fix = fix;
  out.member = out.coxeter_len < Rat(2) * delta && fix < delta;
  return out;
}

/// Card T_n^delta against the lower bound delta^n * n!.
inline CountReport count_T_set(std::uint32_t n, const Rat& delta,
                               std::uint32_t limit = kDoubleLoopLimit,
                               std::uint64_t budget = kDefaultWordBallBudget) {
  if (n > limit) throw std::domain_error("count_T_set: degree over limit");
  detail::Stopwatch sw;
  CountReport rep;
  rep.prop = "T-card";
  rep.n = n;
  rep.parameter = delta;
  rep.direction = '>';
  rep.asymptotic_claim = true;
  detail::for_each_perm(n, [&](const std::vector<std::uint32_t>& p) {
    if (in_T(Perm(p), delta, budget).member) ++rep.count;
  });
  std::uint64_t nf = detail::factorial(n);
  rep.bound.expr = "delta^n*n!";
  try {
    rep.bound.value = detail::rat_pow(delta, n) * Rat(static_cast<long long>(nf));
    rep.bound.exact = true;
    rep.bound.approx = rep.bound.value.to_long_double();
  } catch (const std::overflow_error&) {
    rep.bound.exact = false;
    rep.bound.approx = std::pow(delta.to_long_double(), static_cast<long double>(n)) *
                       static_cast<long double>(nf);
  }
  rep.satisfied = detail::classify(rep.count, rep.bound, '>', true, true);
  rep.seconds = sw.seconds();
  return rep;
}

}  // namespace sofic
