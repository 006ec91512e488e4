#pragma once

#include <algorithm>
#include <memory>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sofic/rational.hpp"

namespace sofic {

/// Degrees above this are rejected by tensor_id; keeps index arithmetic
/// comfortably inside uint32 and memory inside a few hundred MB.
inline constexpr std::uint64_t kMaxDegree = 1u << 25;

// ---------------------------------------------------------------------------
// Perm
// ---------------------------------------------------------------------------

/// A permutation of {0..n-1}, stored as its image array.
///
/// Composition convention everywhere in this library:
///   compose(p, q)(i) = p(q(i)),
/// i.e. q acts first, matching the matrix product of the associated
/// permutation matrices acting on column vectors.
class Perm {
public:
  Perm() = default;

  explicit Perm(std::vector<std::uint32_t> images) : img_(std::move(images)) {
    validate();
  }

  static Perm identity(std::uint32_t n) {
    std::vector<std::uint32_t> v(n);
    for (std::uint32_t i = 0; i < n; ++i) v[i] = i;
    Perm p;
    p.img_ = std::move(v);
    return p;
  }

  std::uint32_t degree() const { return static_cast<std::uint32_t>(img_.size()); }
  std::uint32_t at(std::uint32_t i) const { return img_[i]; }
  std::uint32_t operator()(std::uint32_t i) const { return img_[i]; }
  const std::vector<std::uint32_t>& images() const { return img_; }

  Perm inverse() const {
    Perm r;
    r.img_.resize(img_.size());
    for (std::uint32_t i = 0; i < img_.size(); ++i) r.img_[img_[i]] = i;
    return r;
  }

  bool is_identity() const {
    for (std::uint32_t i = 0; i < img_.size(); ++i)
      if (img_[i] != i) return false;
    return true;
  }

  friend bool operator==(const Perm& a, const Perm& b) { return a.img_ == b.img_; }
  friend bool operator!=(const Perm& a, const Perm& b) { return !(a == b); }
  friend bool operator<(const Perm& a, const Perm& b) { return a.img_ < b.img_; }

private:
  void validate() const {
    std::vector<bool> seen(img_.size(), false);
    for (std::uint32_t v : img_) {
      if (v >= img_.size() || seen[v])
        throw std::invalid_argument("Perm: images are not a bijection of {0..n-1}");
      seen[v] = true;
    }
  }

  std::vector<std::uint32_t> img_;
};

inline Perm compose(const Perm& p, const Perm& q) {
  if (p.degree() != q.degree())
    throw std::invalid_argument("compose: degree mismatch");
  std::vector<std::uint32_t> v(p.degree());
  for (std::uint32_t i = 0; i < p.degree(); ++i) v[i] = p.at(q.at(i));
  return Perm(std::move(v));
}

/// The cycle i -> i+1 (mod n).
inline Perm cycle(std::uint32_t n) {
  if (n == 0) throw std::invalid_argument("cycle: degree must be positive");
  std::vector<std::uint32_t> v(n);
  for (std::uint32_t i = 0; i < n; ++i) v[i] = (i + 1) % n;
  return Perm(std::move(v));
}

/// The order-reversing permutation i -> n-1-i.
inline Perm reversal(std::uint32_t n) {
  std::vector<std::uint32_t> v(n);
  for (std::uint32_t i = 0; i < n; ++i) v[i] = n - 1 - i;
  return Perm(std::move(v));
}

/// Amplification p (x) 1_r on degree n*r. Index convention: position
/// (block b, inner t) is encoded as b*n + t, and the amplification acts
/// inside each block: b*n + t  ->  b*n + p(t). With this layout the (i,j)
/// block of any u in P_{nr} is a contiguous-stride slice.
inline Perm tensor_id(const Perm& p, std::uint32_t r) {
  if (r == 0) throw std::invalid_argument("tensor_id: r must be positive");
  std::uint64_t n = p.degree();
  if (n * r > kMaxDegree) throw std::overflow_error("tensor_id: degree n*r too large");
  std::vector<std::uint32_t> v(static_cast<std::size_t>(n * r));
  for (std::uint32_t b = 0; b < r; ++b)
    for (std::uint32_t t = 0; t < n; ++t)
      v[b * n + t] = static_cast<std::uint32_t>(b * n) + p.at(t);
  return Perm(std::move(v));
}

/// p on the first block, q shifted onto the second.
inline Perm direct_sum(const Perm& p, const Perm& q) {
  std::uint32_t n1 = p.degree(), n2 = q.degree();
  std::vector<std::uint32_t> v(n1 + n2);
  for (std::uint32_t i = 0; i < n1; ++i) v[i] = p.at(i);
  for (std::uint32_t i = 0; i < n2; ++i) v[n1 + i] = n1 + q.at(i);
  return Perm(std::move(v));
}

/// p y p^{-1}.
inline Perm conjugate(const Perm& p, const Perm& y) {
  if (p.degree() != y.degree())
    throw std::invalid_argument("conjugate: degree mismatch");
  std::vector<std::uint32_t> v(p.degree());
  for (std::uint32_t i = 0; i < p.degree(); ++i) v[p.at(i)] = p.at(y.at(i));
  return Perm(std::move(v));
}

// --- Hamming distance and trace (exact counts, Rat wrappers) ---------------

inline std::uint32_t hamming_count(const Perm& p, const Perm& q) {
  if (p.degree() != q.degree())
    throw std::invalid_argument("hamming: degree mismatch");
  std::uint32_t c = 0;
  for (std::uint32_t i = 0; i < p.degree(); ++i) c += p.at(i) != q.at(i);
  return c;
}

/// Normalised Hamming distance |{i : p(i) != q(i)}| / n.
inline Rat hamming(const Perm& p, const Perm& q) {
  return Rat(hamming_count(p, q), p.degree());
}

inline std::uint32_t fix_count(const Perm& p) {
  std::uint32_t c = 0;
  for (std::uint32_t i = 0; i < p.degree(); ++i) c += p.at(i) == i;
  return c;
}

/// Tr(p) = |Fix(p)| / n = 1 - d_H(p, id).
inline Rat fix_trace(const Perm& p) { return Rat(fix_count(p), p.degree()); }

// --- Coxeter length ---------------------------------------------------------

namespace detail {

// Merge-count with two shortcuts that keep the count exact: skip the merge
// when the halves are already in order, and when every left element exceeds
// every right element count the full cross product and rotate.
inline std::uint64_t merge_count(std::uint32_t* a, std::uint32_t* buf,
                                 std::uint32_t len) {
  if (len < 2) return 0;
  std::uint32_t mid = len / 2;
  std::uint64_t inv = merge_count(a, buf, mid) + merge_count(a + mid, buf, len - mid);
  if (a[mid - 1] <= a[mid]) return inv;
  if (a[0] > a[len - 1]) {
    inv += static_cast<std::uint64_t>(mid) * (len - mid);
    std::copy(a, a + mid, buf);
    std::copy(a + mid, a + len, a);
    std::copy(buf, buf + mid, a + (len - mid));
    return inv;
  }
  std::uint32_t i = 0, j = mid, k = 0;
  while (i < mid && j < len) {
    if (a[i] <= a[j]) {
      buf[k++] = a[i++];
    } else {
      buf[k++] = a[j++];
      inv += mid - i;
    }
  }
  while (i < mid) buf[k++] = a[i++];
  while (j < len) buf[k++] = a[j++];
  std::copy(buf, buf + len, a);
  return inv;
}

}  // namespace detail

inline std::uint64_t inversion_count(const Perm& p) {
  const auto& v = p.images();
  std::uint64_t n = v.size();
  if (n < 2) return 0;
  bool ascending = true, descending = true;
  for (std::size_t i = 0; i + 1 < v.size() && (ascending || descending); ++i) {
    if (v[i] > v[i + 1]) ascending = false;
    if (v[i] < v[i + 1]) descending = false;
  }
  if (ascending) return 0;
  if (descending) return n * (n - 1) / 2;  // every pair is inverted
  std::vector<std::uint32_t> work(v);
  std::unique_ptr<std::uint32_t[]> buf(new std::uint32_t[v.size()]);
  return detail::merge_count(work.data(), buf.get(), static_cast<std::uint32_t>(work.size()));
}

/// Coxeter length: inversion count normalised by n(n-1)/2, in [0,1].
/// Degree 1 has no pairs; its length is 0.
inline Rat coxeter(const Perm& p) {
  std::uint64_t n = p.degree();
  if (n < 2) return Rat(0);
  std::uint64_t pairs = n * (n - 1) / 2;
  std::uint64_t inv = inversion_count(p);
  std::uint64_t g = std::gcd(inv, pairs);
  return Rat(static_cast<long long>(inv / g), static_cast<long long>(pairs / g));
}

// ---------------------------------------------------------------------------
// PartialPerm: a piece of permutation (injective partial map)
// ---------------------------------------------------------------------------

class PartialPerm {
public:
  static constexpr std::uint32_t kUndefined = 0xFFFFFFFFu;

  PartialPerm() = default;

  /// images[i] == kUndefined marks an undefined row.
  explicit PartialPerm(std::vector<std::uint32_t> images) : img_(std::move(images)) {
    validate();
  }

  static PartialPerm empty(std::uint32_t n) {
    PartialPerm q;
    q.img_.assign(n, kUndefined);
    return q;
  }

  explicit PartialPerm(const Perm& p) : img_(p.images()) {}

  std::uint32_t degree() const { return static_cast<std::uint32_t>(img_.size()); }
  bool defined(std::uint32_t i) const { return img_[i] != kUndefined; }
  std::uint32_t at(std::uint32_t i) const { return img_[i]; }
  const std::vector<std::uint32_t>& images() const { return img_; }

  std::uint32_t defined_count() const {
    std::uint32_t c = 0;
    for (std::uint32_t v : img_) c += v != kUndefined;
    return c;
  }

  bool is_total() const { return defined_count() == degree(); }

  /// Total maps convert back to Perm.
  Perm to_perm() const {
    if (!is_total()) throw std::domain_error("PartialPerm: not total");
    return Perm(img_);
  }

  friend bool operator==(const PartialPerm& a, const PartialPerm& b) {
    return a.img_ == b.img_;
  }
  friend bool operator!=(const PartialPerm& a, const PartialPerm& b) { return !(a == b); }

private:
  void validate() const {
    std::vector<bool> seen(img_.size(), false);
    for (std::uint32_t v : img_) {
      if (v == kUndefined) continue;
      if (v >= img_.size() || seen[v])
        throw std::invalid_argument("PartialPerm: defined images not injective");
      seen[v] = true;
    }
  }

  std::vector<std::uint32_t> img_;
};

/// (p . q)(i) = p(q(i)), defined where the chain is.
inline PartialPerm compose(const PartialPerm& p, const PartialPerm& q) {
  if (p.degree() != q.degree())
    throw std::invalid_argument("compose: degree mismatch");
  std::vector<std::uint32_t> v(p.degree(), PartialPerm::kUndefined);
  for (std::uint32_t i = 0; i < q.degree(); ++i) {
    std::uint32_t m = q.at(i);
    if (m != PartialPerm::kUndefined) v[i] = p.at(m);
  }
  return PartialPerm(std::move(v));
}

inline PartialPerm compose(const PartialPerm& p, const Perm& q) {
  return compose(p, PartialPerm(q));
}
inline PartialPerm compose(const Perm& p, const PartialPerm& q) {
  return compose(PartialPerm(p), q);
}

/// Relational inverse: swaps every defined pair. This is the (j,i) block
/// of u* when the argument is the (i,j) block of u.
inline PartialPerm adjoint(const PartialPerm& q) {
  std::vector<std::uint32_t> v(q.degree(), PartialPerm::kUndefined);
  for (std::uint32_t i = 0; i < q.degree(); ++i)
    if (q.defined(i)) v[q.at(i)] = i;
  return PartialPerm(std::move(v));
}

inline std::uint32_t hamming_rows_count(const PartialPerm& x, const PartialPerm& y) {
  if (x.degree() != y.degree())
    throw std::invalid_argument("hamming_rows: degree mismatch");
  std::uint32_t c = 0;
  for (std::uint32_t i = 0; i < x.degree(); ++i) c += x.at(i) != y.at(i);
  return c;
}

/// Row-wise Hamming distance on pieces of permutation: row i differs iff
/// defined-status or image differs. Coincides with hamming() on total maps.
inline Rat hamming_rows(const PartialPerm& x, const PartialPerm& y) {
  return Rat(hamming_rows_count(x, y), x.degree());
}

/// Completes q to a permutation: defined rows are kept, undefined rows are
/// matched to the unused values in ascending order. Deterministic; the
/// completion of the empty map is the identity.
inline Perm complete(const PartialPerm& q) {
  std::uint32_t n = q.degree();
  std::vector<bool> used(n, false);
  for (std::uint32_t i = 0; i < n; ++i)
    if (q.defined(i)) used[q.at(i)] = true;
  std::vector<std::uint32_t> v(n);
  std::uint32_t next_free = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (q.defined(i)) {
      v[i] = q.at(i);
    } else {
      while (used[next_free]) ++next_free;
      v[i] = next_free;
      used[next_free] = true;
    }
  }
  return Perm(std::move(v));
}

// ---------------------------------------------------------------------------
// Subset: a diagonal projection e in D_n
// ---------------------------------------------------------------------------

class Subset {
public:
  Subset() : n_(0) {}
  explicit Subset(std::uint32_t n) : n_(n), bits_((n + 63) / 64, 0) {}

  static Subset full(std::uint32_t n) {
    Subset s(n);
    for (std::uint32_t i = 0; i < n; ++i) s.insert(i);
    return s;
  }

  static Subset of(std::uint32_t n, const std::vector<std::uint32_t>& members) {
    Subset s(n);
    for (std::uint32_t m : members) s.insert(m);
    return s;
  }

  std::uint32_t degree() const { return n_; }

  bool contains(std::uint32_t i) const {
    return (bits_[i >> 6] >> (i & 63)) & 1u;
  }

  void insert(std::uint32_t i) {
    if (i >= n_) throw std::out_of_range("Subset: index out of range");
    bits_[i >> 6] |= std::uint64_t(1) << (i & 63);
  }

  void erase(std::uint32_t i) {
    if (i >= n_) throw std::out_of_range("Subset: index out of range");
    bits_[i >> 6] &= ~(std::uint64_t(1) << (i & 63));
  }

  std::uint32_t count() const {
    std::uint32_t c = 0;
    for (std::uint64_t w : bits_) c += static_cast<std::uint32_t>(__builtin_popcountll(w));
    return c;
  }

  Rat trace() const { return Rat(count(), n_); }

  bool empty() const {
    for (std::uint64_t w : bits_)
      if (w) return false;
    return true;
  }

  std::vector<std::uint32_t> members() const {
    std::vector<std::uint32_t> v;
    v.reserve(count());
    for (std::uint32_t i = 0; i < n_; ++i)
      if (contains(i)) v.push_back(i);
    return v;
  }

  Subset complement() const {
    Subset s(n_);
    for (std::size_t w = 0; w < bits_.size(); ++w) s.bits_[w] = ~bits_[w];
    s.mask_tail();
    return s;
  }

  /// Pointwise image p(S).
  Subset image_under(const Perm& p) const {
    if (p.degree() != n_) throw std::invalid_argument("Subset: degree mismatch");
    Subset s(n_);
    for (std::uint32_t i = 0; i < n_; ++i)
      if (contains(i)) s.insert(p.at(i));
    return s;
  }

  std::uint32_t sym_diff_count(const Subset& other) const {
    if (other.n_ != n_) throw std::invalid_argument("Subset: degree mismatch");
    std::uint32_t c = 0;
    for (std::size_t w = 0; w < bits_.size(); ++w)
      c += static_cast<std::uint32_t>(__builtin_popcountll(bits_[w] ^ other.bits_[w]));
    return c;
  }

  friend bool operator==(const Subset& a, const Subset& b) {
    return a.n_ == b.n_ && a.bits_ == b.bits_;
  }
  friend bool operator!=(const Subset& a, const Subset& b) { return !(a == b); }

private:
  void mask_tail() {
    if (n_ % 64) bits_.back() &= (std::uint64_t(1) << (n_ % 64)) - 1;
  }

  std::uint32_t n_;
  std::vector<std::uint64_t> bits_;
};

/// Targets attained by q; its trace is (defined entries)/n. This is the
/// projection q q* when q is viewed as a 0/1 matrix.
inline Subset range_projection(const PartialPerm& q) {
  Subset s(q.degree());
  for (std::uint32_t i = 0; i < q.degree(); ++i)
    if (q.defined(i)) s.insert(q.at(i));
  return s;
}

// ---------------------------------------------------------------------------
// Blocks of an amplified-level permutation
// ---------------------------------------------------------------------------

/// The (i,j) piece of u in P_{nr} under M_{nr} ~ M_r (x) M_n: the partial
/// map t -> t' with u(j*n + t) = i*n + t'. Columns live in block j,
/// targets in block i.
inline PartialPerm block(const Perm& u, std::uint32_t i, std::uint32_t j,
                         std::uint32_t n, std::uint32_t r) {
  if (static_cast<std::uint64_t>(n) * r != u.degree())
    throw std::invalid_argument("block: degree is not n*r");
  if (i >= r || j >= r) throw std::out_of_range("block: block index out of range");
  std::vector<std::uint32_t> v(n, PartialPerm::kUndefined);
  std::uint64_t lo = static_cast<std::uint64_t>(i) * n, hi = lo + n;
  for (std::uint32_t t = 0; t < n; ++t) {
    std::uint32_t target = u.at(j * n + t);
    if (target >= lo && target < hi) v[t] = static_cast<std::uint32_t>(target - lo);
  }
  return PartialPerm(std::move(v));
}

// ---------------------------------------------------------------------------
// GenTuple: a finite-level representation of F_k
// ---------------------------------------------------------------------------

class GenTuple {
public:
  GenTuple() = default;

  explicit GenTuple(std::vector<Perm> perms) : perms_(std::move(perms)) {
    if (perms_.empty()) throw std::invalid_argument("GenTuple: needs k >= 1 generators");
    if (perms_[0].degree() == 0)
      throw std::invalid_argument("GenTuple: degree must be positive");
    for (const Perm& p : perms_)
      if (p.degree() != perms_[0].degree())
        throw std::invalid_argument("GenTuple: generators must share one degree");
  }

  std::uint32_t degree() const { return perms_[0].degree(); }
  std::uint32_t arity() const { return static_cast<std::uint32_t>(perms_.size()); }
  const Perm& gen(std::uint32_t i) const { return perms_.at(i); }
  const std::vector<Perm>& gens() const { return perms_; }

  friend bool operator==(const GenTuple& a, const GenTuple& b) {
    return a.perms_ == b.perms_;
  }
  friend bool operator!=(const GenTuple& a, const GenTuple& b) { return !(a == b); }

private:
  std::vector<Perm> perms_;
};

/// Conjugates every generator: (p x_1 p*, ..., p x_k p*).
inline GenTuple conjugate(const Perm& p, const GenTuple& t) {
  std::vector<Perm> v;
  v.reserve(t.arity());
  for (const Perm& g : t.gens()) v.push_back(conjugate(p, g));
  return GenTuple(std::move(v));
}

// ---------------------------------------------------------------------------
// Word: a reduced word in the free group F_k
// ---------------------------------------------------------------------------

/// Letters are nonzero signed codes: +g means generator g-1, -g its inverse
/// (so [1, -2] reads x1 x2^{-1}). Construction rejects unreduced words.
class Word {
public:
  Word() = default;

  explicit Word(std::vector<int> letters) : letters_(std::move(letters)) {
    for (std::size_t i = 0; i < letters_.size(); ++i) {
      if (letters_[i] == 0) throw std::invalid_argument("Word: zero letter");
      if (i > 0 && letters_[i] == -letters_[i - 1])
        throw std::invalid_argument("Word: not reduced");
    }
  }

  std::size_t length() const { return letters_.size(); }
  bool is_empty() const { return letters_.empty(); }
  const std::vector<int>& letters() const { return letters_; }

  std::string str() const {
    std::string s;
    for (int l : letters_) {
      if (!s.empty()) s += ' ';
      s += 'x';
      s += std::to_string(l > 0 ? l : -l);
      if (l < 0) s += "^-1";
    }
    return s.empty() ? "1" : s;
  }

  friend bool operator==(const Word& a, const Word& b) { return a.letters_ == b.letters_; }
  friend bool operator!=(const Word& a, const Word& b) { return !(a == b); }

private:
  std::vector<int> letters_;
};

/// Evaluates w on the tuple's generators. The empty word is the identity,
/// and eval(w1 w2) = compose(eval(w1), eval(w2)) whenever the concatenation
/// is reduced.
inline Perm eval_word(const GenTuple& t, const Word& w) {
  std::vector<Perm> inv(t.arity());
  Perm acc = Perm::identity(t.degree());
  for (int l : w.letters()) {
    std::uint32_t g = static_cast<std::uint32_t>((l > 0 ? l : -l) - 1);
    if (g >= t.arity()) throw std::out_of_range("eval_word: generator index out of range");
    if (l > 0) {
      acc = compose(acc, t.gen(g));
    } else {
      if (inv[g].degree() == 0) inv[g] = t.gen(g).inverse();
      acc = compose(acc, inv[g]);
    }
  }
  return acc;
}

namespace detail {

/// Number of nontrivial reduced words of length <= radius over F_k.
inline std::uint64_t ball_size(std::uint32_t k, std::uint32_t radius) {
  std::uint64_t total = 0, layer = 2ull * k;
  for (std::uint32_t m = 1; m <= radius; ++m) {
    total += layer;
    if (total > (1ull << 62)) return total;
    layer *= 2ull * k - 1;
  }
  return total;
}

}  // namespace detail

inline constexpr std::uint64_t kDefaultWordBallBudget = 4'000'000;

/// Visits every nontrivial reduced word of length <= radius, passing the
/// letter codes and the evaluated permutation (products maintained
/// incrementally along the DFS). Throws if the ball exceeds the budget.
template <class Fn>
void for_each_ball_word(const GenTuple& t, std::uint32_t radius, Fn&& fn,
                        std::uint64_t budget = kDefaultWordBallBudget) {
  if (radius == 0) throw std::invalid_argument("word ball: radius must be >= 1");
  if (detail::ball_size(t.arity(), radius) > budget)
    throw std::length_error("word ball: size exceeds budget");
  std::uint32_t k = t.arity();
  std::vector<Perm> step(2 * k);  // step[2g] = gen g, step[2g+1] = its inverse
  for (std::uint32_t g = 0; g < k; ++g) {
    step[2 * g] = t.gen(g);
    step[2 * g + 1] = t.gen(g).inverse();
  }
  std::vector<int> letters;
  std::vector<Perm> prods;
  prods.push_back(Perm::identity(t.degree()));
  // Iterative DFS: state is the letter stack; children extend on the right.
  struct Frame { std::uint32_t next_dir; };
  std::vector<Frame> stack{{0}};
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next_dir == 2 * k || letters.size() == radius) {
      stack.pop_back();
      if (!letters.empty()) {
        letters.pop_back();
        prods.pop_back();
      }
      continue;
    }
    std::uint32_t dir = f.next_dir++;
    int code = (dir % 2 == 0) ? static_cast<int>(dir / 2 + 1)
                              : -static_cast<int>(dir / 2 + 1);
    if (!letters.empty() && code == -letters.back()) continue;
    letters.push_back(code);
    prods.push_back(compose(prods.back(), step[dir]));
    fn(static_cast<const std::vector<int>&>(letters),
       static_cast<const Perm&>(prods.back()));
    stack.push_back({0});
  }
}

/// The word in the ball with the largest fixed-point trace, with that trace.
/// This is the quantity that must stay below delta for T_n^delta membership.
inline std::pair<Word, Rat> worst_word(const GenTuple& t, std::uint32_t radius,
                                       std::uint64_t budget = kDefaultWordBallBudget) {
  std::uint32_t best_fix = 0;
  bool found = false;
  std::vector<int> best_letters;
  for_each_ball_word(
      t, radius,
      [&](const std::vector<int>& letters, const Perm& value) {
        std::uint32_t f = fix_count(value);
        if (!found || f > best_fix) {
          found = true;
          best_fix = f;
          best_letters = letters;
        }
      },
      budget);
  return {Word(std::move(best_letters)), Rat(best_fix, t.degree())};
}

/// max over nontrivial reduced words w with |w| <= radius of Tr(w(t)).
/// Zero means the ball acts with no fixed points anywhere; 1/k-style
/// thresholds come from the freeness conditions.
inline Rat freeness_defect(const GenTuple& t, std::uint32_t radius,
                           std::uint64_t budget = kDefaultWordBallBudget) {
  return worst_word(t, radius, budget).second;
}

}  // namespace sofic
