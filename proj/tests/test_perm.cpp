#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "sofic/perm.hpp"
#include "sofic/rng.hpp"

using namespace sofic;

namespace {

Perm random_perm(std::uint32_t n, Rng& rng) { return Perm(rng.random_images(n)); }

// O(n^2) oracle for the inversion count, independent of the merge path.
std::uint64_t inversions_brute(const Perm& p) {
  std::uint64_t c = 0;
  for (std::uint32_t i = 0; i < p.degree(); ++i)
    for (std::uint32_t j = i + 1; j < p.degree(); ++j) c += p.at(i) > p.at(j);
  return c;
}

std::vector<Perm> all_perms(std::uint32_t n) {
  std::vector<std::uint32_t> v(n);
  for (std::uint32_t i = 0; i < n; ++i) v[i] = i;
  std::vector<Perm> out;
  do {
    out.push_back(Perm(v));
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

}  // namespace

TEST_CASE("compose basics") {
  Perm id4 = Perm::identity(4);
  CHECK(compose(id4, id4) == id4);
  Perm a4 = cycle(4);
  CHECK(compose(a4, a4.inverse()) == id4);
  // a_3 composed with itself shifts by two
  Perm a3 = cycle(3);
  Perm sq = compose(a3, a3);
  for (std::uint32_t i = 0; i < 3; ++i) CHECK(sq.at(i) == (i + 2) % 3);
  CHECK(sq == Perm({2, 0, 1}));
  CHECK_THROWS_AS(compose(a3, a4), std::invalid_argument);
}

TEST_CASE("cycle") {
  CHECK(cycle(1) == Perm::identity(1));
  CHECK(cycle(4) == Perm({1, 2, 3, 0}));
  CHECK(fix_trace(cycle(5)) == Rat(0));
  CHECK_THROWS_AS(cycle(0), std::invalid_argument);
}

TEST_CASE("perm validation") {
  CHECK_THROWS_AS(Perm({0, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Perm({0, 3}), std::invalid_argument);
}

TEST_CASE("tensor_id") {
  Rng rng(11);
  Perm p = random_perm(6, rng);
  CHECK(tensor_id(p, 1) == p);
  CHECK(tensor_id(cycle(2), 2) == Perm({1, 0, 3, 2}));
  // amplification preserves the Hamming distance exactly
  for (int trial = 0; trial < 20; ++trial) {
    Perm x = random_perm(9, rng), y = random_perm(9, rng);
    for (std::uint32_t r : {2u, 3u, 5u})
      CHECK(hamming(tensor_id(x, r), tensor_id(y, r)) == hamming(x, y));
  }
}

TEST_CASE("direct_sum") {
  CHECK(direct_sum(Perm::identity(2), Perm::identity(3)) == Perm::identity(5));
  CHECK(fix_trace(direct_sum(cycle(3), Perm::identity(3))) == Rat(1, 2));
  // distances mix with weights n1/(n1+n2), n2/(n1+n2); disjoint supports
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    Perm x = random_perm(5, rng), y = random_perm(7, rng), y2 = random_perm(7, rng);
    CHECK(hamming(direct_sum(x, y), direct_sum(x, y2)) == Rat(7, 12) * hamming(y, y2));
    Perm x2 = random_perm(5, rng);
    CHECK(hamming(direct_sum(x, y), direct_sum(x2, y2)) ==
          Rat(5, 12) * hamming(x, x2) + Rat(7, 12) * hamming(y, y2));
  }
}

TEST_CASE("hamming distance") {
  Perm a4 = cycle(4);
  CHECK(hamming(a4, a4) == Rat(0));
  CHECK(hamming(a4, Perm::identity(4)) == Rat(1));
  CHECK(hamming(a4, compose(a4, a4)) == Rat(1));
}

TEST_CASE("hamming metric axioms, exhaustive at n=5") {
  auto perms = all_perms(5);
  bool symmetry = true, identity = true, triangle = true;
  for (const Perm& x : perms)
    for (const Perm& y : perms) {
      std::uint32_t dxy = hamming_count(x, y);
      symmetry = symmetry && dxy == hamming_count(y, x);
      identity = identity && ((dxy == 0) == (x == y));
    }
  REQUIRE(symmetry);
  REQUIRE(identity);
  for (const Perm& x : perms)
    for (const Perm& y : perms) {
      std::uint32_t dxy = hamming_count(x, y);
      for (const Perm& z : perms)
        triangle = triangle && dxy <= hamming_count(x, z) + hamming_count(z, y);
      if (!triangle) break;
    }
  REQUIRE(triangle);
}

TEST_CASE("distinct permutations differ in at least two rows") {
  auto perms = all_perms(4);
  bool ok = true;
  for (const Perm& x : perms)
    for (const Perm& y : perms)
      if (x != y) ok = ok && hamming(x, y) >= Rat(2, 4);
  REQUIRE(ok);
}

TEST_CASE("bi-invariance of hamming") {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    Perm x = random_perm(8, rng), y = random_perm(8, rng), r = random_perm(8, rng);
    CHECK(hamming(compose(r, x), compose(r, y)) == hamming(x, y));
    CHECK(hamming(compose(x, r), compose(y, r)) == hamming(x, y));
  }
}

TEST_CASE("fix_trace equals one minus distance to identity") {
  Rng rng(14);
  CHECK(fix_trace(Perm::identity(7)) == Rat(1));
  CHECK(fix_trace(cycle(7)) == Rat(0));
  CHECK(fix_trace(direct_sum(Perm::identity(1), cycle(3))) == Rat(1, 4));
  for (int trial = 0; trial < 50; ++trial) {
    Perm p = random_perm(11, rng);
    CHECK(fix_trace(p) == Rat(1) - hamming(p, Perm::identity(11)));
  }
}

TEST_CASE("coxeter length") {
  CHECK(coxeter(Perm::identity(9)) == Rat(0));
  for (std::uint32_t n : {2u, 3u, 5u, 17u, 100u}) {
    CHECK(coxeter(reversal(n)) == Rat(1));
    CHECK(coxeter(cycle(n)) == Rat(2, n));
  }
  CHECK(coxeter(Perm::identity(1)) == Rat(0));
  // merge-count against the quadratic oracle
  Rng rng(15);
  for (int trial = 0; trial < 40; ++trial) {
    std::uint32_t n = 1 + static_cast<std::uint32_t>(rng.below(64));
    Perm p = random_perm(n, rng);
    CHECK(inversion_count(p) == inversions_brute(p));
  }
  bool bounds = true;
  for (int trial = 0; trial < 40; ++trial) {
    Perm p = random_perm(9, rng);
    Rat l = coxeter(p);
    bounds = bounds && Rat(0) <= l && l <= Rat(1);
  }
  REQUIRE(bounds);
}

TEST_CASE("partial permutations") {
  PartialPerm empty4 = PartialPerm::empty(4);
  PartialPerm idp(Perm::identity(4));
  CHECK(hamming_rows(empty4, empty4) == Rat(0));
  CHECK(hamming_rows(empty4, idp) == Rat(1));
  CHECK_THROWS_AS(PartialPerm({0, 0, PartialPerm::kUndefined}), std::invalid_argument);

  Rng rng(16);
  for (int trial = 0; trial < 30; ++trial) {
    Perm p = random_perm(7, rng), q = random_perm(7, rng);
    CHECK(hamming_rows(PartialPerm(p), PartialPerm(q)) == hamming(p, q));
  }
}

TEST_CASE("contraction by pieces of permutation") {
  Rng rng(17);
  auto random_partial = [&](std::uint32_t n) {
    Perm p = random_perm(n, rng);
    std::vector<std::uint32_t> img = p.images();
    std::uint32_t drop = static_cast<std::uint32_t>(rng.below(n));
    for (std::uint32_t d = 0; d < drop; ++d)
      img[rng.below(n)] = PartialPerm::kUndefined;
    return PartialPerm(img);
  };
  bool left = true, right = true;
  for (int trial = 0; trial < 60; ++trial) {
    PartialPerm x = random_partial(8), y = random_partial(8), q = random_partial(8);
    std::uint32_t base = hamming_rows_count(x, y);
    left = left && hamming_rows_count(compose(q, x), compose(q, y)) <= base;
    right = right && hamming_rows_count(compose(x, q), compose(y, q)) <= base;
  }
  REQUIRE(left);
  REQUIRE(right);
}

TEST_CASE("complete") {
  Rng rng(18);
  Perm p = random_perm(9, rng);
  CHECK(complete(PartialPerm(p)) == p);
  CHECK(complete(PartialPerm::empty(6)) == Perm::identity(6));
  // one undefined row has a unique completion
  std::vector<std::uint32_t> img = p.images();
  std::uint32_t freed = img[3];
  img[3] = PartialPerm::kUndefined;
  PartialPerm q(img);
  Perm c = complete(q);
  CHECK(c.at(3) == freed);
  CHECK(c == p);
  // completion touches exactly the undefined rows
  for (int trial = 0; trial < 20; ++trial) {
    Perm u = random_perm(10, rng);
    std::vector<std::uint32_t> v = u.images();
    std::uint32_t holes = 1 + static_cast<std::uint32_t>(rng.below(5));
    for (std::uint32_t h = 0; h < holes; ++h) v[rng.below(10)] = PartialPerm::kUndefined;
    PartialPerm partial(v);
    Perm done = complete(partial);
    CHECK(hamming_rows_count(PartialPerm(done), partial) == 10 - partial.defined_count());
  }
}

TEST_CASE("blocks of amplified permutations") {
  Rng rng(19);
  std::uint32_t n = 5, r = 3;
  Perm p = random_perm(n, rng);
  Perm amp = tensor_id(p, r);
  for (std::uint32_t i = 0; i < r; ++i)
    for (std::uint32_t j = 0; j < r; ++j) {
      PartialPerm b = block(amp, i, j, n, r);
      if (i == j) {
        CHECK(b.is_total());
        CHECK(b.to_perm() == p);
      } else {
        CHECK(b.defined_count() == 0);
      }
    }
  // defined entries over all blocks add up to n*r for any u
  Perm u = random_perm(n * r, rng);
  std::uint32_t total = 0;
  for (std::uint32_t i = 0; i < r; ++i)
    for (std::uint32_t j = 0; j < r; ++j) total += block(u, i, j, n, r).defined_count();
  CHECK(total == n * r);
  CHECK_THROWS_AS(block(u, 0, 0, n + 1, r), std::invalid_argument);
}

TEST_CASE("adjoint matches the block of the inverse") {
  // u*(j,i) = adjoint(u(i,j)): the (j,i) block of u^{-1} is the relational
  // inverse of the (i,j) block of u.
  Rng rng(20);
  std::uint32_t n = 6, r = 4;
  for (int trial = 0; trial < 10; ++trial) {
    Perm u = random_perm(n * r, rng);
    Perm uinv = u.inverse();
    for (std::uint32_t i = 0; i < r; ++i)
      for (std::uint32_t j = 0; j < r; ++j)
        CHECK(block(uinv, j, i, n, r) == adjoint(block(u, i, j, n, r)));
  }
}

TEST_CASE("range projections partition the target block") {
  Rng rng(21);
  std::uint32_t n = 7, r = 3;
  Perm u = random_perm(n * r, rng);
  CHECK(range_projection(PartialPerm(u)).count() == u.degree());
  CHECK(range_projection(PartialPerm::empty(5)).empty());
  for (std::uint32_t i = 0; i < r; ++i) {
    std::uint32_t covered = 0;
    Subset seen(n);
    for (std::uint32_t j = 0; j < r; ++j) {
      Subset rp = range_projection(block(u, i, j, n, r));
      CHECK(rp.sym_diff_count(seen) == rp.count() + seen.count());  // disjoint
      for (std::uint32_t m : rp.members()) seen.insert(m);
      covered += rp.count();
    }
    CHECK(covered == n);
  }
}

TEST_CASE("words") {
  CHECK_THROWS_AS(Word({1, -1}), std::invalid_argument);
  CHECK_THROWS_AS(Word({-2, 2}), std::invalid_argument);
  CHECK_THROWS_AS(Word({0}), std::invalid_argument);
  Word w({1, -2, 1});
  CHECK(w.length() == 3);
  CHECK(w.str() == "x1 x2^-1 x1");

  GenTuple t({cycle(4), reversal(4)});
  CHECK(eval_word(t, Word{}) == Perm::identity(4));
  CHECK(eval_word(t, Word({1})) == cycle(4));
  CHECK(eval_word(t, Word({-1})) == cycle(4).inverse());
  CHECK_THROWS_AS(eval_word(t, Word({3})), std::out_of_range);
}

TEST_CASE("eval_word is a homomorphism on reduced concatenation") {
  Rng rng(22);
  GenTuple t({Perm(rng.random_images(8)), Perm(rng.random_images(8))});
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<int> letters;
    std::uint32_t len = 2 + static_cast<std::uint32_t>(rng.below(6));
    while (letters.size() < len) {
      int code = (rng.below(2) ? 1 : -1) * static_cast<int>(1 + rng.below(2));
      if (!letters.empty() && code == -letters.back()) continue;
      letters.push_back(code);
    }
    std::uint32_t split = 1 + static_cast<std::uint32_t>(rng.below(len - 1));
    Word w(letters);
    Word w1(std::vector<int>(letters.begin(), letters.begin() + split));
    Word w2(std::vector<int>(letters.begin() + split, letters.end()));
    CHECK(eval_word(t, w) == compose(eval_word(t, w1), eval_word(t, w2)));
  }
}

TEST_CASE("word ball enumeration") {
  GenTuple t({cycle(5), reversal(5)});
  std::uint64_t seen = 0;
  for_each_ball_word(t, 3, [&](const std::vector<int>&, const Perm&) { ++seen; });
  CHECK(seen == 4 + 12 + 36);  // 2k (2k-1)^{m-1} summed, k = 2
  CHECK_THROWS_AS(freeness_defect(t, 30), std::length_error);
  CHECK_THROWS_AS(freeness_defect(t, 0), std::invalid_argument);
}

TEST_CASE("freeness defect") {
  GenTuple trivial({Perm::identity(6), Perm::identity(6)});
  CHECK(freeness_defect(trivial, 1) == Rat(1));
  // x1 x2^-1 evaluates to the identity when both generators coincide
  GenTuple repeated({cycle(5), cycle(5)});
  CHECK(freeness_defect(repeated, 2) == Rat(1));
  auto [word, fix] = worst_word(repeated, 2);
  CHECK(fix == Rat(1));
  CHECK(eval_word(repeated, word) == Perm::identity(5));
}

TEST_CASE("subsets") {
  Subset s = Subset::of(10, {1, 3, 5});
  CHECK(s.count() == 3);
  CHECK(s.trace() == Rat(3, 10));
  CHECK(s.complement().count() == 7);
  CHECK(s.image_under(cycle(10)) == Subset::of(10, {2, 4, 6}));
  CHECK(s.sym_diff_count(Subset::of(10, {1, 2})) == 3);
  CHECK(Subset::full(10).count() == 10);
  CHECK_THROWS_AS(Subset(4).insert(4), std::out_of_range);
}
