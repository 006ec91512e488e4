#include <catch2/catch_amalgamated.hpp>

#include "sofic/convexity.hpp"
#include "sofic/rng.hpp"

using namespace sofic;

namespace {

// A tuple whose orbits are the given blocks: each generator permutes
// within every block.
GenTuple random_block_tuple(const std::vector<std::uint32_t>& sizes, std::uint32_t k,
                            Rng& rng) {
  std::vector<Perm> gens;
  for (std::uint32_t g = 0; g < k; ++g) {
    std::vector<std::uint32_t> img;
    std::uint32_t off = 0;
    for (std::uint32_t s : sizes) {
      // cycle within the block so the block is one orbit
      for (std::uint32_t i = 0; i < s; ++i) img.push_back(off + (i + 1) % s);
      off += s;
    }
    Perm base(img);
    // conjugating by a block-preserving permutation keeps the orbits
    std::vector<std::uint32_t> shuffle;
    off = 0;
    for (std::uint32_t s : sizes) {
      for (std::uint32_t v : rng.random_images(s)) shuffle.push_back(off + v);
      off += s;
    }
    gens.push_back(conjugate(Perm(shuffle), base));
  }
  return GenTuple(std::move(gens));
}

bool is_orbit_union(const Subset& s, const std::vector<Subset>& orbits) {
  for (const Subset& orbit : orbits) {
    bool any = false, all = true;
    for (std::uint32_t m : orbit.members()) {
      if (s.contains(m)) any = true;
      else all = false;
    }
    if (any && !all) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("orbit_subsets") {
  auto single = orbit_subsets(GenTuple({cycle(9)}));
  REQUIRE(single.size() == 1);
  CHECK(single[0].count() == 9);

  auto pair = orbit_subsets(GenTuple({direct_sum(cycle(3), cycle(3))}));
  REQUIRE(pair.size() == 2);
  CHECK(pair[0] == Subset::of(6, {0, 1, 2}));
  CHECK(pair[1] == Subset::of(6, {3, 4, 5}));

  CHECK(orbit_subsets(GenTuple({Perm::identity(7)})).size() == 7);
}

TEST_CASE("orbit/boundary duality, exhaustive at n=10") {
  Rng rng(51);
  GenTuple t = random_block_tuple({3, 4, 3}, 2, rng);
  auto orbits = orbit_subsets(t);
  REQUIRE(orbits.size() == 3);
  std::uint32_t n = t.degree();
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    Subset s(n);
    for (std::uint32_t i = 0; i < n; ++i)
      if (mask & (1u << i)) s.insert(i);
    bool zero = boundary_sum(t, s).is_zero();
    bool unions = is_orbit_union(s, orbits);
    if (zero != unions) {
      CAPTURE(mask);
      REQUIRE(zero == unions);
    }
  }
  SUCCEED();
}

TEST_CASE("cut: exact cases") {
  Rng rng(52);
  GenTuple t({cycle(7), Perm(rng.random_images(7))});
  CutResult full = cut(t, Subset::full(7));
  CHECK(full.restricted == t);
  CHECK(full.defect == Rat(0));
  CHECK(full.patched == 0);

  GenTuple split({direct_sum(cycle(3), Perm::identity(4))});
  CutResult first = cut(split, Subset::of(7, {0, 1, 2}));
  CHECK(first.restricted == GenTuple({cycle(3)}));
  CHECK(first.defect == Rat(0));
  CHECK(first.patched == 0);

  CHECK_THROWS_AS(cut(t, Subset(7)), std::invalid_argument);
}

TEST_CASE("cut: defective subsets are patched and reported") {
  // cutting {0,1} out of the 4-cycle: a(1)=2 escapes, gets rerouted
  GenTuple t({cycle(4)});
  CutResult r = cut(t, Subset::of(4, {0, 1}));
  CHECK(r.defect == Rat(2, 4));
  CHECK(r.patched == 1);
  CHECK(r.restricted == GenTuple({Perm({1, 0})}));
}

TEST_CASE("double cut equals single cut by the pullback") {
  Rng rng(53);
  GenTuple t = random_block_tuple({3, 4, 5}, 2, rng);
  auto orbits = orbit_subsets(t);
  REQUIRE(orbits.size() == 3);
  // S = orbits 0+1, T' = image of orbit 1 inside the cut
  Subset s(12);
  for (std::uint32_t m : orbits[0].members()) s.insert(m);
  for (std::uint32_t m : orbits[1].members()) s.insert(m);
  CutResult outer = cut(t, s);
  REQUIRE(outer.defect == Rat(0));
  Subset inner(7);  // orbit 1 occupies positions 3..6 after relabel
  for (std::uint32_t i = 3; i < 7; ++i) inner.insert(i);
  CutResult nested = cut(outer.restricted, inner);
  CHECK(nested.defect == Rat(0));
  CutResult direct = cut(t, orbits[1]);
  CHECK(nested.restricted == direct.restricted);
}

TEST_CASE("convex_combine") {
  Rng rng(54);
  GenTuple t({cycle(4), Perm(rng.random_images(4))});

  Combination single = convex_combine({t}, {Rat(1)}, 1);
  CHECK(single.tuple == t);
  REQUIRE(single.blocks.size() == 1);
  CHECK(single.blocks[0].trace() == Rat(1));

  Combination halves = convex_combine({t, t}, {Rat(1, 2), Rat(1, 2)}, 2);
  CHECK(halves.tuple.degree() == 8);
  for (std::uint32_t g = 0; g < 2; ++g)
    CHECK(halves.tuple.gen(g) == direct_sum(t.gen(g), t.gen(g)));
  CHECK(cut(halves.tuple, halves.blocks[0]).restricted == t);
  CHECK(cut(halves.tuple, halves.blocks[1]).restricted == t);

  GenTuple t2({Perm(rng.random_images(4)), Perm(rng.random_images(4))});
  Combination thirds = convex_combine({t, t2}, {Rat(1, 3), Rat(2, 3)}, 3);
  CHECK(thirds.tuple.degree() == 12);
  CHECK(thirds.blocks[0].trace() == Rat(1, 3));
  CHECK(thirds.blocks[1].trace() == Rat(2, 3));
  // cutting the first block recovers t bit-exactly
  CutResult back = cut(thirds.tuple, thirds.blocks[0]);
  CHECK(back.defect == Rat(0));
  CHECK(back.restricted == t);
  // the second block is t2 amplified twice; its leading copy is t2
  CutResult second = cut(thirds.tuple, thirds.blocks[1]);
  CHECK(second.defect == Rat(0));
  CutResult leading = cut(second.restricted, Subset::of(8, {0, 1, 2, 3}));
  CHECK(leading.defect == Rat(0));
  CHECK(leading.restricted == t2);

  CHECK_THROWS_AS(convex_combine({t, t2}, {Rat(1, 3), Rat(1, 3)}, 3),
                  std::invalid_argument);  // weights do not sum to 1
  CHECK_THROWS_AS(convex_combine({t, t2}, {Rat(1, 3), Rat(2, 3)}, 2),
                  std::invalid_argument);  // not representable at scale
}

TEST_CASE("convex combination of different degrees") {
  GenTuple t1({cycle(2)});
  GenTuple t2({cycle(3)});
  Combination c = convex_combine({t1, t2}, {Rat(1, 2), Rat(1, 2)}, 2);
  // lcm(2,3) = 6, each block carries mass 6
  CHECK(c.tuple.degree() == 12);
  CHECK(c.blocks[0].trace() == Rat(1, 2));
  CHECK(cut(c.tuple, c.blocks[0]).restricted == GenTuple({tensor_id(cycle(2), 3)}));
  CHECK(cut(c.tuple, c.blocks[1]).restricted == GenTuple({tensor_id(cycle(3), 2)}));
}

TEST_CASE("verify_decomposition") {
  Rng rng(55);
  GenTuple t = random_block_tuple({4, 3, 5}, 2, rng);
  auto orbits = orbit_subsets(t);
  CHECK(verify_decomposition(t, Subset::full(12)));
  // every union of orbits decomposes
  for (std::uint32_t mask = 1; mask < 8; ++mask) {
    Subset s(12);
    for (std::uint32_t o = 0; o < 3; ++o)
      if (mask & (1u << o))
        for (std::uint32_t m : orbits[o].members()) s.insert(m);
    CHECK(verify_decomposition(t, s));
  }
  CHECK_THROWS_AS(verify_decomposition(t, Subset::of(12, {0})), std::invalid_argument);

  GenTuple ds({direct_sum(cycle(3), cycle(4)), direct_sum(reversal(3), reversal(4))});
  CHECK(verify_decomposition(ds, Subset::of(7, {0, 1, 2})));
}

TEST_CASE("exact cuts commute with word evaluation") {
  Rng rng(56);
  GenTuple t = random_block_tuple({4, 5}, 2, rng);
  Subset s = orbit_subsets(t)[0];
  CutResult r = cut(t, s);
  REQUIRE(r.defect == Rat(0));
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<int> letters;
    while (letters.size() < 4) {
      int code = (rng.below(2) ? 1 : -1) * static_cast<int>(1 + rng.below(2));
      if (!letters.empty() && code == -letters.back()) continue;
      letters.push_back(code);
    }
    Word w(letters);
    // evaluate then cut == cut then evaluate
    GenTuple evald({eval_word(t, w)});
    CutResult cut_after = cut(evald, s);
    CHECK(cut_after.restricted.gen(0) == eval_word(r.restricted, w));
  }
}

TEST_CASE("conjugacy_search") {
  Rng rng(57);
  GenTuple x({cycle(6), Perm(rng.random_images(6))});
  ConjugacyResult self = conjugacy_search(x, x, 1000, 1);
  CHECK(self.value == Rat(0));
  CHECK(self.exact);

  // annealing reaches zero on a conjugate pair at n beyond the exact limit
  GenTuple big({cycle(10), Perm(rng.random_images(10))});
  Perm q(rng.random_images(10));
  ConjugacyResult found = conjugacy_search(big, conjugate(q, big), 60000, 99);
  CHECK_FALSE(found.exact);
  Rat check(0);
  for (std::uint32_t g = 0; g < 2; ++g)
    check += hamming(big.gen(g), conjugate(found.witness, conjugate(q, big).gen(g)));
  CHECK(check == found.value);

  // the annealed value never undercuts the exact minimum
  for (int trial = 0; trial < 5; ++trial) {
    GenTuple u({cycle(7), Perm(rng.random_images(7))});
    GenTuple v({cycle(7), Perm(rng.random_images(7))});
    ConjugacyResult exact = exact_conjugacy_min(u, v);
    ConjugacyResult rough = anneal_conjugacy(u, v, 3000, rng.next());
    CHECK(exact.value <= rough.value);
  }
}
