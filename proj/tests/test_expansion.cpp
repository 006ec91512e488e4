#include <catch2/catch_amalgamated.hpp>

#include "sofic/expansion.hpp"
#include "sofic/rng.hpp"

using namespace sofic;

namespace {

// Independent oracle: minimum of boundary/trace over all admissible subsets,
// walked through the Subset API rather than the checker's bitmask loop.
Rat min_ratio_oracle(const GenTuple& t) {
  std::uint32_t n = t.degree();
  REQUIRE(n <= 16);
  Rat best(0);
  bool have = false;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    Subset s(n);
    for (std::uint32_t i = 0; i < n; ++i)
      if (mask & (1u << i)) s.insert(i);
    if (s.count() * 2 > n) continue;
    Rat ratio = boundary_sum(t, s) / s.trace();
    if (!have || ratio < best) {
      best = ratio;
      have = true;
    }
  }
  REQUIRE(have);
  return best;
}

}  // namespace

TEST_CASE("boundary_sum") {
  GenTuple t({cycle(8)});
  CHECK(boundary_sum(t, Subset::full(8)) == Rat(0));
  CHECK(boundary_sum(t, Subset::of(8, {0, 1, 2, 3})) == Rat(2, 8));
  // duplicated generators double the boundary
  Rng rng(31);
  Perm p(rng.random_images(8));
  GenTuple one({p}), two({p, p});
  Subset s = Subset::of(8, {0, 2, 5});
  CHECK(boundary_sum(two, s) == Rat(2) * boundary_sum(one, s));
  CHECK_THROWS_AS(boundary_sum(t, Subset::of(5, {0})), std::invalid_argument);
}

TEST_CASE("exact checker on the 8-cycle") {
  GenTuple t({cycle(8)});
  ExpansionCertificate cert = check_expander_exact(t, Rat(1, 10));
  CHECK(cert.verdict == ExpVerdict::EXACT_PASS);
  REQUIRE(cert.min_ratio.has_value());
  // oracle: the min boundary over |S| <= 4 is 2/8, attained on a contiguous
  // half, giving ratio (2/8)/(4/8) = 1/2
  CHECK(*cert.min_ratio == min_ratio_oracle(t));
  CHECK(*cert.min_ratio == Rat(1, 2));
}

TEST_CASE("exact checker refutes identity tuples") {
  GenTuple t({Perm::identity(6), Perm::identity(6)});
  ExpansionCertificate cert = check_expander_exact(t, Rat(1, 100));
  CHECK(cert.verdict == ExpVerdict::REFUTED);
  REQUIRE(cert.witness.has_value());
  CHECK(cert.witness->count() == 1);  // first violating subset is a singleton
  CHECK(violates_expansion(t, *cert.witness, Rat(1, 100)));
}

TEST_CASE("lambda zero separates connected from disconnected") {
  // transitive tuple: every proper subset has positive boundary
  CHECK(check_expander_exact(GenTuple({cycle(11)}), Rat(0)).verdict ==
        ExpVerdict::EXACT_PASS);
  // two orbits: an orbit violates with boundary zero (equality is refuted)
  GenTuple split({direct_sum(cycle(3), cycle(3))});
  ExpansionCertificate cert = check_expander_exact(split, Rat(0));
  CHECK(cert.verdict == ExpVerdict::REFUTED);
  REQUIRE(cert.witness.has_value());
  CHECK(boundary_sum(split, *cert.witness).is_zero());
}

TEST_CASE("strict inequality: equality cases are refuted") {
  // contiguous half of the 40-cycle: boundary 2/40 equals 0.1 * Tr exactly
  GenTuple t({cycle(40)});
  Subset half(40);
  for (std::uint32_t i = 0; i < 20; ++i) half.insert(i);
  CHECK(boundary_sum(t, half) == Rat(1, 10) * half.trace());
  CHECK(violates_expansion(t, half, Rat(1, 10)));
}

TEST_CASE("sampled refuter finds cycle witnesses") {
  GenTuple t({cycle(64)});
  ExpansionCertificate cert = refute_expander_sampled(t, Rat(1, 10), 40, 7);
  REQUIRE(cert.verdict == ExpVerdict::REFUTED);
  REQUIRE(cert.witness.has_value());
  CHECK(violates_expansion(t, *cert.witness, Rat(1, 10)));

  ExpansionCertificate triv = refute_expander_sampled(GenTuple({Perm::identity(30)}),
                                                      Rat(1, 100), 5, 1);
  REQUIRE(triv.verdict == ExpVerdict::REFUTED);
  CHECK(violates_expansion(GenTuple({Perm::identity(30)}), *triv.witness, Rat(1, 100)));
}

TEST_CASE("sampled refutations are a subset of true violations") {
  Rng rng(32);
  for (int trial = 0; trial < 15; ++trial) {
    std::uint32_t n = 4 + static_cast<std::uint32_t>(rng.below(7));
    GenTuple t({cycle(n), Perm(rng.random_images(n))});
    ExpansionCertificate exact = check_expander_exact(t, Rat(1, 10));
    ExpansionCertificate sampled = refute_expander_sampled(t, Rat(1, 10), 10, rng.next());
    if (exact.verdict == ExpVerdict::EXACT_PASS)
      CHECK(sampled.verdict == ExpVerdict::SAMPLED_NO_REFUTATION);
    if (sampled.verdict == ExpVerdict::REFUTED)
      CHECK(violates_expansion(t, *sampled.witness, Rat(1, 10)));
  }
}

TEST_CASE("monotonicity in lambda") {
  Rng rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    std::uint32_t n = 5 + static_cast<std::uint32_t>(rng.below(5));
    GenTuple t({cycle(n), Perm(rng.random_images(n))});
    if (check_expander_exact(t, Rat(1, 10)).verdict == ExpVerdict::EXACT_PASS) {
      CHECK(check_expander_exact(t, Rat(1, 20)).verdict == ExpVerdict::EXACT_PASS);
      CHECK(check_expander_exact(t, Rat(1, 100)).verdict == ExpVerdict::EXACT_PASS);
    }
  }
}

TEST_CASE("expansion verdict is conjugation invariant") {
  Rng rng(34);
  for (int trial = 0; trial < 10; ++trial) {
    std::uint32_t n = 5 + static_cast<std::uint32_t>(rng.below(4));
    GenTuple t({cycle(n), Perm(rng.random_images(n))});
    GenTuple conj = conjugate(Perm(rng.random_images(n)), t);
    ExpansionCertificate c1 = check_expander_exact(t, Rat(1, 10));
    ExpansionCertificate c2 = check_expander_exact(conj, Rat(1, 10));
    CHECK(c1.verdict == c2.verdict);
    if (c1.min_ratio && c2.min_ratio) CHECK(*c1.min_ratio == *c2.min_ratio);
  }
}

TEST_CASE("sample_expander_pair") {
  ExpanderSample s = sample_expander_pair(8, Rat(1, 10), 2, 20, 42);
  REQUIRE(s.found);
  CHECK(s.cert.verdict == ExpVerdict::EXACT_PASS);
  CHECK(s.tuple.gen(0) == cycle(8));  // first generator is the cycle
  CHECK(s.freeness < Rat(1, 2));
  CHECK(s.tries <= 20);

  // n=2 is fully enumerable: c is id or the swap; report whatever happens
  ExpanderSample tiny = sample_expander_pair(2, Rat(1, 10), 1, 8, 5);
  if (tiny.found) {
    CHECK(tiny.cert.verdict == ExpVerdict::EXACT_PASS);
  } else {
    CHECK(tiny.tries == 8);
  }
}

TEST_CASE("degree over limit is rejected") {
  CHECK_THROWS_AS(check_expander_exact(GenTuple({cycle(21)}), Rat(1, 10)),
                  std::domain_error);
}
