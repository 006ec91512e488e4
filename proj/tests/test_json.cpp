#include <catch2/catch_amalgamated.hpp>

#include "sofic/json_io.hpp"
#include "sofic/rng.hpp"
#include "sofic/verify.hpp"

using namespace sofic;

TEST_CASE("rational parsing and printing") {
  CHECK(Rat::parse("1/10") == Rat(1, 10));
  CHECK(Rat::parse("0.1") == Rat(1, 10));
  CHECK(Rat::parse("3/6") == Rat(1, 2));
  CHECK(Rat::parse("2") == Rat(2));
  CHECK(Rat::parse("-0.25") == Rat(-1, 4));
  CHECK(Rat(0).str() == "0/1");
  CHECK(Rat(2, 4).str() == "1/2");
  CHECK_THROWS(Rat::parse(""));
  CHECK_THROWS(Rat(1, 0));
}

TEST_CASE("rational arithmetic is exact") {
  CHECK(Rat(1, 3) + Rat(1, 6) == Rat(1, 2));
  CHECK(Rat(1, 3) * Rat(3, 7) == Rat(1, 7));
  CHECK(Rat(1, 3) - Rat(1, 2) == Rat(-1, 6));
  CHECK(Rat(1, 3) < Rat(2, 5));
  CHECK_THROWS_AS(Rat(1) / Rat(0), std::domain_error);
  // weights summing to 1 stay 1 through long chains
  Rat total(0);
  for (int i = 0; i < 77; ++i) total += Rat(1, 77);
  CHECK(total == Rat(1));
}

TEST_CASE("value round trips") {
  Rng rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    Perm p(rng.random_images(1 + static_cast<std::uint32_t>(rng.below(12))));
    CHECK(json(p).get<Perm>() == p);
  }
  GenTuple t({cycle(6), reversal(6)});
  CHECK(json(t).get<GenTuple>() == t);

  Subset s = Subset::of(9, {0, 4, 8});
  CHECK(json(s).get<Subset>() == s);

  Word w({1, -2, 1, 1});
  CHECK(json(w).get<Word>() == w);

  PartialPerm q({3, PartialPerm::kUndefined, 0, PartialPerm::kUndefined});
  CHECK(json(q).get<PartialPerm>() == q);

  CHECK(json(Rat(7, 3)).get<Rat>() == Rat(7, 3));
}

TEST_CASE("tuple JSON shape matches the documented format") {
  GenTuple t({cycle(4), Perm({0, 1, 2, 3})});
  json j = t;
  CHECK(j["n"] == 4);
  CHECK(j["perms"][0] == json::array({1, 2, 3, 0}));
  // n field is validated on the way back in
  json bad = j;
  bad["n"] = 5;
  CHECK_THROWS_AS(bad.get<GenTuple>(), std::invalid_argument);
}

TEST_CASE("certificate round trips") {
  GenTuple t({cycle(8), reversal(8)});
  ExpansionCertificate cert = check_expander_exact(t, Rat(1, 10));
  json j = cert;
  ExpansionCertificate back = j.get<ExpansionCertificate>();
  CHECK(back.verdict == cert.verdict);
  CHECK(back.lambda == cert.lambda);
  CHECK(json(back).dump() == j.dump());
}

TEST_CASE("seeded pipelines emit byte-identical JSON") {
  auto run = [] {
    ExpanderSample s = sample_expander_pair(10, Rat(1, 10), 2, 20, 4242);
    json doc = make_document("expansion_certificate", {{"n", 10}, {"seed", 4242}},
                             {{"tuple", s.tuple}, {"certificate", s.cert}});
    return doc.dump(2);
  };
  CHECK(run() == run());

  auto strange = [] {
    StrangeCandidate s = build_strange_candidate(24, Rat(1, 3), 7, 40, 60);
    return json(s).dump();
  };
  CHECK(strange() == strange());
}

TEST_CASE("verify: expansion certificates") {
  GenTuple good({cycle(9), Perm(Rng(3).random_images(9))});
  ExpansionCertificate cert = check_expander_exact(good, Rat(1, 10));
  json doc = make_document("expansion_certificate", json::object(),
                           {{"tuple", good}, {"certificate", cert}});
  CHECK(verify_document(doc).ok);

  // tamper: claim a pass for the identity tuple
  json bad = doc;
  bad["tuple"] = GenTuple({Perm::identity(9)});
  CHECK_FALSE(verify_document(bad).ok);

  GenTuple idt({Perm::identity(9)});
  ExpansionCertificate ref = check_expander_exact(idt, Rat(1, 10));
  json refdoc = make_document("expansion_certificate", json::object(),
                              {{"tuple", idt}, {"certificate", ref}});
  CHECK(verify_document(refdoc).ok);

  GenTuple big({cycle(64), Perm(Rng(4).random_images(64))});
  ExpansionCertificate sampled = refute_expander_sampled(big, Rat(1, 10), 10, 9);
  json sdoc = make_document("expansion_certificate", json::object(),
                            {{"tuple", big}, {"certificate", sampled}});
  CHECK(verify_document(sdoc, true).ok);
}

TEST_CASE("verify: count reports") {
  Perm x = cycle(4);
  CountReport rep = count_hamming_ball(x, Rat(6, 10));
  json doc = make_document("count_report", json::object(),
                           {{"inputs", {{"x", x}}}, {"report", rep}});
  CHECK(verify_document(doc).ok);
  CHECK(verify_document(doc, true).ok);

  json bad = doc;
  bad["report"]["count"] = 3;  // break count/witness agreement
  CHECK_FALSE(verify_document(bad).ok);

  CountReport sball = count_s_ball(compose(cycle(5), cycle(5)), Rat(1, 5));
  json sdoc = make_document("count_report", json::object(),
                            {{"inputs", {{"b", compose(cycle(5), cycle(5))}}},
                             {"report", sball}});
  CHECK(verify_document(sdoc, true).ok);
}

TEST_CASE("verify: deamplification documents") {
  Rng rng(72);
  std::uint32_t n = 12, r = 3;
  std::vector<Perm> gens{cycle(n), Perm(rng.random_images(n))};
  GenTuple x(gens);
  Perm v0(rng.random_images(n));
  GenTuple y = conjugate(v0, x);
  Perm u = tensor_id(v0, r);
  ExpansionCertificate ycert = check_expander_exact(y, Rat(1, 10));
  REQUIRE(ycert.verdict == ExpVerdict::EXACT_PASS);
  DeamplifyResult res = deamplify(x, y, u, Rat(1, 10), ycert);
  CHECK(res.guarantee == Guarantee::CERTIFIED);
  json doc = make_document("deamplify_result", json::object(),
                           {{"x", x},
                            {"y", y},
                            {"u", u},
                            {"lambda", Rat(1, 10)},
                            {"y_certificate", ycert},
                            {"result", res}});
  VerifyOutcome out = verify_document(doc, true);
  CHECK(out.ok);

  json bad = doc;
  bad["result"]["achieved"] = "1/2";
  CHECK_FALSE(verify_document(bad).ok);
}

TEST_CASE("verify: strange candidates and families") {
  StrangeCandidate s = build_strange_candidate(24, Rat(1, 3), 19, 40, 80);
  json doc = make_document("strange_candidate", json::object(), {{"candidate", s}});
  CHECK(verify_document(doc, true).ok);

  json bad = doc;
  bad["candidate"]["coxeter"] = "0/1";
  CHECK_FALSE(verify_document(bad).ok);

  FarExpanderFamily fam = pick_far_expanders(7, 2, Rat(1, 10), Rat(1, 10), 2, 23, 200);
  REQUIRE(fam.complete);
  json fdoc = make_document("far_expander_family", json::object(), {{"family", fam}});
  CHECK(verify_document(fdoc).ok);

  json fbad = fdoc;
  fbad["family"]["freeness"][0] = "0/1";
  CHECK_FALSE(verify_document(fbad).ok);
}

TEST_CASE("verify: cuts and combinations") {
  Rng rng(73);
  GenTuple t({direct_sum(cycle(3), cycle(5)), direct_sum(reversal(3), reversal(5))});
  Subset s = Subset::of(8, {0, 1, 2});
  CutResult r = cut(t, s);
  json doc = make_document("cut_result", json::object(),
                           {{"tuple", t}, {"subset", s}, {"result", r}});
  CHECK(verify_document(doc).ok);

  GenTuple t2({cycle(4), Perm(rng.random_images(4))});
  Combination comb = convex_combine({t2, t2}, {Rat(1, 3), Rat(2, 3)}, 3);
  json cdoc = make_document("combination", json::object(),
                            {{"tuples", std::vector<GenTuple>{t2, t2}},
                             {"weights", std::vector<Rat>{Rat(1, 3), Rat(2, 3)}},
                             {"scale", 3},
                             {"result", comb}});
  CHECK(verify_document(cdoc).ok);

  json bad = cdoc;
  bad["result"]["blocks"][0]["members"] = json::array({0});
  CHECK_FALSE(verify_document(bad).ok);
}

TEST_CASE("verify: kl inclusion and unknown types") {
  KLInclusionReport rep = kl_inclusion_check(5, Rat(1, 44));
  json doc = make_document("kl_inclusion", json::object(), {{"report", rep}});
  CHECK(verify_document(doc).ok);
  CHECK(verify_document(doc, true).ok);

  CHECK_FALSE(verify_document(json{{"type", "banana"}}).ok);
}
