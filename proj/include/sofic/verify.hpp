#pragma once

#include <string>
#include <vector>

#include "sofic/json_io.hpp"

namespace sofic {

/// Result of re-validating a persisted document. Every claimed inequality
/// is recomputed from the embedded witnesses; `deep` additionally redoes
/// full enumerations/replays where those are the only way to confirm a
/// claim.
struct VerifyOutcome {
  bool ok = true;
  std::vector<std::string> checks;

  void require(bool cond, const std::string& what) {
    checks.push_back(std::string(cond ? "ok   " : "FAIL ") + what);
    ok = ok && cond;
  }
};

namespace detail {

inline void verify_expansion_payload(VerifyOutcome& out, const GenTuple& t,
                                     const ExpansionCertificate& cert, bool deep) {
  switch (cert.verdict) {
    case ExpVerdict::REFUTED: {
      out.require(cert.witness.has_value(), "REFUTED certificate carries a witness");
      if (cert.witness)
        out.require(violates_expansion(t, *cert.witness, cert.lambda),
                    "witness violates lambda*Tr(S) < boundary_sum(S) exactly");
      break;
    }
    case ExpVerdict::EXACT_PASS: {
      out.require(cert.min_ratio.has_value() || t.degree() == 1,
                  "EXACT_PASS certificate carries min_ratio");
      if (cert.min_ratio)
        out.require(*cert.min_ratio > cert.lambda, "min_ratio exceeds lambda");
      if (t.degree() <= 25) {
        ExpansionCertificate re = check_expander_exact(t, cert.lambda, 25);
        out.require(re.verdict == ExpVerdict::EXACT_PASS,
                    "exact re-enumeration confirms EXACT_PASS");
        if (cert.min_ratio && re.min_ratio)
          out.require(*re.min_ratio == *cert.min_ratio,
                      "exact re-enumeration reproduces min_ratio");
      } else {
        out.require(false, "EXACT_PASS at degree beyond exact re-check");
      }
      break;
    }
    case ExpVerdict::SAMPLED_NO_REFUTATION: {
      if (deep) {
        ExpansionCertificate re =
            refute_expander_sampled(t, cert.lambda, cert.trials, cert.seed);
        out.require(re.verdict == ExpVerdict::SAMPLED_NO_REFUTATION,
                    "seeded replay reproduces no-refutation");
      } else {
        out.require(true, "no-refutation certificate (one-sided, nothing to re-check)");
      }
      break;
    }
  }
}

inline std::uint64_t count_against(const std::string& prop, const json& inputs,
                                   const Perm& y, std::uint32_t n, const Rat& param) {
  const std::uint64_t u = static_cast<std::uint64_t>(param.num() < 0 ? 0 : param.num());
  const std::uint64_t v = static_cast<std::uint64_t>(param.den());
  if (prop == "hamming-ball") {
    Perm x = inputs.at("x").get<Perm>();
    return static_cast<std::uint64_t>(hamming_count(x, y)) * v < u * n;
  }
  if (prop == "cycle-commutant") {
    Perm a = cycle(n);
    return static_cast<std::uint64_t>(hamming_count(compose(a, y), compose(y, a))) * v < u * n;
  }
  if (prop == "near-commutant") {
    Perm b = inputs.at("b").get<Perm>();
    return static_cast<std::uint64_t>(hamming_count(compose(b, y), compose(y, b))) * v < u * n;
  }
  throw std::invalid_argument("no witness predicate for prop " + prop);
}

inline void verify_count_report(VerifyOutcome& out, const json& doc, bool deep) {
  CountReport rep = doc.at("report").get<CountReport>();
  json inputs = doc.value("inputs", json::object());
  Verdict expected = detail::classify(rep.count, rep.bound, rep.direction,
                                      rep.asymptotic_claim, rep.hypothesis_ok);
  out.require(expected == rep.satisfied, "verdict consistent with count vs bound");
  if (rep.witnesses_complete && !rep.witnesses.empty())
    out.require(static_cast<long long>(rep.witnesses.size()) == rep.count,
                "complete witness list matches count");
  if (rep.prop == "s-ball") {
    const Perm b = inputs.at("b").get<Perm>();
    const Perm a = cycle(rep.n);
    out.require(rep.witness_conjugators.size() == rep.witnesses.size(),
                "every member carries a conjugator");
    bool all_ok = true;
    for (std::size_t i = 0; i < rep.witnesses.size(); ++i) {
      const Perm& c = rep.witnesses[i];
      const Perm& p = rep.witness_conjugators[i];
      Rat total = hamming(a, conjugate(p, a)) + hamming(b, conjugate(p, c));
      all_ok = all_ok && total < rep.parameter;
    }
    out.require(all_ok, "each member's conjugator puts it inside the ball");
  } else if (rep.prop == "hamming-ball" || rep.prop == "cycle-commutant" ||
             rep.prop == "near-commutant") {
    bool all_ok = true;
    for (const Perm& y : rep.witnesses)
      all_ok = all_ok && count_against(rep.prop, inputs, y, rep.n, rep.parameter) == 1;
    out.require(all_ok, "every witness satisfies the defining inequality");
  }
  if (deep) {
    CountReport re;
    if (rep.prop == "hamming-ball") {
      re = count_hamming_ball(inputs.at("x").get<Perm>(), rep.parameter);
    } else if (rep.prop == "cycle-commutant") {
      re = count_cycle_commuting(rep.n, rep.parameter);
    } else if (rep.prop == "near-commutant") {
      re = count_near_commuting(inputs.at("b").get<Perm>(), rep.parameter);
    } else if (rep.prop == "s-ball") {
      re = count_s_ball(inputs.at("b").get<Perm>(), rep.parameter);
    } else if (rep.prop == "L-card") {
      re = count_L_set(rep.n, rep.parameter);
    } else if (rep.prop == "K-card") {
      re = count_K_set(rep.n, rep.parameter);
    } else if (rep.prop == "T-card") {
      re = count_T_set(rep.n, rep.parameter);
    } else {
      out.require(false, "unknown prop for deep recount: " + rep.prop);
      return;
    }
    out.require(re.count == rep.count, "full recount matches");
    out.require(re.satisfied == rep.satisfied, "recount verdict matches");
  }
}

inline void verify_deamplify(VerifyOutcome& out, const json& doc, bool deep) {
  GenTuple x = doc.at("x").get<GenTuple>();
  GenTuple y = doc.at("y").get<GenTuple>();
  Perm u = doc.at("u").get<Perm>();
  DeamplifyResult res = doc.at("result").get<DeamplifyResult>();
  out.require(intertwiner_defect(x, y, u) == res.eps, "eps re-measures identically");
  std::uint32_t worst = 0;
  for (std::uint32_t t = 0; t < x.arity(); ++t)
    worst = std::max(worst,
                     hamming_count(compose(res.v, x.gen(t)), compose(y.gen(t), res.v)));
  out.require(Rat(worst, x.degree()) == res.achieved, "achieved re-measures identically");
  Rat bound = Rat(20) * Rat(static_cast<long long>(res.k) * res.k) * res.eps / res.lambda;
  out.require(bound == res.certified_bound, "certified bound equals 20 k^2 eps / lambda");
  if (res.guarantee == Guarantee::CERTIFIED) {
    out.require(res.achieved <= res.certified_bound, "CERTIFIED: achieved within bound");
    out.require(res.tr_pj >= Rat(1, 2), "CERTIFIED: selected block has trace >= 1/2");
    bool expander_ok = false;
    if (y.degree() <= 25) {
      ExpansionCertificate cert = check_expander_exact(y, res.lambda, 25);
      expander_ok = cert.verdict == ExpVerdict::EXACT_PASS;
    }
    out.require(expander_ok, "CERTIFIED: target tuple re-checks as exact expander");
  }
  if (deep) {
    json jc = doc.value("y_certificate", json());
    std::optional<ExpansionCertificate> cert;
    if (!jc.is_null()) cert = jc.get<ExpansionCertificate>();
    DeamplifyResult re = deamplify(x, y, u, res.lambda, cert);
    out.require(re.v == res.v && re.chosen_row == res.chosen_row &&
                    re.chosen_col == res.chosen_col && re.guarantee == res.guarantee,
                "deterministic re-run reproduces the result");
  }
}

inline void verify_strange(VerifyOutcome& out, const json& doc, bool deep) {
  StrangeCandidate s = doc.at("candidate").get<StrangeCandidate>();
  std::uint32_t n = s.p.degree();
  out.require(coxeter(s.p) == s.coxeter_len, "Coxeter length re-measures identically");
  out.require(s.coxeter_len < Rat(2) * s.delta, "Coxeter length below 2*delta");
  // structural block-diagonality
  bool diag = true;
  std::uint32_t off = 0;
  for (std::uint32_t size : s.block_sizes) {
    for (std::uint32_t i = off; i < off + size; ++i)
      diag = diag && s.p.at(i) >= off && s.p.at(i) < off + size;
    off += size;
  }
  out.require(off == n && diag, "candidate is block-diagonal");
  TMembership m = in_T(s.p, s.delta);
  out.require(m.member, "in_T re-checks");
  out.require(m.worst_fix == s.worst_fix, "worst word trace matches");
  if (s.k_exhaustive) {
    if (n <= kDoubleLoopLimit) {
      MembershipResult km = in_K(s.p, s.delta);
      out.require(km.member != s.k_refutation.refuted, "exhaustive in_K verdict matches");
    } else {
      out.require(false, "exhaustive K claim at degree beyond the loop limit");
    }
  } else {
    if (s.k_refutation.refuted) {
      out.require(s.k_refutation.witness.has_value() &&
                      detail::k_violates(*s.k_refutation.witness, s.p, s.delta),
                  "K refutation witness violates the inequality");
    } else if (deep) {
      KRefutation re = sample_k_refutation(s.p, s.delta, s.k_refutation.trials,
                                           s.k_refutation.seed, s.block_sizes);
      out.require(re.refuted == s.k_refutation.refuted,
                  "seeded replay reproduces the K refutation verdict");
    } else {
      out.require(true, "K no-refutation record (replay with --deep)");
    }
  }
}

inline void verify_family(VerifyOutcome& out, const json& doc, bool deep) {
  FarExpanderFamily f = doc.at("family").get<FarExpanderFamily>();
  Perm a = cycle(f.n);
  out.require(f.members.size() == f.certs.size() && f.members.size() == f.freeness.size(),
              "per-member evidence is complete");
  bool distinct = true;
  for (std::size_t i = 0; i < f.members.size(); ++i)
    for (std::size_t j = i + 1; j < f.members.size(); ++j)
      distinct = distinct && f.members[i] != f.members[j];
  out.require(distinct, "members are pairwise distinct");
  for (std::size_t i = 0; i < f.members.size(); ++i) {
    GenTuple t({a, f.members[i]});
    VerifyOutcome sub;
    verify_expansion_payload(sub, t, f.certs[i], deep);
    out.require(sub.ok, "member " + std::to_string(i) + ": expansion certificate re-checks");
    out.require(freeness_defect(t, f.radius) == f.freeness[i],
                "member " + std::to_string(i) + ": freeness defect re-measures identically");
    if (f.target >= 1)
      out.require(f.freeness[i] < Rat(1, f.target),
                  "member " + std::to_string(i) + ": freeness below 1/k");
  }
  bool pair_ok = true, pair_far = true;
  for (const PairEvidence& e : f.pairwise) {
    GenTuple x({a, f.members.at(e.i)});
    GenTuple y({a, f.members.at(e.j)});
    if (e.exact) {
      ConjugacyResult re = exact_conjugacy_min(x, y);
      pair_ok = pair_ok && re.value == e.value;
    } else {
      Rat total(0);
      for (std::uint32_t g = 0; g < x.arity(); ++g)
        total += hamming(x.gen(g), conjugate(e.witness, y.gen(g)));
      pair_ok = pair_ok && total == e.value;
    }
    pair_far = pair_far && e.value > f.separation;
  }
  out.require(pair_ok, "pairwise evidence re-evaluates to the recorded values");
  out.require(pair_far, "pairwise evidence exceeds the separation threshold");
}

inline void verify_cut(VerifyOutcome& out, const json& doc) {
  GenTuple t = doc.at("tuple").get<GenTuple>();
  Subset s = doc.at("subset").get<Subset>();
  CutResult claimed = doc.at("result").get<CutResult>();
  CutResult re = cut(t, s);
  out.require(re.restricted == claimed.restricted, "restricted tuple matches");
  out.require(re.defect == claimed.defect, "defect matches");
  out.require(re.patched == claimed.patched, "patched count matches");
}

inline void verify_combination(VerifyOutcome& out, const json& doc) {
  auto tuples = doc.at("tuples").get<std::vector<GenTuple>>();
  auto weights = doc.at("weights").get<std::vector<Rat>>();
  auto scale = doc.at("scale").get<std::uint64_t>();
  Combination claimed = doc.at("result").get<Combination>();
  Combination re = convex_combine(tuples, weights, scale);
  out.require(re.tuple == claimed.tuple, "combined tuple matches");
  out.require(re.blocks == claimed.blocks, "block projections match");
  bool traces_ok = true;
  for (std::size_t i = 0; i < weights.size(); ++i)
    traces_ok = traces_ok && claimed.blocks[i].trace() == weights[i];
  out.require(traces_ok, "block traces equal the weight vector exactly");
}

inline void verify_kl(VerifyOutcome& out, const json& doc, bool deep) {
  KLInclusionReport rep = doc.at("report").get<KLInclusionReport>();
  out.require((rep.violations == 0) == rep.inclusion_holds,
              "inclusion flag consistent with violation count");
  if (deep) {
    KLInclusionReport re = kl_inclusion_check(rep.n, rep.delta);
    out.require(re.card_K == rep.card_K && re.card_L_intersection == rep.card_L_intersection &&
                    re.violations == rep.violations,
                "full recomputation matches");
  }
}

}  // namespace detail

/// Re-validates any document this library emits. Unknown types fail.
inline VerifyOutcome verify_document(const json& doc, bool deep = false) {
  VerifyOutcome out;
  std::string type = doc.value("type", "");
  if (type == "expansion_certificate") {
    detail::verify_expansion_payload(out, doc.at("tuple").get<GenTuple>(),
                                     doc.at("certificate").get<ExpansionCertificate>(), deep);
  } else if (type == "count_report") {
    detail::verify_count_report(out, doc, deep);
  } else if (type == "deamplify_result") {
    detail::verify_deamplify(out, doc, deep);
  } else if (type == "strange_candidate") {
    detail::verify_strange(out, doc, deep);
  } else if (type == "far_expander_family") {
    detail::verify_family(out, doc, deep);
  } else if (type == "cut_result") {
    detail::verify_cut(out, doc);
  } else if (type == "combination") {
    detail::verify_combination(out, doc);
  } else if (type == "kl_inclusion") {
    detail::verify_kl(out, doc, deep);
  } else if (type == "orbit_list") {
    auto claimed = doc.at("orbits").get<std::vector<Subset>>();
    out.require(orbit_subsets(doc.at("tuple").get<GenTuple>()) == claimed,
                "orbit partition matches");
  } else if (type == "decomposition_check") {
    bool holds = verify_decomposition(doc.at("tuple").get<GenTuple>(),
                                      doc.at("subset").get<Subset>());
    out.require(holds == doc.at("holds").get<bool>(), "decomposition flag matches");
  } else if (type == "convexity_run" || type == "census_run") {
    for (const json& item : doc.at(type == "census_run" ? "items" : "results")) {
      VerifyOutcome sub = verify_document(item, deep);
      for (const std::string& line : sub.checks) out.checks.push_back(line);
      out.ok = out.ok && sub.ok;
    }
  } else {
    out.require(false, "unknown document type: '" + type + "'");
  }
  return out;
}

}  // namespace sofic
