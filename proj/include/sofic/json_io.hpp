#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sofic/census.hpp"
#include "sofic/convexity.hpp"
#include "sofic/deamplify.hpp"
#include "sofic/expansion.hpp"
#include "sofic/perm.hpp"
#include "sofic/rational.hpp"
#include "sofic/strange.hpp"
#include "sofic/version.hpp"

// JSON formats (stable; documented in the README):
//   Rat       "p/q" string, reduced, q >= 1
//   Perm      array of images, e.g. [1,2,3,0]
//   Subset    {"n": 8, "members": [0,1,2,3]}
//   GenTuple  {"n": 4, "perms": [[1,2,3,0], [0,1,2,3]]}
//   Word      array of nonzero signed codes, +g / -g for generator g's
//             letter and its inverse, e.g. [1, -2]
// Timing never enters JSON output, so identical config + seed gives
// byte-identical bytes.

namespace sofic {

using nlohmann::json;

inline void to_json(json& j, const Rat& r) { j = r.str(); }
inline void from_json(const json& j, Rat& r) { r = Rat::parse(j.get<std::string>()); }

inline void to_json(json& j, const Perm& p) { j = p.images(); }
inline void from_json(const json& j, Perm& p) {
  p = Perm(j.get<std::vector<std::uint32_t>>());
}

inline void to_json(json& j, const PartialPerm& q) {
  j = json::array();
  for (std::uint32_t i = 0; i < q.degree(); ++i)
    j.push_back(q.defined(i) ? json(q.at(i)) : json(nullptr));
}
inline void from_json(const json& j, PartialPerm& q) {
  std::vector<std::uint32_t> img;
  for (const auto& e : j)
    img.push_back(e.is_null() ? PartialPerm::kUndefined : e.get<std::uint32_t>());
  q = PartialPerm(std::move(img));
}

inline void to_json(json& j, const Subset& s) {
  j = json{{"n", s.degree()}, {"members", s.members()}};
}
inline void from_json(const json& j, Subset& s) {
  s = Subset::of(j.at("n").get<std::uint32_t>(),
                 j.at("members").get<std::vector<std::uint32_t>>());
}

inline void to_json(json& j, const GenTuple& t) {
  j = json{{"n", t.degree()}, {"perms", t.gens()}};
}
inline void from_json(const json& j, GenTuple& t) {
  t = GenTuple(j.at("perms").get<std::vector<Perm>>());
  if (j.contains("n") && j.at("n").get<std::uint32_t>() != t.degree())
    throw std::invalid_argument("GenTuple JSON: n does not match perms");
}

inline void to_json(json& j, const Word& w) { j = w.letters(); }
inline void from_json(const json& j, Word& w) { w = Word(j.get<std::vector<int>>()); }

// --- expansion --------------------------------------------------------------

inline ExpVerdict exp_verdict_from_string(const std::string& s) {
  if (s == "EXACT_PASS") return ExpVerdict::EXACT_PASS;
  if (s == "REFUTED") return ExpVerdict::REFUTED;
  if (s == "SAMPLED_NO_REFUTATION") return ExpVerdict::SAMPLED_NO_REFUTATION;
  throw std::invalid_argument("unknown expansion verdict: " + s);
}

inline void to_json(json& j, const ExpansionCertificate& c) {
  j = json{{"lambda", c.lambda},
           {"verdict", to_string(c.verdict)},
           {"witness", c.witness ? json(*c.witness) : json(nullptr)},
           {"min_ratio", c.min_ratio ? json(*c.min_ratio) : json(nullptr)},
           {"trials", c.trials},
           {"seed", c.seed}};
}
inline void from_json(const json& j, ExpansionCertificate& c) {
  c.lambda = j.at("lambda").get<Rat>();
  c.verdict = exp_verdict_from_string(j.at("verdict").get<std::string>());
  c.witness.reset();
  if (!j.at("witness").is_null()) c.witness = j.at("witness").get<Subset>();
  c.min_ratio.reset();
  if (!j.at("min_ratio").is_null()) c.min_ratio = j.at("min_ratio").get<Rat>();
  c.trials = j.at("trials").get<long long>();
  c.seed = j.at("seed").get<std::uint64_t>();
}

// --- census -----------------------------------------------------------------

inline Verdict verdict_from_string(const std::string& s) {
  if (s == "STRICT") return Verdict::STRICT;
  if (s == "EQUAL") return Verdict::EQUAL;
  if (s == "VIOLATED") return Verdict::VIOLATED;
  if (s == "ASYMPTOTIC_REGIME_ONLY") return Verdict::ASYMPTOTIC_REGIME_ONLY;
  throw std::invalid_argument("unknown verdict: " + s);
}

inline void to_json(json& j, const BoundValue& b) {
  j = json{{"exact", b.exact},
           {"approx", static_cast<double>(b.approx)},
           {"expr", b.expr}};
  if (b.exact) j["value"] = b.value;
}
inline void from_json(const json& j, BoundValue& b) {
  b.exact = j.at("exact").get<bool>();
  b.approx = j.at("approx").get<double>();
  b.expr = j.at("expr").get<std::string>();
  if (b.exact) b.value = j.at("value").get<Rat>();
}

inline void to_json(json& j, const CountReport& r) {
  j = json{{"prop", r.prop},
           {"n", r.n},
           {"parameter", r.parameter},
           {"count", r.count},
           {"bound", r.bound},
           {"direction", std::string(1, r.direction)},
           {"verdict", to_string(r.satisfied)},
           {"asymptotic_claim", r.asymptotic_claim},
           {"hypothesis_ok", r.hypothesis_ok},
           {"enumeration_order", r.enumeration_order},
           {"witnesses_complete", r.witnesses_complete},
           {"witnesses", r.witnesses}};
  if (!r.witness_conjugators.empty()) j["witness_conjugators"] = r.witness_conjugators;
}
inline void from_json(const json& j, CountReport& r) {
  r.prop = j.at("prop").get<std::string>();
  r.n = j.at("n").get<std::uint32_t>();
  r.parameter = j.at("parameter").get<Rat>();
  r.count = j.at("count").get<long long>();
  r.bound = j.at("bound").get<BoundValue>();
  r.direction = j.at("direction").get<std::string>().at(0);
  r.satisfied = verdict_from_string(j.at("verdict").get<std::string>());
  r.asymptotic_claim = j.at("asymptotic_claim").get<bool>();
  r.hypothesis_ok = j.at("hypothesis_ok").get<bool>();
  r.enumeration_order = j.at("enumeration_order").get<std::string>();
  r.witnesses_complete = j.at("witnesses_complete").get<bool>();
  r.witnesses = j.at("witnesses").get<std::vector<Perm>>();
  if (j.contains("witness_conjugators"))
    r.witness_conjugators = j.at("witness_conjugators").get<std::vector<Perm>>();
}

inline void to_json(json& j, const KLInclusionReport& r) {
  j = json{{"n", r.n},
           {"delta", r.delta},
           {"levels", r.levels},
           {"card_K", r.card_K},
           {"card_L_intersection", r.card_L_intersection},
           {"violations", r.violations},
           {"inclusion_holds", r.inclusion_holds}};
}
inline void from_json(const json& j, KLInclusionReport& r) {
  r.n = j.at("n").get<std::uint32_t>();
  r.delta = j.at("delta").get<Rat>();
  r.levels = j.at("levels").get<std::uint32_t>();
  r.card_K = j.at("card_K").get<long long>();
  r.card_L_intersection = j.at("card_L_intersection").get<long long>();
  r.violations = j.at("violations").get<long long>();
  r.inclusion_holds = j.at("inclusion_holds").get<bool>();
}

// --- convexity ----------------------------------------------------------------

inline void to_json(json& j, const CutResult& c) {
  j = json{{"restricted", c.restricted}, {"defect", c.defect}, {"patched", c.patched}};
}
inline void from_json(const json& j, CutResult& c) {
  c.restricted = j.at("restricted").get<GenTuple>();
  c.defect = j.at("defect").get<Rat>();
  c.patched = j.at("patched").get<std::uint64_t>();
}

inline void to_json(json& j, const Combination& c) {
  j = json{{"tuple", c.tuple}, {"blocks", c.blocks}};
}
inline void from_json(const json& j, Combination& c) {
  c.tuple = j.at("tuple").get<GenTuple>();
  c.blocks = j.at("blocks").get<std::vector<Subset>>();
}

// --- deamplify ----------------------------------------------------------------

inline void to_json(json& j, const DeamplifyResult& d) {
  j = json{{"v", d.v},
           {"eps", d.eps},
           {"lambda", d.lambda},
           {"k", d.k},
           {"r", d.r},
           {"chosen_row", d.chosen_row},
           {"chosen_col", d.chosen_col},
           {"tr_pj", d.tr_pj},
           {"achieved", d.achieved},
           {"certified_bound", d.certified_bound},
           {"guarantee", to_string(d.guarantee)},
           {"block_sums_ok", d.block_sums_ok}};
}
inline void from_json(const json& j, DeamplifyResult& d) {
  d.v = j.at("v").get<Perm>();
  d.eps = j.at("eps").get<Rat>();
  d.lambda = j.at("lambda").get<Rat>();
  d.k = j.at("k").get<std::uint32_t>();
  d.r = j.at("r").get<std::uint32_t>();
  d.chosen_row = j.at("chosen_row").get<std::uint32_t>();
  d.chosen_col = j.at("chosen_col").get<std::uint32_t>();
  d.tr_pj = j.at("tr_pj").get<Rat>();
  d.achieved = j.at("achieved").get<Rat>();
  d.certified_bound = j.at("certified_bound").get<Rat>();
  d.guarantee = j.at("guarantee").get<std::string>() == "CERTIFIED"
                    ? Guarantee::CERTIFIED
                    : Guarantee::NO_GUARANTEE;
  d.block_sums_ok = j.at("block_sums_ok").get<bool>();
}

/// The full block-defect matrices, attached by the CLI under --verbose.
inline json block_matrices_json(const DeamplifyResult& d) {
  return json{{"eps_blocks", d.eps_blocks}, {"delta_blocks", d.delta_blocks}};
}

// --- strange ------------------------------------------------------------------

inline void to_json(json& j, const AlmostDisjointSet& s) {
  j = json{{"t", s.t}, {"elems", s.elems}};
}
inline void from_json(const json& j, AlmostDisjointSet& s) {
  s.t = j.at("t").get<Rat>();
  s.elems = j.at("elems").get<std::vector<std::uint64_t>>();
}

inline void to_json(json& j, const PairEvidence& e) {
  j = json{{"i", e.i}, {"j", e.j}, {"value", e.value}, {"exact", e.exact},
           {"witness", e.witness}};
}
inline void from_json(const json& j, PairEvidence& e) {
  e.i = j.at("i").get<std::uint32_t>();
  e.j = j.at("j").get<std::uint32_t>();
  e.value = j.at("value").get<Rat>();
  e.exact = j.at("exact").get<bool>();
  e.witness = j.at("witness").get<Perm>();
}

inline void to_json(json& j, const FarExpanderFamily& f) {
  j = json{{"n", f.n},
           {"lambda", f.lambda},
           {"separation", f.separation},
           {"radius", f.radius},
           {"target", f.target},
           {"members", f.members},
           {"certs", f.certs},
           {"freeness", f.freeness},
           {"pairwise", f.pairwise},
           {"seed", f.seed},
           {"candidates_tried", f.candidates_tried},
           {"complete", f.complete}};
}
inline void from_json(const json& j, FarExpanderFamily& f) {
  f.n = j.at("n").get<std::uint32_t>();
  f.lambda = j.at("lambda").get<Rat>();
  f.separation = j.at("separation").get<Rat>();
  f.radius = j.at("radius").get<std::uint32_t>();
  f.target = j.at("target").get<std::uint32_t>();
  f.members = j.at("members").get<std::vector<Perm>>();
  f.certs = j.at("certs").get<std::vector<ExpansionCertificate>>();
  f.freeness = j.at("freeness").get<std::vector<Rat>>();
  f.pairwise = j.at("pairwise").get<std::vector<PairEvidence>>();
  f.seed = j.at("seed").get<std::uint64_t>();
  f.candidates_tried = j.at("candidates_tried").get<std::uint64_t>();
  f.complete = j.at("complete").get<bool>();
}

inline void to_json(json& j, const KRefutation& k) {
  j = json{{"trials", k.trials},
           {"seed", k.seed},
           {"refuted", k.refuted},
           {"witness", k.witness ? json(*k.witness) : json(nullptr)},
           {"strategy", k.strategy}};
}
inline void from_json(const json& j, KRefutation& k) {
  k.trials = j.at("trials").get<long long>();
  k.seed = j.at("seed").get<std::uint64_t>();
  k.refuted = j.at("refuted").get<bool>();
  k.witness.reset();
  if (!j.at("witness").is_null()) k.witness = j.at("witness").get<Perm>();
  k.strategy = j.at("strategy").get<std::string>();
}

inline void to_json(json& j, const StrangeCandidate& s) {
  j = json{{"p", s.p},
           {"delta", s.delta},
           {"coxeter", s.coxeter_len},
           {"worst_word", s.worst},
           {"worst_fix", s.worst_fix},
           {"block_sizes", s.block_sizes},
           {"t_tries_used", s.t_tries_used},
           {"k_exhaustive", s.k_exhaustive},
           {"k_refutation", s.k_refutation}};
}
inline void from_json(const json& j, StrangeCandidate& s) {
  s.p = j.at("p").get<Perm>();
  s.delta = j.at("delta").get<Rat>();
  s.coxeter_len = j.at("coxeter").get<Rat>();
  s.worst = j.at("worst_word").get<Word>();
  s.worst_fix = j.at("worst_fix").get<Rat>();
  s.block_sizes = j.at("block_sizes").get<std::vector<std::uint32_t>>();
  s.t_tries_used = j.at("t_tries_used").get<std::uint32_t>();
  s.k_exhaustive = j.at("k_exhaustive").get<bool>();
  s.k_refutation = j.at("k_refutation").get<KRefutation>();
}

// --- documents ----------------------------------------------------------------

/// Wraps a payload as a persisted document: schema + version + config echo.
inline json make_document(const std::string& type, json config, json payload) {
  json doc = std::move(payload);
  doc["schema"] = kSchema;
  doc["type"] = type;
  doc["version"] = kVersion;
  doc["config"] = std::move(config);
  return doc;
}

}  // namespace sofic
