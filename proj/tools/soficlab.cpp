// soficlab: experiment runner for permutation metrics, expander
// certification, censuses, convex combinations/cuts, de-amplification, and
// the strange-representation builders.
//
// Exit codes: 0 ok, 1 verification failure or --strict violation,
// 2 invalid configuration, 3 budget/tries exhausted.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "sofic/census.hpp"
#include "sofic/convexity.hpp"
#include "sofic/deamplify.hpp"
#include "sofic/expansion.hpp"
#include "sofic/json_io.hpp"
#include "sofic/strange.hpp"
#include "sofic/verify.hpp"
#include "sofic/version.hpp"

using namespace sofic;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailedCheck = 1;
constexpr int kExitBadConfig = 2;
constexpr int kExitBudget = 3;

int thread_count() {
  const char* env = std::getenv("SOFICLAB_THREADS");
  if (!env) return 1;
  int v = std::atoi(env);
  return v >= 1 ? v : 1;
}

// Temp file + rename so readers never observe a half-written result.
void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp);
    f << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  json j;
  f >> j;
  return j;
}

std::vector<std::uint32_t> parse_degrees(const std::string& arg) {
  std::vector<std::uint32_t> out;
  if (arg.empty()) return out;
  auto dots = arg.find("..");
  if (dots != std::string::npos) {
    std::uint32_t lo = std::stoul(arg.substr(0, dots));
    std::uint32_t hi = std::stoul(arg.substr(dots + 2));
    for (std::uint32_t n = lo; n <= hi; ++n) out.push_back(n);
    return out;
  }
  std::stringstream ss(arg);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoul(tok));
  return out;
}

std::vector<Rat> parse_rats(const std::string& arg) {
  std::vector<Rat> out;
  if (arg.empty()) return out;
  std::stringstream ss(arg);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(Rat::parse(tok));
  return out;
}

std::string csv_header(const std::string& config_echo, const std::string& columns) {
  std::ostringstream os;
  os << "# soficlab " << kVersion << " " << config_echo << "\n" << columns << "\n";
  return os.str();
}

std::string bound_str(const BoundValue& b) {
  if (b.exact)
    return b.value.is_integer() ? std::to_string(b.value.num()) : b.value.str();
  std::ostringstream os;
  os << static_cast<double>(b.approx);
  return os.str();
}

// Worker pool over independent items; results land in item order.
template <class Fn>
std::vector<json> run_items(std::size_t count, Fn&& fn) {
  std::vector<json> results(count);
  int threads = static_cast<int>(std::min<std::size_t>(thread_count(), count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        results[i] = fn(i);
      }
    });
  for (auto& th : pool) th.join();
  return results;
}

struct CensusItem {
  std::uint32_t n;
  Rat param;
};

int run_census(const std::string& prop, const std::string& n_arg,
               const std::string& param_arg, const std::string& input_path,
               const std::string& format, const std::string& out, bool strict) {
  std::vector<std::uint32_t> degrees = parse_degrees(n_arg);
  std::vector<Rat> params = parse_rats(param_arg);
  std::vector<CensusItem> items;
  for (std::uint32_t n : degrees)
    for (const Rat& p : params) items.push_back({n, p});
  if (items.empty()) return kExitOk;  // nothing to run, nothing written

  json input = input_path.empty() ? json::object() : load_json(input_path);
  std::string config_echo =
      "census --prop " + prop + " --n " + n_arg + " --param " + param_arg;

  auto one = [&](std::size_t idx) -> json {
    const CensusItem& item = items[idx];
    CountReport rep;
    json inputs = json::object();
    if (prop == "hamming-ball") {
      Perm x = input.contains("x") ? input.at("x").get<Perm>() : cycle(item.n);
      rep = count_hamming_ball(x, item.param);
      inputs["x"] = x;
    } else if (prop == "cycle-commutant") {
      rep = count_cycle_commuting(item.n, item.param);
    } else if (prop == "near-commutant") {
      Perm b = input.contains("b") ? input.at("b").get<Perm>() : cycle(item.n);
      rep = count_near_commuting(b, item.param);
      inputs["b"] = b;
    } else if (prop == "s-ball") {
      Perm b = input.contains("b") ? input.at("b").get<Perm>() : cycle(item.n);
      rep = count_s_ball(b, item.param);
      inputs["b"] = b;
    } else if (prop == "L") {
      rep = count_L_set(item.n, item.param);
    } else if (prop == "K") {
      rep = count_K_set(item.n, item.param);
    } else if (prop == "T") {
      rep = count_T_set(item.n, item.param);
    } else if (prop == "kl") {
      KLInclusionReport kl = kl_inclusion_check(item.n, item.param);
      json doc = make_document("kl_inclusion", config_echo, {{"report", kl}});
      doc["seconds"] = kl.seconds;
      return doc;
    } else {
      throw CLI::ValidationError("unknown --prop: " + prop);
    }
    json doc = make_document("count_report", config_echo,
                             {{"inputs", inputs}, {"report", rep}});
    doc["seconds"] = rep.seconds;
    return doc;
  };

  std::vector<json> docs = run_items(items.size(), one);

  bool violated = false;
  std::string payload;
  if (format == "csv") {
    std::ostringstream os;
    os << csv_header(config_echo, "prop,n,parameter,count,bound,verdict,seconds");
    for (std::size_t i = 0; i < docs.size(); ++i) {
      const json& doc = docs[i];
      double seconds = doc.at("seconds").get<double>();
      if (doc.at("type") == "kl_inclusion") {
        KLInclusionReport kl = doc.at("report").get<KLInclusionReport>();
        os << "kl," << kl.n << "," << kl.delta.str() << "," << kl.card_L_intersection
           << "," << kl.card_K << "," << (kl.inclusion_holds ? "INCLUDED" : "VIOLATED")
           << "," << seconds << "\n";
        violated = violated || !kl.inclusion_holds;
        continue;
      }
      CountReport rep = doc.at("report").get<CountReport>();
      os << rep.prop << "," << rep.n << "," << rep.parameter.str() << "," << rep.count
         << "," << bound_str(rep.bound) << "," << to_string(rep.satisfied) << ","
         << seconds << "\n";
      violated = violated || rep.satisfied == Verdict::VIOLATED;
    }
    payload = os.str();
  } else {
    for (json& doc : docs) {
      doc.erase("seconds");  // timing never enters JSON output
      if (doc.at("type") == "count_report") {
        Verdict v = verdict_from_string(doc.at("report").at("verdict").get<std::string>());
        violated = violated || v == Verdict::VIOLATED;
      }
    }
    json run = make_document("census_run", config_echo, {{"items", docs}});
    payload = run.dump(2) + "\n";
  }
  write_output(out, payload);
  return strict && violated ? kExitFailedCheck : kExitOk;
}

int run_expander(const std::string& n_arg, const std::string& gens,
                 const std::string& input_path, const Rat& lambda, long long trials,
                 std::uint64_t seed, std::uint32_t exact_limit, bool sample,
                 std::uint32_t radius, int max_tries, const std::string& survey,
                 std::uint32_t survey_trials, const Rat& survey_threshold,
                 const std::string& out) {
  std::vector<std::uint32_t> degrees = parse_degrees(n_arg);
  if (degrees.empty()) return kExitOk;
  std::uint32_t n = degrees.front();
  std::string config_echo = "expander --n " + n_arg + " --lambda " + lambda.str() +
                            " --seed " + std::to_string(seed);
  if (survey == "expander") {
    // fraction of uniform c making (a_n, c) pass at lambda, one row per n
    std::ostringstream os;
    os << csv_header(config_echo + " --survey expander", "n,trials,passes,rate");
    for (std::uint32_t deg : degrees) {
      Rng root = Rng(seed).substream(deg);
      std::uint32_t passes = 0;
      for (std::uint32_t t = 0; t < survey_trials; ++t) {
        Rng rng = root.substream(t);
        GenTuple tup({cycle(deg), Perm(rng.random_images(deg))});
        ExpansionCertificate cert =
            check_expander(tup, lambda, trials, rng.next(), exact_limit);
        passes += cert.verdict != ExpVerdict::REFUTED;
      }
      os << deg << "," << survey_trials << "," << passes << ","
         << (double(passes) / survey_trials) << "\n";
    }
    write_output(out, os.str());
    return kExitOk;
  }
  if (survey == "freeness") {
    std::ostringstream os;
    os << csv_header(config_echo + " --survey freeness",
                     "n,radius,threshold,trials,below,rate");
    for (std::uint32_t deg : degrees) {
      Rng root = Rng(seed).substream(deg);
      std::uint32_t below = 0;
      for (std::uint32_t t = 0; t < survey_trials; ++t) {
        Rng rng = root.substream(t);
        GenTuple tup({cycle(deg), Perm(rng.random_images(deg))});
        below += freeness_defect(tup, radius) < survey_threshold;
      }
      os << deg << "," << radius << "," << survey_threshold.str() << ","
         << survey_trials << "," << below << "," << (double(below) / survey_trials)
         << "\n";
    }
    write_output(out, os.str());
    return kExitOk;
  }

  if (sample) {
    ExpanderSample s =
        sample_expander_pair(n, lambda, radius, max_tries, seed, exact_limit, trials);
    if (!s.found) {
      std::cerr << "sample_expander_pair: exhausted " << s.tries << " tries\n";
      return kExitBudget;
    }
    json doc = make_document("expansion_certificate", config_echo,
                             {{"tuple", s.tuple},
                              {"certificate", s.cert},
                              {"freeness", s.freeness},
                              {"tries", s.tries}});
    write_output(out, doc.dump(2) + "\n");
    return kExitOk;
  }

  GenTuple t({cycle(n)});
  if (gens == "file") {
    t = load_json(input_path).get<GenTuple>();
  } else if (gens == "random") {
    Rng rng(seed);
    t = GenTuple({cycle(n), Perm(rng.random_images(n))});
  }
  ExpansionCertificate cert = check_expander(t, lambda, trials, seed, exact_limit);
  json doc = make_document("expansion_certificate", config_echo,
                           {{"tuple", t}, {"certificate", cert}});
  write_output(out, doc.dump(2) + "\n");
  return kExitOk;
}

int run_deamplify(const std::string& x_path, const std::string& y_path,
                  const std::string& u_path, const Rat& lambda, bool certify,
                  bool verbose, const std::string& out) {
  GenTuple x = load_json(x_path).get<GenTuple>();
  GenTuple y = load_json(y_path).get<GenTuple>();
  Perm u = load_json(u_path).get<Perm>();
  std::optional<ExpansionCertificate> ycert;
  if (certify && y.degree() <= kExactExpanderLimit)
    ycert = check_expander_exact(y, lambda);
  DeamplifyResult res = deamplify(x, y, u, lambda, ycert);
  std::string config_echo = "deamplify --x " + x_path + " --y " + y_path + " --u " +
                            u_path + " --lambda " + lambda.str();
  json doc = make_document("deamplify_result", config_echo,
                           {{"x", x},
                            {"y", y},
                            {"u", u},
                            {"lambda", lambda},
                            {"result", res}});
  if (ycert) doc["y_certificate"] = *ycert;
  if (verbose) doc["blocks"] = block_matrices_json(res);
  write_output(out, doc.dump(2) + "\n");
  return kExitOk;
}

int run_convexity(const std::string& experiment_path, const std::string& out) {
  json exp = load_json(experiment_path);
  std::string config_echo = "convexity --experiment " + experiment_path;
  std::vector<json> results;

  GenTuple base;
  std::vector<Subset> blocks;
  if (exp.contains("weights")) {
    auto tuples = exp.at("tuples").get<std::vector<GenTuple>>();
    auto weights = exp.at("weights").get<std::vector<Rat>>();
    std::uint64_t scale = exp.value("scale", std::uint64_t{1});
    Combination comb = convex_combine(tuples, weights, scale);
    base = comb.tuple;
    blocks = comb.blocks;
    results.push_back(make_document("combination", config_echo,
                                    {{"tuples", tuples},
                                     {"weights", weights},
                                     {"scale", scale},
                                     {"result", comb}}));
  } else {
    auto tuples = exp.at("tuples").get<std::vector<GenTuple>>();
    if (tuples.size() != 1)
      throw CLI::ValidationError("convexity: provide weights or a single tuple");
    base = tuples[0];
  }

  if (exp.value("orbits", false)) {
    json orb = make_document("orbit_list", config_echo,
                             {{"tuple", base}, {"orbits", orbit_subsets(base)}});
    results.push_back(orb);
  }

  auto cut_spec_to_subset = [&](const json& spec) -> Subset {
    if (spec.is_string() && spec.get<std::string>().rfind("block:", 0) == 0) {
      std::size_t idx = std::stoul(spec.get<std::string>().substr(6));
      if (idx >= blocks.size()) throw CLI::ValidationError("convexity: no such block");
      return blocks[idx];
    }
    return Subset::of(base.degree(), spec.get<std::vector<std::uint32_t>>());
  };

  for (const json& spec : exp.value("cuts", json::array())) {
    Subset s = cut_spec_to_subset(spec);
    CutResult r = cut(base, s);
    results.push_back(make_document("cut_result", config_echo,
                                    {{"tuple", base}, {"subset", s}, {"result", r}}));
  }
  for (const json& spec : exp.value("verify_decomposition", json::array())) {
    Subset s = cut_spec_to_subset(spec);
    bool okay = verify_decomposition(base, s);
    results.push_back(json{{"type", "decomposition_check"},
                           {"tuple", base},
                           {"subset", s},
                           {"holds", okay}});
  }

  json doc = make_document("convexity_run", config_echo, {{"results", results}});
  write_output(out, doc.dump(2) + "\n");
  return kExitOk;
}

int run_strange(std::uint32_t n, const Rat& delta, std::uint64_t seed,
                std::uint32_t t_tries, long long k_trials, const std::string& out) {
  std::string config_echo = "strange --n " + std::to_string(n) + " --delta " +
                            delta.str() + " --seed " + std::to_string(seed);
  StrangeCandidate s;
  try {
    s = build_strange_candidate(n, delta, seed, t_tries, k_trials);
  } catch (const std::runtime_error& e) {
    std::cerr << e.what() << "\n";
    return kExitBudget;
  }
  json doc = make_document("strange_candidate", config_echo, {{"candidate", s}});
  write_output(out, doc.dump(2) + "\n");
  return kExitOk;
}

int run_family(std::uint32_t n, std::uint32_t k, const Rat& lambda, const Rat& sep,
               std::uint32_t radius, std::uint64_t seed, std::uint64_t budget,
               const std::string& out) {
  std::string config_echo = "family --n " + std::to_string(n) + " --k " +
                            std::to_string(k) + " --lambda " + lambda.str() + " --sep " +
                            sep.str() + " --seed " + std::to_string(seed);
  FarExpanderFamily fam = pick_far_expanders(n, k, lambda, sep, radius, seed, budget);
  json doc = make_document("far_expander_family", config_echo, {{"family", fam}});
  write_output(out, doc.dump(2) + "\n");
  if (!fam.complete) {
    std::cerr << "family: budget exhausted with " << fam.members.size() << " of " << k
              << " members\n";
    return kExitBudget;
  }
  return kExitOk;
}

int run_verify(const std::string& in_path, bool deep) {
  json doc = load_json(in_path);
  VerifyOutcome out = verify_document(doc, deep);
  for (const std::string& line : out.checks) std::cout << line << "\n";
  std::cout << (out.ok ? "VERIFIED" : "FAILED") << " " << in_path << "\n";
  return out.ok ? kExitOk : kExitFailedCheck;
}

template <class Fn>
double timed(Fn&& fn) {
  auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int run_bench(const std::string& out) {
  std::ostringstream os;
  os << csv_header("bench", "op,n,seconds");
  Rng rng(1);
  {
    Perm p(rng.random_images(1u << 20)), q(rng.random_images(1u << 20));
    os << "hamming," << (1u << 20) << "," << timed([&] { hamming(p, q); }) << "\n";
  }
  {
    Perm p(rng.random_images(10000));
    os << "coxeter_random,10000," << timed([&] { coxeter(p); }) << "\n";
    os << "coxeter_cycle,10000," << timed([&] { coxeter(cycle(10000)); }) << "\n";
    os << "coxeter_reversal,10000," << timed([&] { coxeter(reversal(10000)); }) << "\n";
  }
  {
    GenTuple t({cycle(18), Perm(rng.random_images(18))});
    os << "expander_exact,18," << timed([&] { check_expander_exact(t, Rat(1, 10)); })
       << "\n";
  }
  {
    GenTuple t({cycle(500), Perm(rng.random_images(500))});
    os << "freeness_radius3,500," << timed([&] { freeness_defect(t, 3); }) << "\n";
  }
  {
    GenTuple x({cycle(32), Perm(rng.random_images(32))});
    Perm v0(rng.random_images(32));
    GenTuple y = conjugate(v0, x);
    Perm u = tensor_id(v0, 4);
    os << "deamplify,128," << timed([&] { deamplify(x, y, u, Rat(1, 10)); }) << "\n";
  }
  write_output(out, os.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"soficlab: permutation expanders, censuses, cuts, and de-amplification"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string out, format = "csv", n_spec = "5", param_spec = "1/10",
              prop = "hamming-ball";
  std::string input_path, gens = "cycle", x_path, y_path, u_path, experiment_path;
  std::string survey;
  std::string lambda_str = "1/10", sep_str = "1/10", delta_str = "1/3";
  std::string survey_threshold_str = "1/10";
  bool strict = false, sample = false, certify = false, verbose = false, deep = false;
  std::string en_spec = "8";
  std::uint32_t n = 8, radius = 2, t_tries = 100, exact_limit = kExactExpanderLimit;
  std::uint32_t k = 2, survey_trials = 50;
  long long trials = 64, k_trials = 10000;
  std::uint64_t seed = 0, budget = 1000;
  int max_tries = 50;

  CLI::App* census = app.add_subcommand("census", "exhaustive counting propositions");
  census->add_option("--prop", prop,
                     "hamming-ball|cycle-commutant|near-commutant|s-ball|L|K|T|kl");
  census->add_option("--n", n_spec, "degree, range lo..hi, or comma list");
  census->add_option("--eps,--delta,--lambda,--param", param_spec,
                     "parameter(s), exact rationals like 3/10 or 0.3");
  census->add_option("--input", input_path, "JSON file with x/b inputs");
  census->add_option("--format", format, "csv|json");
  census->add_option("--out", out, "output path (atomic write)");
  census->add_flag("--strict", strict, "exit nonzero on any VIOLATED verdict");

  CLI::App* expander = app.add_subcommand("expander", "lambda-expander certification");
  expander->add_option("--n", en_spec, "degree, range lo..hi, or comma list");
  expander->add_option("--gens", gens, "cycle|random|file");
  expander->add_option("--input", input_path, "tuple JSON (with --gens file)");
  expander->add_option("--lambda", lambda_str, "expansion threshold, exact rational");
  expander->add_option("--trials", trials, "sampled-refuter trials");
  expander->add_option("--seed", seed, "RNG seed");
  expander->add_option("--exact-limit", exact_limit, "max degree for exact enumeration");
  expander->add_flag("--sample", sample, "sample a random pair (a_n, c) instead");
  expander->add_option("--radius", radius, "freeness word-ball radius");
  expander->add_option("--max-tries", max_tries, "sampling attempts");
  expander->add_option("--survey", survey, "expander|freeness: CSV rate table");
  expander->add_option("--survey-trials", survey_trials, "trials per survey row");
  expander->add_option("--survey-threshold", survey_threshold_str,
                       "freeness threshold for the survey");
  expander->add_option("--out", out, "output path");

  CLI::App* deamp =
      app.add_subcommand("deamplify", "extract v from an amplified intertwiner");
  deamp->add_option("--x", x_path, "tuple JSON")->required();
  deamp->add_option("--y", y_path, "tuple JSON")->required();
  deamp->add_option("--u", u_path, "permutation JSON")->required();
  deamp->add_option("--lambda", lambda_str, "expander threshold");
  deamp->add_flag("--certify", certify, "attach an exact expander certificate for y");
  deamp->add_flag("--verbose", verbose, "include the full block-defect matrices");
  deamp->add_option("--out", out, "output path");

  CLI::App* convexity = app.add_subcommand("convexity", "combine/cut/verify pipelines");
  convexity->add_option("--experiment", experiment_path, "experiment JSON")->required();
  convexity->add_option("--out", out, "output path");

  CLI::App* strange = app.add_subcommand("strange", "K-and-T candidate builder");
  strange->add_option("--n", n, "degree");
  strange->add_option("--delta", delta_str, "delta, exact rational");
  strange->add_option("--seed", seed, "RNG seed");
  strange->add_option("--t-tries", t_tries, "T-candidate attempts");
  strange->add_option("--k-trials", k_trials, "K-refutation samples");
  strange->add_option("--out", out, "output path");

  CLI::App* family = app.add_subcommand("family", "pairwise-far expander family");
  family->add_option("--n", n, "degree");
  family->add_option("--k", k, "family size");
  family->add_option("--lambda", lambda_str, "expansion threshold");
  family->add_option("--sep", sep_str, "pairwise separation threshold");
  family->add_option("--radius", radius, "freeness word-ball radius");
  family->add_option("--seed", seed, "RNG seed");
  family->add_option("--budget", budget, "candidate budget");
  family->add_option("--out", out, "output path");

  CLI::App* verify = app.add_subcommand("verify", "re-validate an emitted document");
  verify->add_option("--in", input_path, "document to check")->required();
  verify->add_flag("--deep", deep, "replay samplers and redo full enumerations");

  CLI::App* bench = app.add_subcommand("bench", "micro-benchmark timings");
  bench->add_option("--out", out, "output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (census->parsed())
      return run_census(prop, n_spec, param_spec, input_path, format, out, strict);
    if (expander->parsed())
      return run_expander(en_spec, gens, input_path, Rat::parse(lambda_str), trials,
                          seed, exact_limit, sample, radius, max_tries, survey,
                          survey_trials, Rat::parse(survey_threshold_str), out);
    if (deamp->parsed())
      return run_deamplify(x_path, y_path, u_path, Rat::parse(lambda_str), certify,
                           verbose, out);
    if (convexity->parsed()) return run_convexity(experiment_path, out);
    if (strange->parsed())
      return run_strange(n, Rat::parse(delta_str), seed, t_tries, k_trials, out);
    if (family->parsed())
      return run_family(n, k, Rat::parse(lambda_str), Rat::parse(sep_str), radius, seed,
                        budget, out);
    if (verify->parsed()) return run_verify(input_path, deep);
    if (bench->parsed()) return run_bench(out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitBadConfig;
  } catch (const std::length_error& e) {
    std::cerr << e.what() << "\n";
    return kExitBudget;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitBadConfig;
  }
  return kExitOk;
}
