#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sofic/expansion.hpp"
#include "sofic/perm.hpp"
#include "sofic/rational.hpp"

namespace sofic {

/// max_t d_H(u (x_t (x) 1_r), (y_t (x) 1_r) u): how far u is from
/// intertwining the amplified tuples.
inline Rat intertwiner_defect(const GenTuple& x, const GenTuple& y, const Perm& u) {
  if (x.degree() != y.degree() || x.arity() != y.arity())
    throw std::invalid_argument("intertwiner_defect: tuples differ in degree or length");
  std::uint32_t n = x.degree();
  if (u.degree() % n != 0)
    throw std::invalid_argument("intertwiner_defect: u degree is not a multiple of n");
  std::uint32_t r = u.degree() / n;
  std::uint32_t worst = 0;
  for (std::uint32_t t = 0; t < x.arity(); ++t) {
    std::uint32_t c = hamming_count(compose(u, tensor_id(x.gen(t), r)),
                                    compose(tensor_id(y.gen(t), r), u));
    worst = std::max(worst, c);
  }
  return Rat(worst, u.degree());
}

enum class Guarantee { CERTIFIED, NO_GUARANTEE };

inline const char* to_string(Guarantee g) {
  return g == Guarantee::CERTIFIED ? "CERTIFIED" : "NO_GUARANTEE";
}

/// Output of the de-amplification: the extracted v with the measured input
/// defect, the selected block, and the achieved intertwining error against
/// the certified bound 20 k^2 eps / lambda. CERTIFIED only when the target
/// tuple holds an exact expander certificate at lambda, the selected block
/// has trace >= 1/2, the proof's block-sum inequalities checked out, and
/// the achieved error sits within the bound.
struct DeamplifyResult {
  Perm v;
  Rat eps;
  Rat lambda;
  std::uint32_t k = 0;
  std::uint32_t r = 0;
  std::uint32_t chosen_row = 0;
  std::uint32_t chosen_col = 0;
  Rat tr_pj;
  Rat achieved;
  Rat certified_bound;
  Guarantee guarantee = Guarantee::NO_GUARANTEE;
  bool block_sums_ok = false;
  // eps_blocks[t][i][j] = d_H-rows(u(i,j) x_t, y_t u(i,j));
  // delta_blocks[t][j][i] = d_H-rows(x_t u*(j,i), u*(j,i) y_t).
  std::vector<std::vector<std::vector<Rat>>> eps_blocks;
  std::vector<std::vector<std::vector<Rat>>> delta_blocks;
};

/// Extracts v in P_n from an approximate intertwiner u in P_{nr}:
/// measures the block defect matrices, picks the row i whose worst block
/// sum is smallest, picks the column j of largest trace, and completes
/// that piece of permutation to v.
inline DeamplifyResult deamplify(const GenTuple& x, const GenTuple& y, const Perm& u,
                                 const Rat& lambda,
                                 const std::optional<ExpansionCertificate>& y_cert = std::nullopt) {
  if (x.degree() != y.degree() || x.arity() != y.arity())
    throw std::invalid_argument("deamplify: tuples differ in degree or length");
  if (!(lambda > Rat(0))) throw std::invalid_argument("deamplify: lambda must be positive");
  std::uint32_t n = x.degree();
  if (u.degree() % n != 0)
    throw std::invalid_argument("deamplify: u degree is not a multiple of n");
  std::uint32_t r = u.degree() / n;
  std::uint32_t k = x.arity();

  DeamplifyResult out;
  out.lambda = lambda;
  out.k = k;
  out.r = r;
  out.eps = intertwiner_defect(x, y, u);
  out.certified_bound = Rat(20) * Rat(static_cast<long long>(k) * k) * out.eps / lambda;

  std::vector<std::vector<PartialPerm>> blk(r, std::vector<PartialPerm>(r));
  std::vector<std::vector<PartialPerm>> adj(r, std::vector<PartialPerm>(r));
  for (std::uint32_t i = 0; i < r; ++i)
    for (std::uint32_t j = 0; j < r; ++j) {
      blk[i][j] = block(u, i, j, n, r);
      adj[i][j] = adjoint(blk[i][j]);
    }

  // eps_counts[t][i][j], delta_counts[t][j][i] as raw row counts over n.
  std::vector<std::vector<std::vector<std::uint32_t>>> ec(
      k, std::vector<std::vector<std::uint32_t>>(r, std::vector<std::uint32_t>(r)));
  std::vector<std::vector<std::vector<std::uint32_t>>> dc = ec;
  out.eps_blocks.assign(k, std::vector<std::vector<Rat>>(r, std::vector<Rat>(r)));
  out.delta_blocks = out.eps_blocks;
  for (std::uint32_t t = 0; t < k; ++t) {
    const Perm& xt = x.gen(t);
    const Perm& yt = y.gen(t);
    for (std::uint32_t i = 0; i < r; ++i)
      for (std::uint32_t j = 0; j < r; ++j) {
        ec[t][i][j] = hamming_rows_count(compose(blk[i][j], xt), compose(yt, blk[i][j]));
        // delta^t_{j,i} uses u*(j,i) = adjoint of the (i,j) block
        dc[t][j][i] = hamming_rows_count(compose(xt, adj[i][j]), compose(adj[i][j], yt));
        out.eps_blocks[t][i][j] = Rat(ec[t][i][j], n);
        out.delta_blocks[t][j][i] = Rat(dc[t][j][i], n);
      }
  }

  // Row selection: argmin over i of max_t max(sum_j eps[t][i][j], sum_j delta[t][j][i]).
  std::uint64_t best_worst = UINT64_MAX;
  std::uint32_t best_i = 0;
  for (std::uint32_t i = 0; i < r; ++i) {
    std::uint64_t worst = 0;
    for (std::uint32_t t = 0; t < k; ++t) {
      std::uint64_t se = 0, sd = 0;
      for (std::uint32_t j = 0; j < r; ++j) {
        se += ec[t][i][j];
        sd += dc[t][j][i];
      }
      worst = std::max({worst, se, sd});
    }
    if (worst < best_worst) {
      best_worst = worst;
      best_i = i;
    }
  }
  out.chosen_row = best_i;

  // The proof's averaging argument: both block sums at the chosen row stay
  // within 4k*eps for every t. A violation downgrades to NO_GUARANTEE.
  Rat four_k_eps = Rat(4) * Rat(k) * out.eps;
  out.block_sums_ok = true;
  for (std::uint32_t t = 0; t < k && out.block_sums_ok; ++t) {
    std::uint64_t se = 0, sd = 0;
    for (std::uint32_t j = 0; j < r; ++j) {
      se += ec[t][best_i][j];
      sd += dc[t][j][best_i];
    }
    if (Rat(static_cast<long long>(se), n) > four_k_eps ||
        Rat(static_cast<long long>(sd), n) > four_k_eps)
      out.block_sums_ok = false;
  }

  // Column selection: largest trace of p_j = range projection of u(i,j).
  std::uint32_t best_j = 0, best_defined = 0;
  for (std::uint32_t j = 0; j < r; ++j) {
    std::uint32_t d = blk[best_i][j].defined_count();
    if (d > best_defined) {
      best_defined = d;
      best_j = j;
    }
  }
  out.chosen_col = best_j;
  out.tr_pj = Rat(best_defined, n);

  out.v = complete(blk[best_i][best_j]);
  std::uint32_t worst = 0;
  for (std::uint32_t t = 0; t < k; ++t)
    worst = std::max(worst, hamming_count(compose(out.v, x.gen(t)), compose(y.gen(t), out.v)));
  out.achieved = Rat(worst, n);

  bool cert_ok = y_cert.has_value() && y_cert->verdict == ExpVerdict::EXACT_PASS &&
                 y_cert->lambda >= lambda;
  if (cert_ok && out.tr_pj >= Rat(1, 2) && out.block_sums_ok &&
      out.achieved <= out.certified_bound)
    out.guarantee = Guarantee::CERTIFIED;
  return out;
}

}  // namespace sofic
