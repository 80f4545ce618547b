#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "msrforge/transform.hpp"

namespace msrforge {

/// Exact accounting for one node repair. With d = k+r-1 helpers and node
/// capacity rN the optimal bandwidth is d * (rN/r) = (k+r-1) * N symbols.
struct repair_trace {
  int failed_node = -1;
  int per_helper_nominal = 0;  // N
  std::vector<int> helpers;
  std::vector<long long> downloaded;
  std::vector<long long> accessed;
  long long total_downloaded = 0;
  long long optimal_bandwidth = 0;
  bool optimal = false;
  bool access_optimal = false;

  std::string to_line() const {
    std::ostringstream os;
    os << "repair node=" << failed_node << " helpers=" << helpers.size()
       << " per_helper=" << per_helper_nominal << " total=" << total_downloaded
       << " optimal=" << (optimal ? "true" : "false")
       << " access_optimal=" << (access_optimal ? "true" : "false");
    return os.str();
  }
};

namespace detail {

inline repair_trace finalize_trace(const msr_code& m, int failed,
                                   std::vector<int> helpers,
                                   std::vector<long long> downloaded,
                                   std::vector<long long> accessed) {
  repair_trace t;
  t.failed_node = failed;
  t.per_helper_nominal = m.n();
  t.helpers = std::move(helpers);
  t.downloaded = std::move(downloaded);
  t.accessed = std::move(accessed);
  t.total_downloaded = 0;
  t.optimal = true;
  t.access_optimal = true;
  for (std::size_t h = 0; h < t.helpers.size(); ++h) {
    t.total_downloaded += t.downloaded[h];
    if (t.downloaded[h] != m.n()) t.optimal = false;
    if (t.accessed[h] != m.n()) t.access_optimal = false;
  }
  t.optimal_bandwidth = static_cast<long long>(m.nodes() - 1) * m.n();
  return t;
}

}  // namespace detail

/// Downloads feeding a systematic repair: pieces[node][l] is what helper
/// `node` sends for instance l (its stored instance-l slice multiplied by the
/// appropriate repair row).
struct systematic_downloads {
  std::vector<std::vector<gf_vec>> pieces;
};

inline systematic_downloads collect_systematic_downloads(const msr_code& m, int i,
                                                         const msr_codeword& cw) {
  if (!m.systematic_repair_available())
    fail(errc::missing_repair_matrices, "base code exposes no systematic repair");
  if (i < 0 || i >= m.k()) fail(errc::index_out_of_range, "systematic node index");
  const int k = m.k(), r = m.r();
  systematic_downloads d;
  d.pieces.assign(m.nodes(), {});
  for (int node = 0; node < m.nodes(); ++node) {
    if (node == i) continue;
    d.pieces[node].resize(r);
    for (int l = 0; l < r; ++l) {
      if (node < k) {
        d.pieces[node][l] = m.base.repair_matrix(i, node) * cw.systematic[node][l];
      } else {
        const int j = node - k;
        // helper applies the row addressed by the instance-l shuffle
        const matrix& s = m.uniform_repair
                              ? m.base.repair_matrix(i, node)
                              : m.base.repair_matrix(i, k + m.perms.at(l, j));
        d.pieces[node][l] = s * cw.parity[j][l];
      }
    }
  }
  return d;
}

/// Rebuild the r instance slices of systematic node i from the downloads:
/// resolve each pairing with its 2x2 theta system, undo the shuffle, then run
/// the base repair per instance.
inline std::vector<gf_vec> repair_systematic_from(const msr_code& m, int i,
                                                  const systematic_downloads& d) {
  if (!m.systematic_repair_available())
    fail(errc::missing_repair_matrices, "base code exposes no systematic repair");
  if (m.base.repair == repair_kind::per_helper && !m.perms.symmetric)
    fail(errc::contract_breach, "per-helper repair needs symmetric permutations");
  const int k = m.k(), r = m.r();
  const field& f = m.fld();

  // sh[s][l] = (repair row) * h_s^(l)
  std::vector<std::vector<gf_vec>> sh(r, std::vector<gf_vec>(r));
  for (int l = 0; l < r; ++l) sh[l][l] = d.pieces[k + l][l];
  for (int l = 0; l < r; ++l)
    for (int j = l + 1; j < r; ++j) {
      const elem a_jl = m.theta.at(j, l), a_lj = m.theta.at(l, j);
      const elem det = f.sub(f.mul(a_jl, a_lj), 1);
      if (det == 0) fail(errc::theta_singular, "pairing system is singular");
      const elem det_inv = f.inv(det);
      const gf_vec& d1 = d.pieces[k + j][l];  // a_jl*S h_j^(l) + S h_l^(j)
      const gf_vec& d2 = d.pieces[k + l][j];  // a_lj*S h_l^(j) + S h_j^(l)
      const gf_vec x = vec_scale(f, det_inv, vec_sub(f, vec_scale(f, a_lj, d1), d2));
      const gf_vec y = vec_scale(f, det_inv, vec_sub(f, vec_scale(f, a_jl, d2), d1));
      sh[j][l] = x;
      sh[l][j] = y;
    }

  std::vector<gf_vec> out(r);
  for (int l = 0; l < r; ++l) {
    base_repair_downloads bd;
    bd.from_node.resize(m.nodes());
    for (int j = 0; j < k; ++j) {
      if (j == i) continue;
      bd.from_node[j] = d.pieces[j][l];
    }
    for (int parity = 0; parity < r; ++parity)
      bd.from_node[k + parity] = sh[m.perms.inv_at(l, parity)][l];
    out[l] = base_repair_systematic(m.base, i, bd);
  }
  return out;
}

inline std::pair<std::vector<gf_vec>, repair_trace> repair_systematic(
    const msr_code& m, int i, const msr_codeword& cw) {
  const auto d = collect_systematic_downloads(m, i, cw);
  auto restored = repair_systematic_from(m, i, d);

  std::vector<int> helpers;
  std::vector<long long> downloaded, accessed;
  const int k = m.k(), r = m.r();
  for (int node = 0; node < m.nodes(); ++node) {
    if (node == i) continue;
    helpers.push_back(node);
    long long dl = 0;
    for (const auto& piece : d.pieces[node]) dl += static_cast<long long>(piece.size());
    downloaded.push_back(dl);
    long long acc = 0;
    for (int l = 0; l < r; ++l) {
      const matrix& s = (node < k || m.uniform_repair)
                            ? m.base.repair_matrix(i, node)
                            : m.base.repair_matrix(i, k + m.perms.at(l, node - k));
      acc += nonzero_columns(s);
    }
    accessed.push_back(acc);
  }
  return {std::move(restored),
          detail::finalize_trace(m, i, std::move(helpers), std::move(downloaded),
                                 std::move(accessed))};
}

/// Downloads feeding a parity repair of node k+j: every helper contributes
/// exactly its instance-j slice.
struct parity_downloads {
  std::vector<gf_vec> instance_block;
};

inline parity_downloads collect_parity_downloads(const msr_code& m, int j,
                                                 const msr_codeword& cw) {
  if (j < 0 || j >= m.r()) fail(errc::index_out_of_range, "parity node index");
  parity_downloads d;
  d.instance_block.resize(m.nodes());
  for (int node = 0; node < m.nodes(); ++node) {
    if (node == m.k() + j) continue;
    d.instance_block[node] = node < m.k() ? cw.systematic[node][j]
                                          : cw.parity[node - m.k()][j];
  }
  return d;
}

/// Rebuild parity node k+j: re-encode instance j from the systematic slices,
/// undo the shuffle, peel the pairings, and reassemble every stored slice.
inline std::vector<gf_vec> repair_parity_from(const msr_code& m, int j,
                                              const parity_downloads& d) {
  if (j < 0 || j >= m.r()) fail(errc::index_out_of_range, "parity node index");
  const int k = m.k(), r = m.r();
  const field& f = m.fld();
  std::vector<gf_vec> f_sys;
  f_sys.reserve(k);
  for (int i = 0; i < k; ++i) {
    if (int(d.instance_block[i].size()) != m.n())
      fail(errc::dimension_mismatch, "systematic download length");
    f_sys.push_back(d.instance_block[i]);
  }
  const auto g = base_encode(m.base, f_sys);
  std::vector<gf_vec> h_in_j(r);  // h_s^(j)
  for (int s = 0; s < r; ++s) h_in_j[s] = g[m.perms.at(j, s)];

  std::vector<gf_vec> out(r);
  out[j] = h_in_j[j];
  for (int l = 0; l < r; ++l) {
    if (l == j) continue;
    const gf_vec& mixed = d.instance_block[k + l];  // theta_{l,j} h_l^(j) + h_j^(l)
    if (int(mixed.size()) != m.n())
      fail(errc::dimension_mismatch, "parity download length");
    const gf_vec h_j_l =
        vec_sub(f, mixed, vec_scale(f, m.theta.at(l, j), h_in_j[l]));
    out[l] = vec_add(f, vec_scale(f, m.theta.at(j, l), h_j_l), h_in_j[l]);
  }
  return out;
}

inline std::pair<std::vector<gf_vec>, repair_trace> repair_parity(const msr_code& m,
                                                                  int j,
                                                                  const msr_codeword& cw) {
  const auto d = collect_parity_downloads(m, j, cw);
  auto restored = repair_parity_from(m, j, d);
  std::vector<int> helpers;
  std::vector<long long> downloaded, accessed;
  for (int node = 0; node < m.nodes(); ++node) {
    if (node == m.k() + j) continue;
    helpers.push_back(node);
    downloaded.push_back(static_cast<long long>(d.instance_block[node].size()));
    // the instance selector touches exactly N stored symbols
    accessed.push_back(m.n());
  }
  return {std::move(restored),
          detail::finalize_trace(m, m.k() + j, std::move(helpers), std::move(downloaded),
                                 std::move(accessed))};
}

/// Repair any single node, dispatching on its role.
inline std::pair<std::vector<gf_vec>, repair_trace> repair_node(const msr_code& m, int id,
                                                                const msr_codeword& cw) {
  if (id < 0 || id >= m.nodes()) fail(errc::index_out_of_range, "node id");
  return id < m.k() ? repair_systematic(m, id, cw) : repair_parity(m, id - m.k(), cw);
}

}  // namespace msrforge
