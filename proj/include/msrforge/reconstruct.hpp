#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "msrforge/transform.hpp"

namespace msrforge {

/// Which systematic nodes are missing (I) and which parity nodes are
/// connected (J); |I| = |J| = t with 1 <= t <= min(r,k) unless t = 0
/// (all-systematic read).
struct reconstruction_plan {
  std::vector<int> missing_systematic;
  std::vector<int> connected_parity;
  int t = 0;
};

namespace detail {

inline int count_engaged(const std::vector<std::optional<gf_vec>>& nodes) {
  int engaged = 0;
  for (const auto& v : nodes)
    if (v) ++engaged;
  return engaged;
}

}  // namespace detail

inline reconstruction_plan plan_reconstruction(const msr_code& m,
                                               const std::vector<std::optional<gf_vec>>& nodes) {
  if (int(nodes.size()) != m.nodes())
    fail(errc::wrong_count, "expected a k+r slot vector");
  if (detail::count_engaged(nodes) != m.k())
    fail(errc::wrong_count, "exactly k nodes must be provided");
  reconstruction_plan plan;
  for (int i = 0; i < m.k(); ++i)
    if (!nodes[i]) plan.missing_systematic.push_back(i);
  for (int j = 0; j < m.r(); ++j)
    if (nodes[m.k() + j]) plan.connected_parity.push_back(j);
  plan.t = int(plan.connected_parity.size());
  if (int(plan.missing_systematic.size()) != plan.t)
    fail(errc::wrong_count, "node subset does not have size k");
  return plan;
}

/// Constructive reconstruction from any k nodes. Phase 1 peels the pairings
/// among connected parity nodes, phase 2 decodes each instance owned by a
/// connected parity, phase 3 strips the now-computable halves from the mixed
/// slices and decodes the remaining instances.
inline std::vector<std::vector<gf_vec>> reconstruct(
    const msr_code& m, const std::vector<std::optional<gf_vec>>& nodes) {
  const auto plan = plan_reconstruction(m, nodes);
  const int k = m.k(), r = m.r(), n = m.n();
  const field& f = m.fld();
  for (int id = 0; id < m.nodes(); ++id)
    if (nodes[id] && int(nodes[id]->size()) != m.node_capacity())
      fail(errc::dimension_mismatch, "node content length");

  std::vector<std::vector<gf_vec>> out(k, std::vector<gf_vec>(r));
  for (int i = 0; i < k; ++i)
    if (nodes[i])
      for (int l = 0; l < r; ++l) out[i][l] = vec_slice(*nodes[i], l * n, n);
  if (plan.t == 0) return out;

  const auto& J = plan.connected_parity;
  std::vector<char> in_j(r, 0);
  for (int j : J) in_j[j] = 1;
  auto parity_slice = [&](int j, int l) { return vec_slice(*nodes[k + j], l * n, n); };

  // h[s][l] = h_s^(l); filled as it becomes known
  std::vector<std::vector<std::optional<gf_vec>>> h(r, std::vector<std::optional<gf_vec>>(r));

  // phase 1: pairings among connected parities (t = 1 needs no solving)
  for (int ja : J) h[ja][ja] = parity_slice(ja, ja);
  for (std::size_t x = 0; x < J.size(); ++x)
    for (std::size_t y = x + 1; y < J.size(); ++y) {
      const int ja = J[x], jb = J[y];
      const elem a1 = m.theta.at(ja, jb), a2 = m.theta.at(jb, ja);
      const elem det = f.sub(f.mul(a1, a2), 1);
      if (det == 0) fail(errc::contract_breach, "pairing system is singular");
      const elem det_inv = f.inv(det);
      const gf_vec d1 = parity_slice(ja, jb);  // a1*h_ja^(jb) + h_jb^(ja)
      const gf_vec d2 = parity_slice(jb, ja);  // a2*h_jb^(ja) + h_ja^(jb)
      h[ja][jb] = vec_scale(f, det_inv, vec_sub(f, vec_scale(f, a2, d1), d2));
      h[jb][ja] = vec_scale(f, det_inv, vec_sub(f, vec_scale(f, a1, d2), d1));
    }

  // phase 2: decode every instance owned by a connected parity, then refill
  // all of that instance's shuffled parity data
  std::vector<std::vector<gf_vec>> g(r);  // g[s] = base parities of instance s
  for (int s : J) {
    std::vector<std::optional<gf_vec>> base_nodes(k + r);
    for (int i = 0; i < k; ++i)
      if (nodes[i]) base_nodes[i] = out[i][s];
    for (int u : J) base_nodes[k + m.perms.at(s, u)] = *h[u][s];
    std::vector<gf_vec> decoded;
    try {
      decoded = base_decode(m.base, base_nodes);
    } catch (const error& e) {
      fail(errc::contract_breach, std::string("instance decode failed: ") + e.what());
    }
    for (int i : plan.missing_systematic) out[i][s] = decoded[i];
    g[s] = base_encode(m.base, decoded);
    for (int u = 0; u < r; ++u) h[u][s] = g[s][m.perms.at(s, u)];
  }

  // phase 3: remaining instances
  for (int l = 0; l < r; ++l) {
    if (in_j[l]) continue;
    std::vector<std::optional<gf_vec>> base_nodes(k + r);
    for (int i = 0; i < k; ++i)
      if (nodes[i]) base_nodes[i] = out[i][l];
    for (int s : J) {
      // node k+s, instance l holds theta_{s,l} h_s^(l) + h_l^(s)
      const gf_vec mixed = parity_slice(s, l);
      const gf_vec h_s_l = vec_scale(f, f.inv(m.theta.at(s, l)),
                                     vec_sub(f, mixed, *h[l][s]));
      base_nodes[k + m.perms.at(l, s)] = h_s_l;
    }
    std::vector<gf_vec> decoded;
    try {
      decoded = base_decode(m.base, base_nodes);
    } catch (const error& e) {
      fail(errc::contract_breach, std::string("instance decode failed: ") + e.what());
    }
    for (int i : plan.missing_systematic) out[i][l] = decoded[i];
  }
  return out;
}

/// Independent check: stack the selected rows of the block generator into one
/// linear system over all k*r*N source symbols and solve it directly.
inline std::vector<std::vector<gf_vec>> oracle_reconstruct(
    const msr_code& m, const std::vector<std::optional<gf_vec>>& nodes) {
  plan_reconstruction(m, nodes);  // validates the selection
  const int k = m.k(), r = m.r(), n = m.n();
  const int cap = m.node_capacity();
  const field& f = m.fld();
  const auto& blocks = m.coding_blocks();

  std::vector<matrix> rows;
  gf_vec rhs;
  for (int id = 0; id < m.nodes(); ++id) {
    if (!nodes[id]) continue;
    if (int(nodes[id]->size()) != cap)
      fail(errc::dimension_mismatch, "node content length");
    std::vector<matrix> row;
    for (int j = 0; j < k; ++j) {
      if (id < k)
        row.push_back(j == id ? matrix::identity(f, cap) : matrix(f, cap, cap));
      else
        row.push_back(blocks[id - k][j]);
    }
    rows.push_back(hstack(row));
    vec_append(rhs, *nodes[id]);
  }
  gf_vec x;
  try {
    x = solve(vstack(rows), rhs);
  } catch (const error&) {
    fail(errc::singular_system, "selected nodes gave a singular system");
  }
  std::vector<std::vector<gf_vec>> out(k, std::vector<gf_vec>(r));
  for (int i = 0; i < k; ++i)
    for (int l = 0; l < r; ++l) out[i][l] = vec_slice(x, i * cap + l * n, n);
  return out;
}

}  // namespace msrforge
