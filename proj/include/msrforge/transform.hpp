#pragma once

#include <cstdint>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "msrforge/base_code.hpp"

namespace msrforge {

/// r permutations of [0,r); p[l][j] is the base-parity slot whose data lands
/// in row j of instance l after the shuffle step. `symmetric` caches whether
/// p_i(j) = p_j(i) for all pairs, the precondition for per-helper repair.
struct perm_family {
  std::vector<std::vector<int>> p;
  std::vector<std::vector<int>> pinv;
  bool symmetric = false;

  int r() const { return int(p.size()); }
  int at(int l, int j) const { return p[l][j]; }
  int inv_at(int l, int m) const { return pinv[l][m]; }

  static perm_family cyclic(int r) {
    std::vector<std::vector<int>> rows(r, std::vector<int>(r));
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) rows[i][j] = (i + j) % r;
    return from_rows(std::move(rows));
  }

  static perm_family from_rows(std::vector<std::vector<int>> rows) {
    const int r = int(rows.size());
    if (r < 2) fail(errc::dimension_mismatch, "need at least two permutations");
    perm_family fam;
    fam.pinv.assign(r, std::vector<int>(r, -1));
    for (int l = 0; l < r; ++l) {
      if (int(rows[l].size()) != r)
        fail(errc::dimension_mismatch, "permutation row length");
      std::vector<char> seen(r, 0);
      for (int j = 0; j < r; ++j) {
        const int v = rows[l][j];
        if (v < 0 || v >= r || seen[v])
          fail(errc::not_a_bijection, "row " + std::to_string(l) +
                                          " is not a permutation of [0,r)");
        seen[v] = 1;
        fam.pinv[l][v] = j;
      }
    }
    fam.p = std::move(rows);
    fam.symmetric = true;
    for (int i = 0; i < r && fam.symmetric; ++i)
      for (int j = 0; j < r; ++j)
        if (fam.p[i][j] != fam.p[j][i]) {
          fam.symmetric = false;
          break;
        }
    return fam;
  }
};

/// Which of each off-diagonal pair carries the coefficient a (the other
/// carries 1). Kept field-free so symbolic layouts can be produced without a
/// concrete code.
struct theta_orientation {
  std::vector<std::vector<char>> a_at;  // a_at[j][l]

  int r() const { return int(a_at.size()); }
  bool is_a(int j, int l) const { return a_at[j][l] != 0; }

  static theta_orientation make_default(int r) {
    theta_orientation o;
    o.a_at.assign(r, std::vector<char>(r, 0));
    for (int j = 0; j < r; ++j)
      for (int l = j + 1; l < r; ++l) o.a_at[j][l] = 1;
    return o;
  }
};

/// Pairing coefficients: for j != l, {t[j][l], t[l][j]} = {1, a} with
/// a outside {0,1}, so every 2x2 pairing system has determinant a - 1 != 0.
struct theta_table {
  field fld;
  elem a = 0;
  std::vector<std::vector<elem>> t;  // diagonal entries unused (zero)

  int r() const { return int(t.size()); }

  elem at(int j, int l) const {
    if (j == l) fail(errc::index_out_of_range, "theta diagonal is unused");
    return t[j][l];
  }

  bool is_a(int j, int l) const { return at(j, l) == a; }

  theta_orientation orientation() const {
    theta_orientation o;
    o.a_at.assign(r(), std::vector<char>(r(), 0));
    for (int j = 0; j < r(); ++j)
      for (int l = 0; l < r(); ++l)
        if (j != l && t[j][l] == a) o.a_at[j][l] = 1;
    return o;
  }

  static theta_table make_default(const field& f, elem a, int r) {
    return make_oriented(f, a, theta_orientation::make_default(r));
  }

  static theta_table make_oriented(const field& f, elem a, const theta_orientation& o) {
    f.require(a);
    if (a == 0 || a == 1)
      fail(errc::invalid_a, "pairing coefficient a must lie outside {0,1}");
    theta_table tt{f, a, {}};
    const int r = o.r();
    if (r < 2) fail(errc::dimension_mismatch, "theta table needs r >= 2");
    tt.t.assign(r, std::vector<elem>(r, 0));
    for (int j = 0; j < r; ++j)
      for (int l = 0; l < r; ++l) {
        if (j == l) continue;
        if (o.is_a(j, l) == o.is_a(l, j))
          fail(errc::invalid_a, "each pair must carry exactly one a");
        tt.t[j][l] = o.is_a(j, l) ? a : elem(1);
      }
    return tt;
  }
};

/// The transformed code: r space-shared instances of the base code with
/// permuted, pairwise-coupled parity data. Node capacity is r*N.
struct msr_code {
  base_code base;
  perm_family perms;
  theta_table theta;
  bool uniform_repair = false;

  int k() const { return base.k(); }
  int r() const { return base.r(); }
  int n() const { return base.n(); }
  const field& fld() const { return base.fld(); }
  int node_capacity() const { return r() * n(); }
  int nodes() const { return k() + r(); }
  bool systematic_repair_available() const { return base.has_repair(); }

  /// Block coding matrices of the transformed code, built lazily and cached.
  const std::vector<std::vector<matrix>>& coding_blocks() const;

 private:
  mutable std::shared_ptr<const std::vector<std::vector<matrix>>> blocks_cache_;
  friend std::vector<std::vector<matrix>> build_coding_blocks(const msr_code&);
  friend const std::vector<std::vector<matrix>>& cached_blocks(const msr_code&);
};

inline msr_code transform(const base_code& base, const perm_family& perms,
                          const theta_table& theta) {
  validate_base(base);
  if (base.fld().q() < 3)
    fail(errc::binary_field, "the transformation needs q >= 3");
  if (perms.r() != base.r() || theta.r() != base.r())
    fail(errc::dimension_mismatch, "permutations/theta must have size r");
  if (theta.fld != base.fld()) fail(errc::field_mismatch, "theta field mismatch");
  if (!verify_mds(base).ok())
    fail(errc::unverified_base, "base code failed the MDS sweep");
  if (base.has_repair()) {
    if (!verify_repair(base).ok())
      fail(errc::unverified_base, "base code failed the repair rank conditions");
    if (base.repair == repair_kind::per_helper && !perms.symmetric)
      fail(errc::asymmetric_perms_with_per_helper_repair,
           "per-helper repair matrices require p_i(j) = p_j(i)");
  }
  msr_code m;
  m.base = base;
  m.perms = perms;
  m.theta = theta;
  m.uniform_repair = base.repair == repair_kind::uniform;
  return m;
}

/// One codeword of the transformed code; systematic[i][l] and parity[j][l]
/// are the instance-l slices (length N) of node i and node k+j.
struct msr_codeword {
  std::vector<std::vector<gf_vec>> systematic;
  std::vector<std::vector<gf_vec>> parity;
};

inline msr_codeword encode(const msr_code& m, const std::vector<std::vector<gf_vec>>& data) {
  if (int(data.size()) != m.k()) fail(errc::dimension_mismatch, "expected k data blocks");
  for (const auto& blocks : data) {
    if (int(blocks.size()) != m.r())
      fail(errc::dimension_mismatch, "expected r instance vectors per block");
    for (const auto& v : blocks)
      if (int(v.size()) != m.n()) fail(errc::dimension_mismatch, "instance vector length");
  }
  const int k = m.k(), r = m.r();
  // per-instance base parities, then the shuffle h_j^(l) = g_{p_l(j)}^(l)
  std::vector<std::vector<gf_vec>> h(r, std::vector<gf_vec>(r));
  for (int l = 0; l < r; ++l) {
    std::vector<gf_vec> f_l;
    f_l.reserve(k);
    for (int i = 0; i < k; ++i) f_l.push_back(data[i][l]);
    const auto g = base_encode(m.base, f_l);
    for (int j = 0; j < r; ++j) h[j][l] = g[m.perms.at(l, j)];
  }
  msr_codeword cw;
  cw.systematic = data;
  cw.parity.assign(r, std::vector<gf_vec>(r));
  for (int j = 0; j < r; ++j)
    for (int l = 0; l < r; ++l) {
      if (l == j)
        cw.parity[j][l] = h[j][j];
      else
        cw.parity[j][l] =
            vec_add(m.fld(), vec_scale(m.fld(), m.theta.at(j, l), h[j][l]), h[l][j]);
    }
  return cw;
}

inline gf_vec node_content(const msr_codeword& cw, int id) {
  const auto& blocks = id < int(cw.systematic.size()) ? cw.systematic[id]
                                                      : cw.parity[id - cw.systematic.size()];
  gf_vec out;
  for (const auto& v : blocks) vec_append(out, v);
  return out;
}

inline msr_codeword codeword_from_nodes(const msr_code& m,
                                        const std::vector<gf_vec>& contents) {
  if (int(contents.size()) != m.nodes())
    fail(errc::dimension_mismatch, "expected k+r node contents");
  msr_codeword cw;
  cw.systematic.assign(m.k(), std::vector<gf_vec>(m.r()));
  cw.parity.assign(m.r(), std::vector<gf_vec>(m.r()));
  for (int id = 0; id < m.nodes(); ++id) {
    if (int(contents[id].size()) != m.node_capacity())
      fail(errc::dimension_mismatch, "node content length");
    for (int l = 0; l < m.r(); ++l) {
      gf_vec piece = vec_slice(contents[id], l * m.n(), m.n());
      if (id < m.k())
        cw.systematic[id][l] = std::move(piece);
      else
        cw.parity[id - m.k()][l] = std::move(piece);
    }
  }
  return cw;
}

/// One symbolic term of a parity cell: coefficient (1 or a) times base-parity
/// `parity_index` of the given source instance.
struct blueprint_term {
  int source_instance = 0;
  int parity_index = 0;
  bool coeff_is_a = false;
};

using blueprint_cell = std::vector<blueprint_term>;

/// Base-agnostic parity layout: cell [j][l] lists the terms stored at parity
/// node j, instance l.
inline std::vector<std::vector<blueprint_cell>> blueprint(const perm_family& perms,
                                                          const theta_orientation& orient) {
  const int r = perms.r();
  if (orient.r() != r) fail(errc::dimension_mismatch, "orientation size mismatch");
  std::vector<std::vector<blueprint_cell>> grid(r, std::vector<blueprint_cell>(r));
  for (int j = 0; j < r; ++j)
    for (int l = 0; l < r; ++l) {
      if (j == l) {
        grid[j][l] = {blueprint_term{j, perms.at(j, j), false}};
      } else {
        grid[j][l] = {blueprint_term{l, perms.at(l, j), orient.is_a(j, l)},
                      blueprint_term{j, perms.at(j, l), false}};
      }
    }
  return grid;
}

/// Render the layout as `P<j> I<l>: <terms>` lines. `a_repr` is how the
/// coefficient a should print: "-1" fuses into a leading minus sign, anything
/// else prints as "<a_repr>*".
inline std::vector<std::string> format_blueprint(const perm_family& perms,
                                                 const theta_orientation& orient,
                                                 const std::string& a_repr) {
  const auto grid = blueprint(perms, orient);
  std::vector<std::string> lines;
  for (int j = 0; j < perms.r(); ++j)
    for (int l = 0; l < perms.r(); ++l) {
      std::ostringstream os;
      os << "P" << j << " I" << l << ": ";
      bool first = true;
      for (const auto& term : grid[j][l]) {
        if (!first) os << " + ";
        if (term.coeff_is_a) os << (a_repr == "-1" ? "-" : a_repr + "*");
        os << "g" << term.parity_index << "^(" << term.source_instance << ")";
        first = false;
      }
      lines.push_back(os.str());
    }
  return lines;
}

/// Closed form of one (l,s) block of the transformed coding matrix for
/// parity i, source j; disengaged means a zero block.
inline std::optional<matrix> coding_block_entry(const msr_code& m, int i, int j, int l,
                                                int s) {
  if (l == s && l == i) return m.base.coding(m.perms.at(i, i), j);
  if (s == i && l != i) return m.base.coding(m.perms.at(i, l), j);
  if (l == s && l != i)
    return scale(m.theta.at(i, l), m.base.coding(m.perms.at(l, i), j));
  return std::nullopt;
}

inline std::vector<std::vector<matrix>> build_coding_blocks(const msr_code& m) {
  const int k = m.k(), r = m.r(), n = m.n();
  const block_spec spec{r, r, n, n};
  std::vector<std::vector<matrix>> b;
  b.reserve(r);
  for (int i = 0; i < r; ++i) {
    std::vector<matrix> row;
    for (int j = 0; j < k; ++j) {
      std::vector<std::vector<std::optional<matrix>>> grid(
          r, std::vector<std::optional<matrix>>(r));
      for (int l = 0; l < r; ++l)
        for (int s = 0; s < r; ++s) grid[l][s] = coding_block_entry(m, i, j, l, s);
      row.push_back(block_compose(m.fld(), spec, grid));
    }
    b.push_back(std::move(row));
  }
  return b;
}

inline const std::vector<std::vector<matrix>>& cached_blocks(const msr_code& m) {
  if (!m.blocks_cache_)
    m.blocks_cache_ = std::make_shared<const std::vector<std::vector<matrix>>>(
        build_coding_blocks(m));
  return *m.blocks_cache_;
}

inline const std::vector<std::vector<matrix>>& msr_code::coding_blocks() const {
  return cached_blocks(*this);
}

/// Selector picking instance block `instance` out of a stored node vector.
inline matrix repair_selector(const msr_code& m, int instance) {
  if (instance < 0 || instance >= m.r())
    fail(errc::index_out_of_range, "instance index");
  matrix sel(m.fld(), m.n(), m.node_capacity());
  for (int i = 0; i < m.n(); ++i) sel.set(i, instance * m.n() + i, 1);
  return sel;
}

/// Repair matrix applied by `helper` when node `failed` is rebuilt.
/// Systematic targets need the base repair matrices; parity targets are plain
/// instance selectors and exist for any base.
inline matrix repair_block(const msr_code& m, int failed, int helper) {
  if (failed == helper) fail(errc::index_out_of_range, "node cannot help itself");
  if (failed < 0 || failed >= m.nodes() || helper < 0 || helper >= m.nodes())
    fail(errc::index_out_of_range, "node id");
  if (failed >= m.k()) return repair_selector(m, failed - m.k());
  if (!m.base.has_repair())
    fail(errc::missing_repair_matrices, "base code exposes no systematic repair");
  const int r = m.r();
  std::vector<std::vector<std::optional<matrix>>> grid(
      r, std::vector<std::optional<matrix>>(r));
  for (int l = 0; l < r; ++l) {
    if (helper < m.k())
      grid[l][l] = m.base.repair_matrix(failed, helper);
    else
      grid[l][l] = m.base.repair_matrix(failed, m.k() + m.perms.at(l, helper - m.k()));
  }
  return block_compose(m.fld(), block_spec{r, r, m.base.sub_rows(), m.n()}, grid);
}

inline std::vector<std::vector<matrix>> build_repair_blocks(const msr_code& m) {
  std::vector<std::vector<matrix>> out;
  for (int failed = 0; failed < m.nodes(); ++failed) {
    std::vector<matrix> row;
    for (int helper = 0; helper < m.nodes(); ++helper)
      row.push_back(helper == failed ? matrix(m.fld(), 0, 0)
                                     : repair_block(m, failed, helper));
    out.push_back(std::move(row));
  }
  return out;
}

/// Full structural verification of a transformed code against an explicit
/// block grid (so tests can hand in a tampered grid):
///  (a) stepwise encode agrees with the block-matrix product on seeded data,
///  (b) the two repair rank conditions lifted to the transformed code,
///  (c) every t x t sub-grid of blocks is nonsingular,
///  (d) theta/permutation invariants, and every block matches its closed form.
inline verify_report check_full(const msr_code& m,
                                const std::vector<std::vector<matrix>>& blocks,
                                std::uint64_t seed = 1, int encode_trials = 100) {
  verify_report rep;
  rep.equivalence_ok = true;
  const int k = m.k(), r = m.r(), n = m.n();
  const field& f = m.fld();
  if (int(blocks.size()) != r)
    fail(errc::dimension_mismatch, "block grid must have r rows");
  for (const auto& row : blocks)
    if (int(row.size()) != k)
      fail(errc::dimension_mismatch, "block grid must have k columns");

  // (d) first: cheap invariants
  if (m.theta.a == 0 || m.theta.a == 1) {
    rep.equivalence_ok = false;
    rep.failures.push_back({"theta-a-invalid", {int(m.theta.a)}});
  }
  for (int j = 0; j < r; ++j)
    for (int l = j + 1; l < r; ++l) {
      const elem tj = m.theta.t[j][l], tl = m.theta.t[l][j];
      const bool is_pair = (tj == 1 && tl == m.theta.a) || (tj == m.theta.a && tl == 1);
      if (!is_pair || f.mul(tj, tl) == 1) {
        rep.equivalence_ok = false;
        rep.failures.push_back({"theta-pair-product", {j, l}});
      }
    }
  for (int l = 0; l < r; ++l) {
    std::vector<char> seen(r, 0);
    for (int j = 0; j < r; ++j) {
      const int v = m.perms.p[l][j];
      if (v < 0 || v >= r || seen[v]) {
        rep.equivalence_ok = false;
        rep.failures.push_back({"perm-not-bijection", {l}});
        break;
      }
      seen[v] = 1;
    }
  }
  {
    bool sym = true;
    for (int i = 0; i < r && sym; ++i)
      for (int j = 0; j < r; ++j)
        if (m.perms.p[i][j] != m.perms.p[j][i]) {
          sym = false;
          break;
        }
    if (sym != m.perms.symmetric) {
      rep.equivalence_ok = false;
      rep.failures.push_back({"perm-symmetry-flag", {}});
    }
    if (m.base.repair == repair_kind::per_helper && !sym) {
      rep.equivalence_ok = false;
      rep.failures.push_back({"perm-asymmetric-with-per-helper", {}});
    }
  }

  // every block of the grid must match the closed form
  const block_spec spec{r, r, n, n};
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < k; ++j)
      for (int l = 0; l < r; ++l)
        for (int s = 0; s < r; ++s) {
          const auto want = coding_block_entry(m, i, j, l, s);
          const matrix got = block_extract(blocks[i][j], spec, l, s);
          const bool match = want ? (got == *want) : got.is_zero();
          if (!match) {
            rep.equivalence_ok = false;
            rep.failures.push_back({"b-block-closed-form", {i, j, l, s}});
          }
        }

  // (a) stepwise vs matrix encode on seeded random data
  rng gen(seed);
  for (int trial = 0; trial < encode_trials; ++trial) {
    std::vector<std::vector<gf_vec>> data(k, std::vector<gf_vec>(r, gf_vec(n)));
    for (auto& blocks_i : data)
      for (auto& v : blocks_i)
        for (auto& x : v) x = elem(gen.below(f.q()));
    const msr_codeword cw = encode(m, data);
    for (int i = 0; i < r; ++i) {
      gf_vec want(std::size_t(m.node_capacity()), 0);
      for (int j = 0; j < k; ++j)
        want = vec_add(f, want, blocks[i][j] * node_content(cw, j));
      if (want != node_content(cw, k + i)) {
        rep.equivalence_ok = false;
        rep.failures.push_back({"encode-mismatch", {trial, i}});
      }
    }
  }

  // (b) rank conditions with the lifted repair matrices
  if (m.base.has_repair()) {
    rep.repair_ok = true;
    for (int i = 0; i < k; ++i) {
      std::vector<matrix> useful;
      for (int l = 0; l < r; ++l)
        useful.push_back(repair_block(m, i, k + l) * blocks[l][i]);
      if (rank(vstack(useful)) != m.node_capacity()) {
        rep.repair_ok = false;
        rep.failures.push_back({"c4-eq4-rank", {i}});
      }
      for (int j = 0; j < k; ++j) {
        if (j == i) continue;
        std::vector<matrix> stack{repair_block(m, i, j)};
        for (int l = 0; l < r; ++l)
          stack.push_back(repair_block(m, i, k + l) * blocks[l][j]);
        if (rank(vstack(stack)) != n) {
          rep.repair_ok = false;
          rep.failures.push_back({"c4-eq5-rank", {i, j}});
        }
      }
    }
  }

  // (c) MDS sweep over the block grid
  const int tmax = std::min(r, k);
  const int cap = m.node_capacity();
  for (int t = 1; t <= tmax; ++t) {
    detail::for_each_combination(r, t, [&](const std::vector<int>& rows) {
      detail::for_each_combination(k, t, [&](const std::vector<int>& cols) {
        block_spec bs{t, t, cap, cap};
        std::vector<std::vector<std::optional<matrix>>> grid(
            t, std::vector<std::optional<matrix>>(t));
        for (int bi = 0; bi < t; ++bi)
          for (int bj = 0; bj < t; ++bj) grid[bi][bj] = blocks[rows[bi]][cols[bj]];
        if (rank(block_compose(f, bs, grid)) != t * cap) {
          rep.mds_ok = false;
          verify_failure fw{"b-submatrix-singular", {t}};
          fw.witness.insert(fw.witness.end(), rows.begin(), rows.end());
          fw.witness.insert(fw.witness.end(), cols.begin(), cols.end());
          rep.failures.push_back(std::move(fw));
        }
      });
    });
  }
  return rep;
}

inline verify_report check_full(const msr_code& m, std::uint64_t seed = 1,
                                int encode_trials = 100) {
  return check_full(m, m.coding_blocks(), seed, encode_trials);
}

}  // namespace msrforge
