#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "msrforge/matrix.hpp"
#include "msrforge/rng.hpp"

namespace msrforge {

struct base_code_params {
  int k = 0;  // systematic nodes
  int r = 0;  // parity nodes
  int n = 0;  // symbols per node
  field fld;
};

enum class repair_kind { none, uniform, per_helper };

/// A (k+r,k) MDS storage code in systematic form: parity node i stores
/// sum_j a[i][j] * f_j. Repair matrices, when present, are stored explicitly
/// per helper even in the uniform case; `repair` records which case holds.
struct base_code {
  base_code_params params;
  std::vector<std::vector<matrix>> a;  // a[i][j], each n x n
  repair_kind repair = repair_kind::none;
  std::vector<std::vector<matrix>> s;  // s[i][j], i < k, j < k+r, (n/r) x n; s[i][i] unused

  int k() const { return params.k; }
  int r() const { return params.r; }
  int n() const { return params.n; }
  const field& fld() const { return params.fld; }
  int sub_rows() const { return params.n / params.r; }
  bool has_repair() const { return repair != repair_kind::none; }

  const matrix& coding(int i, int j) const {
    if (i < 0 || i >= r() || j < 0 || j >= k())
      fail(errc::index_out_of_range, "coding matrix index");
    return a[i][j];
  }

  const matrix& repair_matrix(int i, int j) const {
    if (!has_repair()) fail(errc::missing_repair_matrices, "code has no repair matrices");
    if (i < 0 || i >= k() || j < 0 || j >= k() + r() || j == i)
      fail(errc::index_out_of_range, "repair matrix index");
    return s[i][j];
  }

  bool operator==(const base_code& o) const {
    return params.k == o.params.k && params.r == o.params.r && params.n == o.params.n &&
           params.fld == o.params.fld && a == o.a && repair == o.repair && s == o.s;
  }
};

inline void validate_base(const base_code& c) {
  const auto& p = c.params;
  if (p.k < 1 || p.r < 2 || p.n < 1)
    fail(errc::dimension_mismatch, "base code needs k >= 1, r >= 2, N >= 1");
  if (int(c.a.size()) != p.r) fail(errc::dimension_mismatch, "coding grid row count");
  for (int i = 0; i < p.r; ++i) {
    if (int(c.a[i].size()) != p.k) fail(errc::dimension_mismatch, "coding grid column count");
    for (int j = 0; j < p.k; ++j) {
      const matrix& m = c.a[i][j];
      if (m.fld() != p.fld) fail(errc::field_mismatch, "coding matrix field");
      if (m.rows() != p.n || m.cols() != p.n)
        fail(errc::dimension_mismatch, "coding matrix must be NxN");
    }
  }
  if (c.has_repair()) {
    if (p.n % p.r != 0)
      fail(errc::dimension_mismatch, "repair matrices require r | N");
    if (int(c.s.size()) != p.k) fail(errc::dimension_mismatch, "repair grid row count");
    for (int i = 0; i < p.k; ++i) {
      if (int(c.s[i].size()) != p.k + p.r)
        fail(errc::dimension_mismatch, "repair grid column count");
      for (int j = 0; j < p.k + p.r; ++j) {
        if (j == i) continue;
        const matrix& m = c.s[i][j];
        if (m.fld() != p.fld) fail(errc::field_mismatch, "repair matrix field");
        if (m.rows() != p.n / p.r || m.cols() != p.n)
          fail(errc::dimension_mismatch, "repair matrix must be (N/r)xN");
      }
    }
  }
}

struct verify_failure {
  std::string condition;
  std::vector<int> witness;
};

struct verify_report {
  bool mds_ok = true;
  std::optional<bool> repair_ok;       // disengaged when not applicable
  std::optional<bool> equivalence_ok;  // used by the transformed-code checker
  std::vector<std::vector<int>> access_counts;
  std::vector<char> access_node_optimal;
  std::vector<verify_failure> failures;

  bool ok() const {
    return failures.empty() && mds_ok && repair_ok.value_or(true) &&
           equivalence_ok.value_or(true);
  }
};

namespace detail {

// visit every size-t subset of [0,n), ascending indices, lexicographic order
template <typename Fn>
inline void for_each_combination(int n, int t, Fn&& fn) {
  if (t <= 0 || t > n) return;
  std::vector<int> idx(t);
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    fn(const_cast<const std::vector<int>&>(idx));
    int i = t - 1;
    while (i >= 0 && idx[i] == n - t + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < t; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

inline std::vector<gf_vec> base_encode(const base_code& c, const std::vector<gf_vec>& f) {
  if (int(f.size()) != c.k()) fail(errc::dimension_mismatch, "expected k source vectors");
  for (const auto& v : f)
    if (int(v.size()) != c.n()) fail(errc::dimension_mismatch, "source vector length");
  std::vector<gf_vec> g;
  g.reserve(c.r());
  for (int i = 0; i < c.r(); ++i) {
    gf_vec acc(std::size_t(c.n()), 0);
    for (int j = 0; j < c.k(); ++j) acc = vec_add(c.fld(), acc, c.coding(i, j) * f[j]);
    g.push_back(std::move(acc));
  }
  return g;
}

/// MDS sweep: every t x t sub-grid of coding matrices must assemble to a
/// nonsingular tN x tN matrix, 1 <= t <= min(r,k).
inline verify_report verify_mds(const base_code& c) {
  verify_report rep;
  const int tmax = std::min(c.r(), c.k());
  for (int t = 1; t <= tmax; ++t) {
    detail::for_each_combination(c.r(), t, [&](const std::vector<int>& rows) {
      detail::for_each_combination(c.k(), t, [&](const std::vector<int>& cols) {
        block_spec spec{t, t, c.n(), c.n()};
        std::vector<std::vector<std::optional<matrix>>> grid(
            t, std::vector<std::optional<matrix>>(t));
        for (int bi = 0; bi < t; ++bi)
          for (int bj = 0; bj < t; ++bj) grid[bi][bj] = c.coding(rows[bi], cols[bj]);
        if (rank(block_compose(c.fld(), spec, grid)) != t * c.n()) {
          rep.mds_ok = false;
          verify_failure f{"mds-submatrix-singular", {t}};
          f.witness.insert(f.witness.end(), rows.begin(), rows.end());
          f.witness.insert(f.witness.end(), cols.begin(), cols.end());
          rep.failures.push_back(std::move(f));
        }
      });
    });
  }
  return rep;
}

/// Repair-path rank conditions. For each systematic i the stacked useful-data
/// coefficients must have rank N; for each helper j != i the stack of the
/// helper's repair matrix over the interference coefficients must collapse to
/// rank N/r (so interference cancels from the helper's download alone).
inline verify_report verify_repair(const base_code& c) {
  if (!c.has_repair()) fail(errc::missing_repair_matrices, "verify_repair needs repair matrices");
  verify_report rep;
  rep.repair_ok = true;
  const int nr = c.sub_rows();
  for (int i = 0; i < c.k(); ++i) {
    std::vector<matrix> useful;
    for (int l = 0; l < c.r(); ++l)
      useful.push_back(c.repair_matrix(i, c.k() + l) * c.coding(l, i));
    if (rank(vstack(useful)) != c.n()) {
      rep.repair_ok = false;
      rep.failures.push_back({"eq4-rank", {i}});
    }
    for (int j = 0; j < c.k(); ++j) {
      if (j == i) continue;
      if (rank(c.repair_matrix(i, j)) != nr) {
        rep.repair_ok = false;
        rep.failures.push_back({"repair-matrix-rank", {i, j}});
      }
      std::vector<matrix> stack{c.repair_matrix(i, j)};
      for (int l = 0; l < c.r(); ++l)
        stack.push_back(c.repair_matrix(i, c.k() + l) * c.coding(l, j));
      if (rank(vstack(stack)) != nr) {
        rep.repair_ok = false;
        rep.failures.push_back({"eq5-rank", {i, j}});
      }
    }
  }
  return rep;
}

/// Count the nonzero columns of every repair matrix; a node repair has
/// optimal access exactly when every helper touches N/r symbols.
inline verify_report verify_access(const base_code& c) {
  if (!c.has_repair()) fail(errc::missing_repair_matrices, "verify_access needs repair matrices");
  verify_report rep;
  rep.access_counts.assign(c.k(), std::vector<int>(c.k() + c.r(), 0));
  rep.access_node_optimal.assign(c.k(), 1);
  for (int i = 0; i < c.k(); ++i)
    for (int j = 0; j < c.k() + c.r(); ++j) {
      if (j == i) continue;
      const int cnt = nonzero_columns(c.repair_matrix(i, j));
      rep.access_counts[i][j] = cnt;
      if (cnt != c.sub_rows()) rep.access_node_optimal[i] = 0;
    }
  return rep;
}

/// Built-in base-code family: k = r+1, N = r, one-row repair matrices.
/// The repair row of node i is e_i for i < r and the all-ones row for i = r;
/// any r of those k rows are linearly independent. Coding matrices carry the
/// rows {S_m : m != j} as left eigenvectors; the eigenvalue assignment comes
/// from a seeded random search (restarts plus single-entry repair moves,
/// scored by the number of failed verifier conditions) bounded at 10,000
/// candidate evaluations. The verifiers are the only acceptance gate.
inline base_code make_eigen_base(int r, unsigned q, std::uint64_t seed) {
  if (r < 2) fail(errc::dimension_mismatch, "family needs r >= 2");
  field f(q);
  const int k = r + 1;
  const int n = r;

  std::vector<gf_vec> srow(k, gf_vec(std::size_t(n), 0));
  for (int i = 0; i < r; ++i) srow[i][i] = 1;
  for (int j = 0; j < n; ++j) srow[r][j] = 1;

  // eigvec_basis[j]: rows {S_m : m != j} ascending, with its inverse
  std::vector<matrix> basis, basis_inv;
  for (int j = 0; j < k; ++j) {
    matrix v(f, n, n);
    int row = 0;
    for (int m = 0; m < k; ++m) {
      if (m == j) continue;
      for (int col = 0; col < n; ++col) v.set(row, col, srow[m][col]);
      ++row;
    }
    basis.push_back(v);
    basis_inv.push_back(inverse(v));
  }

  // eigenvalues[l][j][t]: eigenvalue of the t-th eigenvector row of A_{l,j};
  // l = 0 is pinned to the identity matrices
  using assignment = std::vector<std::vector<std::vector<elem>>>;
  const auto build = [&](const assignment& lam) {
    base_code c;
    c.params = base_code_params{k, r, n, f};
    c.a.assign(r, {});
    for (int j = 0; j < k; ++j) c.a[0].push_back(matrix::identity(f, n));
    for (int l = 1; l < r; ++l)
      for (int j = 0; j < k; ++j) {
        matrix d(f, n, n);
        for (int t = 0; t < n; ++t) d.set(t, t, lam[l][j][t]);
        c.a[l].push_back(basis_inv[j] * d * basis[j]);
      }
    c.repair = repair_kind::uniform;
    c.s.assign(k, {});
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k + r; ++j)
        c.s[i].push_back(j == i ? matrix(f, 0, 0) : matrix::row_vector(f, srow[i]));
    return c;
  };
  const auto cost = [&](const base_code& c) {
    return verify_mds(c).failures.size() + verify_repair(c).failures.size();
  };

  constexpr int budget = 10000;
  constexpr int repair_moves = 400;
  int evals = 0;
  rng gen(seed * 0x9e3779b97f4a7c15ULL + 1);
  while (evals < budget) {
    assignment lam(r, std::vector<gf_vec>(k, gf_vec(std::size_t(n), 1)));
    for (int l = 1; l < r; ++l)
      for (int j = 0; j < k; ++j)
        for (int t = 0; t < n; ++t) lam[l][j][t] = elem(1 + gen.below(q - 1));
    base_code c = build(lam);
    std::size_t best = cost(c);
    ++evals;
    if (best == 0) return c;
    for (int move = 0; move < repair_moves && evals < budget; ++move) {
      const int l = 1 + int(gen.below(std::uint32_t(r - 1)));
      const int j = int(gen.below(std::uint32_t(k)));
      const int t = int(gen.below(std::uint32_t(n)));
      const elem previous = lam[l][j][t];
      lam[l][j][t] = elem(1 + gen.below(q - 1));
      base_code cand = build(lam);
      const std::size_t got = cost(cand);
      ++evals;
      if (got == 0) return cand;
      if (got <= best)
        best = got;
      else
        lam[l][j][t] = previous;
    }
  }
  fail(errc::search_exhausted,
       "no eigenvalue assignment found in " + std::to_string(budget) +
           " candidate evaluations");
}

/// Turn a uniform-repair code into a genuinely per-helper one by scaling each
/// S_{i,j} with a random nonzero scalar; row scaling preserves both rank
/// conditions.
inline base_code perturb_repair_scalars(const base_code& c, std::uint64_t seed) {
  if (c.repair != repair_kind::uniform)
    fail(errc::contract_breach, "perturb expects a uniform-repair code");
  const unsigned q = c.fld().q();
  rng gen(seed);
  base_code out = c;
  out.repair = repair_kind::per_helper;
  for (int i = 0; i < c.k(); ++i)
    for (int j = 0; j < c.k() + c.r(); ++j) {
      if (j == i) continue;
      out.s[i][j] = scale(elem(1 + gen.below(q - 1)), c.s[i][j]);
    }
  // guarantee at least one node sees two different helper matrices
  bool varied = false;
  for (int i = 0; i < c.k() && !varied; ++i) {
    const matrix* first = nullptr;
    for (int j = 0; j < c.k() + c.r(); ++j) {
      if (j == i) continue;
      if (!first) {
        first = &out.s[i][j];
      } else if (out.s[i][j] != *first) {
        varied = true;
        break;
      }
    }
  }
  if (!varied) {
    const int j = c.k() + c.r() - 1;
    matrix doubled = scale(2, out.s[0][j]);
    out.s[0][j] = (doubled == out.s[0][j]) ? scale(2, scale(2, out.s[0][j])) : doubled;
  }
  return out;
}

/// Downloads feeding a systematic repair of node i: helper j contributes
/// S_{i,j} applied to its stored vector.
struct base_repair_downloads {
  std::vector<gf_vec> from_node;  // size k+r; the failed slot stays empty
};

inline base_repair_downloads collect_base_repair(const base_code& c, int i,
                                                 const std::vector<gf_vec>& nodes) {
  if (int(nodes.size()) != c.k() + c.r())
    fail(errc::dimension_mismatch, "expected k+r node vectors");
  base_repair_downloads d;
  d.from_node.resize(nodes.size());
  for (int j = 0; j < c.k() + c.r(); ++j) {
    if (j == i) continue;
    d.from_node[j] = c.repair_matrix(i, j) * nodes[j];
  }
  return d;
}

/// Reconstruct f_i from optimal-bandwidth downloads: cancel the interference
/// of every other systematic part from the parity downloads, then solve the
/// full-rank useful-data system.
inline gf_vec base_repair_systematic(const base_code& c, int i,
                                     const base_repair_downloads& d) {
  if (!c.has_repair()) fail(errc::missing_repair_matrices, "repair needs repair matrices");
  if (i < 0 || i >= c.k()) fail(errc::index_out_of_range, "systematic node index");
  const field& f = c.fld();
  std::vector<matrix> useful;
  gf_vec rhs;
  for (int l = 0; l < c.r(); ++l) {
    gf_vec u = d.from_node[c.k() + l];
    for (int j = 0; j < c.k(); ++j) {
      if (j == i) continue;
      const matrix coeff = row_represent(c.repair_matrix(i, j),
                                         c.repair_matrix(i, c.k() + l) * c.coding(l, j));
      u = vec_sub(f, u, coeff * d.from_node[j]);
    }
    vec_append(rhs, u);
    useful.push_back(c.repair_matrix(i, c.k() + l) * c.coding(l, i));
  }
  try {
    return solve(vstack(useful), rhs);
  } catch (const error&) {
    fail(errc::rank_deficient, "useful-data system did not have a unique solution");
  }
}

/// Recover all k source vectors from any k node contents (slots outside the
/// chosen subset disengaged).
inline std::vector<gf_vec> base_decode(const base_code& c,
                                       const std::vector<std::optional<gf_vec>>& nodes) {
  if (int(nodes.size()) != c.k() + c.r())
    fail(errc::wrong_count, "expected a k+r slot vector");
  int engaged = 0;
  for (const auto& v : nodes)
    if (v) ++engaged;
  if (engaged != c.k()) fail(errc::wrong_count, "exactly k nodes must be provided");
  for (int id = 0; id < c.k() + c.r(); ++id)
    if (nodes[id] && int(nodes[id]->size()) != c.n())
      fail(errc::dimension_mismatch, "node content length");

  bool all_systematic = true;
  for (int id = 0; id < c.k(); ++id)
    if (!nodes[id]) all_systematic = false;
  if (all_systematic) {
    std::vector<gf_vec> out;
    for (int id = 0; id < c.k(); ++id) out.push_back(*nodes[id]);
    return out;
  }

  const field& f = c.fld();
  std::vector<matrix> lhs_rows;
  gf_vec rhs;
  for (int id = 0; id < c.k() + c.r(); ++id) {
    if (!nodes[id]) continue;
    std::vector<matrix> row;
    for (int j = 0; j < c.k(); ++j) {
      if (id < c.k())
        row.push_back(j == id ? matrix::identity(f, c.n()) : matrix(f, c.n(), c.n()));
      else
        row.push_back(c.coding(id - c.k(), j));
    }
    lhs_rows.push_back(hstack(row));
    vec_append(rhs, *nodes[id]);
  }
  gf_vec x;
  try {
    x = solve(vstack(lhs_rows), rhs);
  } catch (const error&) {
    fail(errc::singular_selection, "selected nodes do not determine the data");
  }
  std::vector<gf_vec> out;
  for (int j = 0; j < c.k(); ++j) out.push_back(vec_slice(x, j * c.n(), c.n()));
  return out;
}

}  // namespace msrforge
