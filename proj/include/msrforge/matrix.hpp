#pragma once

#include <initializer_list>
#include <optional>
#include <utility>
#include <vector>

#include "msrforge/gf.hpp"

namespace msrforge {

using gf_vec = std::vector<elem>;

/// Dense row-major matrix over GF(q). Matrices are immutable values in
/// practice; the row operations exist for the elimination routines below.
class matrix {
 public:
  matrix(const field& f, int rows, int cols) : fld_(f), rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0)
      fail(errc::dimension_mismatch, "negative matrix dimension");
    data_.assign(std::size_t(rows) * std::size_t(cols), 0);
  }

  static matrix identity(const field& f, int n) {
    matrix m(f, n, n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
  }

  static matrix from_rows(const field& f,
                          std::initializer_list<std::initializer_list<int>> rows) {
    const int nr = int(rows.size());
    const int nc = nr ? int(rows.begin()->size()) : 0;
    matrix m(f, nr, nc);
    int i = 0;
    for (const auto& row : rows) {
      if (int(row.size()) != nc) fail(errc::dimension_mismatch, "ragged rows");
      int j = 0;
      for (int v : row) m.set(i, j++, elem(v));
      ++i;
    }
    return m;
  }

  static matrix row_vector(const field& f, const gf_vec& v) {
    matrix m(f, 1, int(v.size()));
    for (int j = 0; j < int(v.size()); ++j) m.set(0, j, v[j]);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const field& fld() const { return fld_; }

  elem at(int r, int c) const {
    bounds(r, c);
    return data_[std::size_t(r) * cols_ + c];
  }

  void set(int r, int c, elem v) {
    bounds(r, c);
    fld_.require(v);
    data_[std::size_t(r) * cols_ + c] = v;
  }

  gf_vec row(int r) const {
    bounds(r, 0);
    return gf_vec(data_.begin() + std::size_t(r) * cols_,
                  data_.begin() + std::size_t(r + 1) * cols_);
  }

  bool is_zero() const {
    for (elem v : data_)
      if (v) return false;
    return true;
  }

  bool operator==(const matrix& o) const {
    return fld_ == o.fld_ && rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }
  bool operator!=(const matrix& o) const { return !(*this == o); }

  void swap_rows(int a, int b) {
    bounds(a, 0);
    bounds(b, 0);
    if (a == b) return;
    for (int j = 0; j < cols_; ++j)
      std::swap(data_[std::size_t(a) * cols_ + j], data_[std::size_t(b) * cols_ + j]);
  }

  void scale_row(int r, elem c) {
    bounds(r, 0);
    for (int j = 0; j < cols_; ++j) {
      auto& v = data_[std::size_t(r) * cols_ + j];
      v = fld_.mul(v, c);
    }
  }

  // row_dst += c * row_src
  void add_scaled_row(int dst, int src, elem c) {
    bounds(dst, 0);
    bounds(src, 0);
    for (int j = 0; j < cols_; ++j) {
      auto& v = data_[std::size_t(dst) * cols_ + j];
      v = fld_.add(v, fld_.mul(c, data_[std::size_t(src) * cols_ + j]));
    }
  }

 private:
  void bounds(int r, int c) const {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
      fail(errc::index_out_of_range,
           "(" + std::to_string(r) + "," + std::to_string(c) + ") outside " +
               std::to_string(rows_) + "x" + std::to_string(cols_));
  }

  field fld_;
  int rows_ = 0, cols_ = 0;
  std::vector<elem> data_;
};

namespace detail {

inline void require_same_field(const matrix& a, const matrix& b) {
  if (a.fld() != b.fld())
    fail(errc::field_mismatch, "operands from different fields");
}

// Gauss-Jordan with first-nonzero pivoting: deterministic and exact.
// Returns the pivot columns; identical row operations are applied to aug.
inline std::vector<int> rref_in_place(matrix& a, matrix* aug) {
  const field& f = a.fld();
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < a.cols() && row < a.rows(); ++col) {
    int pr = -1;
    for (int i = row; i < a.rows(); ++i)
      if (a.at(i, col) != 0) {
        pr = i;
        break;
      }
    if (pr < 0) continue;
    a.swap_rows(row, pr);
    if (aug) aug->swap_rows(row, pr);
    const elem piv_inv = f.inv(a.at(row, col));
    a.scale_row(row, piv_inv);
    if (aug) aug->scale_row(row, piv_inv);
    for (int i = 0; i < a.rows(); ++i) {
      if (i == row) continue;
      const elem c = a.at(i, col);
      if (c == 0) continue;
      a.add_scaled_row(i, row, f.neg(c));
      if (aug) aug->add_scaled_row(i, row, f.neg(c));
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace detail

inline matrix operator*(const matrix& a, const matrix& b) {
  detail::require_same_field(a, b);
  if (a.cols() != b.rows())
    fail(errc::dimension_mismatch, "product of " + std::to_string(a.cols()) +
                                       " cols with " + std::to_string(b.rows()) + " rows");
  const field& f = a.fld();
  matrix out(f, a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) {
      elem acc = 0;
      for (int t = 0; t < a.cols(); ++t)
        acc = f.add(acc, f.mul(a.at(i, t), b.at(t, j)));
      out.set(i, j, acc);
    }
  return out;
}

inline gf_vec operator*(const matrix& a, const gf_vec& v) {
  if (a.cols() != int(v.size()))
    fail(errc::dimension_mismatch, "matrix-vector shape mismatch");
  const field& f = a.fld();
  gf_vec out(std::size_t(a.rows()), 0);
  for (int i = 0; i < a.rows(); ++i) {
    elem acc = 0;
    for (int t = 0; t < a.cols(); ++t) acc = f.add(acc, f.mul(a.at(i, t), v[t]));
    out[i] = acc;
  }
  return out;
}

inline matrix add(const matrix& a, const matrix& b) {
  detail::require_same_field(a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(errc::dimension_mismatch, "sum shape mismatch");
  matrix out(a.fld(), a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.set(i, j, a.fld().add(a.at(i, j), b.at(i, j)));
  return out;
}

inline matrix sub(const matrix& a, const matrix& b) {
  detail::require_same_field(a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(errc::dimension_mismatch, "difference shape mismatch");
  matrix out(a.fld(), a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.set(i, j, a.fld().sub(a.at(i, j), b.at(i, j)));
  return out;
}

inline matrix scale(elem c, const matrix& a) {
  matrix out(a.fld(), a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.set(i, j, a.fld().mul(c, a.at(i, j)));
  return out;
}

inline matrix transpose(const matrix& a) {
  matrix out(a.fld(), a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.set(j, i, a.at(i, j));
  return out;
}

inline int rank(matrix a) {
  return int(detail::rref_in_place(a, nullptr).size());
}

inline gf_vec solve(const matrix& a, const gf_vec& b) {
  if (int(b.size()) != a.rows())
    fail(errc::dimension_mismatch, "right-hand side length mismatch");
  matrix work = a;
  matrix aug(a.fld(), a.rows(), 1);
  for (int i = 0; i < a.rows(); ++i) aug.set(i, 0, b[i]);
  const auto pivots = detail::rref_in_place(work, &aug);
  for (int i = int(pivots.size()); i < a.rows(); ++i)
    if (aug.at(i, 0) != 0) fail(errc::inconsistent, "no solution exists");
  if (int(pivots.size()) < a.cols())
    fail(errc::underdetermined, "solution is not unique");
  gf_vec x(std::size_t(a.cols()), 0);
  for (int j = 0; j < int(pivots.size()); ++j) x[pivots[j]] = aug.at(j, 0);
  return x;
}

inline matrix inverse(const matrix& a) {
  if (a.rows() != a.cols()) fail(errc::dimension_mismatch, "inverse of non-square");
  matrix work = a;
  matrix aug = matrix::identity(a.fld(), a.rows());
  const auto pivots = detail::rref_in_place(work, &aug);
  if (int(pivots.size()) != a.rows())
    fail(errc::singular_matrix, "matrix is singular");
  return aug;
}

/// Express the rows of target in the row space of basis: returns C with
/// target = C * basis. The caller guarantees containment (the repair-path
/// rank conditions); no consistency check is performed here.
inline matrix row_represent(const matrix& basis, const matrix& target) {
  detail::require_same_field(basis, target);
  if (basis.cols() != target.cols())
    fail(errc::dimension_mismatch, "row_represent width mismatch");
  matrix red = basis;
  matrix t = matrix::identity(basis.fld(), basis.rows());
  const auto pivots = detail::rref_in_place(red, &t);
  const field& f = basis.fld();
  matrix c(f, target.rows(), basis.rows());
  for (int i = 0; i < target.rows(); ++i) {
    // coefficients against the reduced rows, then pulled back through t
    for (int col = 0; col < basis.rows(); ++col) {
      elem acc = 0;
      for (int j = 0; j < int(pivots.size()); ++j)
        acc = f.add(acc, f.mul(target.at(i, pivots[j]), t.at(j, col)));
      c.set(i, col, acc);
    }
  }
  return c;
}

inline int nonzero_columns(const matrix& a) {
  int count = 0;
  for (int j = 0; j < a.cols(); ++j)
    for (int i = 0; i < a.rows(); ++i)
      if (a.at(i, j) != 0) {
        ++count;
        break;
      }
  return count;
}

inline matrix vstack(const std::vector<matrix>& parts) {
  if (parts.empty()) fail(errc::dimension_mismatch, "vstack of nothing");
  int total = 0;
  for (const auto& p : parts) {
    detail::require_same_field(parts.front(), p);
    if (p.cols() != parts.front().cols())
      fail(errc::dimension_mismatch, "vstack width mismatch");
    total += p.rows();
  }
  matrix out(parts.front().fld(), total, parts.front().cols());
  int r = 0;
  for (const auto& p : parts) {
    for (int i = 0; i < p.rows(); ++i)
      for (int j = 0; j < p.cols(); ++j) out.set(r + i, j, p.at(i, j));
    r += p.rows();
  }
  return out;
}

inline matrix hstack(const std::vector<matrix>& parts) {
  if (parts.empty()) fail(errc::dimension_mismatch, "hstack of nothing");
  int total = 0;
  for (const auto& p : parts) {
    detail::require_same_field(parts.front(), p);
    if (p.rows() != parts.front().rows())
      fail(errc::dimension_mismatch, "hstack height mismatch");
    total += p.cols();
  }
  matrix out(parts.front().fld(), parts.front().rows(), total);
  int c = 0;
  for (const auto& p : parts) {
    for (int i = 0; i < p.rows(); ++i)
      for (int j = 0; j < p.cols(); ++j) out.set(i, c + j, p.at(i, j));
    c += p.cols();
  }
  return out;
}

/// Shape of a block grid: block_rows x block_cols blocks, each
/// block_height x block_width.
struct block_spec {
  int block_rows = 0;
  int block_cols = 0;
  int block_height = 0;
  int block_width = 0;
};

/// Assemble a matrix from a grid of blocks; disengaged entries are zero
/// blocks (the transformed coding matrices are block-sparse).
inline matrix block_compose(const field& f, const block_spec& spec,
                            const std::vector<std::vector<std::optional<matrix>>>& blocks) {
  if (spec.block_rows <= 0 || spec.block_cols <= 0 || spec.block_height <= 0 ||
      spec.block_width <= 0)
    fail(errc::dimension_mismatch, "block_spec entries must be positive");
  if (int(blocks.size()) != spec.block_rows)
    fail(errc::dimension_mismatch, "block grid row count mismatch");
  matrix out(f, spec.block_rows * spec.block_height, spec.block_cols * spec.block_width);
  for (int l = 0; l < spec.block_rows; ++l) {
    if (int(blocks[l].size()) != spec.block_cols)
      fail(errc::dimension_mismatch, "block grid column count mismatch");
    for (int s = 0; s < spec.block_cols; ++s) {
      if (!blocks[l][s]) continue;
      const matrix& b = *blocks[l][s];
      if (b.fld() != f || b.rows() != spec.block_height || b.cols() != spec.block_width)
        fail(errc::dimension_mismatch, "block (" + std::to_string(l) + "," +
                                           std::to_string(s) + ") has wrong shape");
      for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j)
          out.set(l * spec.block_height + i, s * spec.block_width + j, b.at(i, j));
    }
  }
  return out;
}

inline matrix block_extract(const matrix& a, const block_spec& spec, int l, int s) {
  if (a.rows() != spec.block_rows * spec.block_height ||
      a.cols() != spec.block_cols * spec.block_width)
    fail(errc::dimension_mismatch, "matrix does not match block_spec");
  if (l < 0 || l >= spec.block_rows || s < 0 || s >= spec.block_cols)
    fail(errc::index_out_of_range, "block index outside grid");
  matrix out(a.fld(), spec.block_height, spec.block_width);
  for (int i = 0; i < spec.block_height; ++i)
    for (int j = 0; j < spec.block_width; ++j)
      out.set(i, j, a.at(l * spec.block_height + i, s * spec.block_width + j));
  return out;
}

inline gf_vec vec_add(const field& f, const gf_vec& a, const gf_vec& b) {
  if (a.size() != b.size()) fail(errc::dimension_mismatch, "vector sum length mismatch");
  gf_vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f.add(a[i], b[i]);
  return out;
}

inline gf_vec vec_sub(const field& f, const gf_vec& a, const gf_vec& b) {
  if (a.size() != b.size()) fail(errc::dimension_mismatch, "vector difference length mismatch");
  gf_vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f.sub(a[i], b[i]);
  return out;
}

inline gf_vec vec_scale(const field& f, elem c, const gf_vec& a) {
  gf_vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f.mul(c, a[i]);
  return out;
}

inline gf_vec vec_slice(const gf_vec& a, int off, int len) {
  if (off < 0 || len < 0 || std::size_t(off) + std::size_t(len) > a.size())
    fail(errc::index_out_of_range, "vector slice outside range");
  return gf_vec(a.begin() + off, a.begin() + off + len);
}

inline void vec_append(gf_vec& dst, const gf_vec& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

}  // namespace msrforge
