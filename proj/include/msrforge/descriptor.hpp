#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "msrforge/transform.hpp"

namespace msrforge {

namespace detail {

struct desc_line {
  int number = 0;
  std::vector<std::string> tokens;
};

inline std::vector<desc_line> tokenize_descriptor(const std::string& text) {
  std::vector<desc_line> lines;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    desc_line line{number, {}};
    std::string tok;
    while (ls >> tok) line.tokens.push_back(tok);
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

[[noreturn]] inline void parse_fail(int line, const std::string& what) {
  fail(errc::parse_error, "line " + std::to_string(line) + ": " + what);
}

inline long parse_int(const desc_line& line, const std::string& tok) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(tok, &used);
  } catch (...) {
    parse_fail(line.number, "expected an integer, got '" + tok + "'");
  }
  if (used != tok.size())
    parse_fail(line.number, "expected an integer, got '" + tok + "'");
  return v;
}

class desc_cursor {
 public:
  explicit desc_cursor(std::vector<desc_line> lines) : lines_(std::move(lines)) {}

  bool done() const { return pos_ >= lines_.size(); }
  const desc_line& peek() const {
    if (done()) fail(errc::parse_error, "unexpected end of descriptor");
    return lines_[pos_];
  }
  desc_line take() {
    const desc_line line = peek();
    ++pos_;
    return line;
  }
  int last_line() const { return lines_.empty() ? 0 : lines_.back().number; }

 private:
  std::vector<desc_line> lines_;
  std::size_t pos_ = 0;
};

inline matrix parse_matrix(desc_cursor& cur, const field& f, int rows, int cols) {
  matrix m(f, rows, cols);
  for (int i = 0; i < rows; ++i) {
    const desc_line line = cur.take();
    if (int(line.tokens.size()) != cols)
      parse_fail(line.number, "expected " + std::to_string(cols) + " entries");
    for (int j = 0; j < cols; ++j) {
      const long v = parse_int(line, line.tokens[j]);
      if (v < 0 || v >= long(f.q()))
        fail(errc::value_out_of_field,
             "line " + std::to_string(line.number) + ": entry " + std::to_string(v) +
                 " outside GF(" + std::to_string(f.q()) + ")");
      m.set(i, j, elem(v));
    }
  }
  return m;
}

inline void write_matrix(std::ostringstream& os, const matrix& m) {
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << m.at(i, j);
    }
    os << '\n';
  }
}

}  // namespace detail

/// A parsed descriptor: always a base code, plus the transform directives
/// when the text is a full code bundle.
struct parsed_descriptor {
  base_code base;
  std::optional<perm_family> perms;
  std::optional<theta_table> theta;

  bool is_bundle() const { return perms.has_value() && theta.has_value(); }
};

inline parsed_descriptor descriptor_parse(const std::string& text) {
  detail::desc_cursor cur(detail::tokenize_descriptor(text));

  {
    const auto line = cur.take();
    if (line.tokens.size() != 2 || line.tokens[0] != "msrforge-base" ||
        line.tokens[1] != "1")
      detail::parse_fail(line.number, "expected header 'msrforge-base 1'");
  }

  std::optional<field> fld;
  {
    const auto line = cur.take();
    if (line.tokens.size() < 2 || line.tokens.size() > 3 || line.tokens[0] != "field")
      detail::parse_fail(line.number, "expected 'field <q> [<modulus>]'");
    const long q = detail::parse_int(line, line.tokens[1]);
    const long modulus =
        line.tokens.size() == 3 ? detail::parse_int(line, line.tokens[2]) : 0;
    if (q < 2) detail::parse_fail(line.number, "field order must be at least 2");
    fld.emplace(unsigned(q), unsigned(modulus));
  }

  parsed_descriptor out{base_code{}, std::nullopt, std::nullopt};
  base_code& code = out.base;
  {
    const auto line = cur.take();
    if (line.tokens.size() != 4 || line.tokens[0] != "params")
      detail::parse_fail(line.number, "expected 'params <k> <r> <N>'");
    code.params.k = int(detail::parse_int(line, line.tokens[1]));
    code.params.r = int(detail::parse_int(line, line.tokens[2]));
    code.params.n = int(detail::parse_int(line, line.tokens[3]));
    code.params.fld = *fld;
    if (code.params.k < 1 || code.params.r < 2 || code.params.n < 1)
      detail::parse_fail(line.number, "params need k >= 1, r >= 2, N >= 1");
  }

  const int k = code.params.k, r = code.params.r, n = code.params.n;
  std::vector<std::vector<std::optional<matrix>>> agrid(
      r, std::vector<std::optional<matrix>>(k));
  std::vector<std::vector<std::optional<matrix>>> sgrid(
      k, std::vector<std::optional<matrix>>(k + r));
  bool saw_su = false, saw_s = false;
  std::optional<std::vector<std::vector<int>>> perm_rows;
  bool perm_cyclic = false, saw_perm = false;
  std::optional<long> theta_a;
  std::optional<std::vector<std::vector<long>>> orient_rows;

  while (!cur.done()) {
    const auto line = cur.take();
    const std::string& head = line.tokens[0];
    if (head == "A") {
      if (line.tokens.size() != 3) detail::parse_fail(line.number, "expected 'A <i> <j>'");
      const long i = detail::parse_int(line, line.tokens[1]);
      const long j = detail::parse_int(line, line.tokens[2]);
      if (i < 0 || i >= r || j < 0 || j >= k)
        detail::parse_fail(line.number, "coding matrix index outside the grid");
      if (agrid[i][j]) detail::parse_fail(line.number, "duplicate coding matrix");
      agrid[i][j] = detail::parse_matrix(cur, *fld, n, n);
    } else if (head == "Su") {
      if (saw_s) detail::parse_fail(line.number, "cannot mix Su and S sections");
      if (n % r != 0) detail::parse_fail(line.number, "repair matrices require r | N");
      saw_su = true;
      if (line.tokens.size() != 2) detail::parse_fail(line.number, "expected 'Su <i>'");
      const long i = detail::parse_int(line, line.tokens[1]);
      if (i < 0 || i >= k) detail::parse_fail(line.number, "repair row index outside [0,k)");
      if (sgrid[i][(i + 1) % (k + r)])
        detail::parse_fail(line.number, "duplicate uniform repair matrix");
      const matrix s = detail::parse_matrix(cur, *fld, n / r, n);
      for (int j = 0; j < k + r; ++j)
        if (j != i) sgrid[i][j] = s;
    } else if (head == "S") {
      if (saw_su) detail::parse_fail(line.number, "cannot mix Su and S sections");
      if (n % r != 0) detail::parse_fail(line.number, "repair matrices require r | N");
      saw_s = true;
      if (line.tokens.size() != 3) detail::parse_fail(line.number, "expected 'S <i> <j>'");
      const long i = detail::parse_int(line, line.tokens[1]);
      const long j = detail::parse_int(line, line.tokens[2]);
      if (i < 0 || i >= k || j < 0 || j >= k + r || j == i)
        detail::parse_fail(line.number, "repair matrix index outside the grid");
      if (sgrid[i][j]) detail::parse_fail(line.number, "duplicate repair matrix");
      sgrid[i][j] = detail::parse_matrix(cur, *fld, n / r, n);
    } else if (head == "perm") {
      if (saw_perm) detail::parse_fail(line.number, "duplicate perm directive");
      saw_perm = true;
      if (line.tokens.size() != 2)
        detail::parse_fail(line.number, "expected 'perm cyclic' or 'perm explicit'");
      if (line.tokens[1] == "cyclic") {
        perm_cyclic = true;
      } else if (line.tokens[1] == "explicit") {
        std::vector<std::vector<int>> rows(r, std::vector<int>(r));
        for (int l = 0; l < r; ++l) {
          const auto row = cur.take();
          if (int(row.tokens.size()) != r)
            detail::parse_fail(row.number, "expected " + std::to_string(r) + " entries");
          for (int j = 0; j < r; ++j)
            rows[l][j] = int(detail::parse_int(row, row.tokens[j]));
        }
        perm_rows = std::move(rows);
      } else {
        detail::parse_fail(line.number, "unknown perm kind '" + line.tokens[1] + "'");
      }
    } else if (head == "theta") {
      if (theta_a) detail::parse_fail(line.number, "duplicate theta directive");
      if (line.tokens.size() != 2) detail::parse_fail(line.number, "expected 'theta <a>'");
      theta_a = detail::parse_int(line, line.tokens[1]);
      if (*theta_a < 0 || *theta_a >= long(fld->q()))
        fail(errc::value_out_of_field,
             "line " + std::to_string(line.number) + ": theta value outside the field");
    } else if (head == "theta-orient") {
      if (orient_rows) detail::parse_fail(line.number, "duplicate theta-orient directive");
      if (line.tokens.size() != 2)
        detail::parse_fail(line.number, "expected 'theta-orient default|explicit'");
      if (line.tokens[1] == "default") {
        // same as omitting the directive
      } else if (line.tokens[1] == "explicit") {
        std::vector<std::vector<long>> rows(r, std::vector<long>(r));
        for (int j = 0; j < r; ++j) {
          const auto row = cur.take();
          if (int(row.tokens.size()) != r)
            detail::parse_fail(row.number, "expected " + std::to_string(r) + " entries");
          for (int l = 0; l < r; ++l) rows[j][l] = detail::parse_int(row, row.tokens[l]);
        }
        orient_rows = std::move(rows);
      } else {
        detail::parse_fail(line.number, "unknown theta orientation '" + line.tokens[1] + "'");
      }
    } else {
      detail::parse_fail(line.number, "unknown directive '" + head + "'");
    }
  }

  code.a.resize(r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < k; ++j) {
      if (!agrid[i][j])
        fail(errc::parse_error, "missing coding matrix A " + std::to_string(i) + " " +
                                    std::to_string(j));
      code.a[i].push_back(std::move(*agrid[i][j]));
    }

  if (saw_su || saw_s) {
    code.repair = saw_su ? repair_kind::uniform : repair_kind::per_helper;
    code.s.assign(k, {});
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k + r; ++j) {
        if (j == i) {
          code.s[i].push_back(matrix(*fld, 0, 0));
          continue;
        }
        if (!sgrid[i][j])
          fail(errc::parse_error, "missing repair matrix S " + std::to_string(i) + " " +
                                      std::to_string(j));
        code.s[i].push_back(std::move(*sgrid[i][j]));
      }
  }
  validate_base(code);

  if (saw_perm != theta_a.has_value())
    fail(errc::parse_error, "a bundle needs both perm and theta directives");
  if (saw_perm) {
    out.perms = perm_cyclic ? perm_family::cyclic(r)
                            : perm_family::from_rows(std::move(*perm_rows));
    if (orient_rows) {
      theta_orientation orient;
      orient.a_at.assign(r, std::vector<char>(r, 0));
      for (int j = 0; j < r; ++j)
        for (int l = 0; l < r; ++l) {
          if (j == l) continue;
          if ((*orient_rows)[j][l] == *theta_a && *theta_a != 1)
            orient.a_at[j][l] = 1;
          else if ((*orient_rows)[j][l] != 1)
            fail(errc::parse_error, "theta-orient entries must be 1 or a");
        }
      out.theta = theta_table::make_oriented(code.fld(), elem(*theta_a), orient);
    } else {
      out.theta = theta_table::make_default(code.fld(), elem(*theta_a), r);
    }
  }
  return out;
}

/// Canonical text form of a base code. Loading the result reproduces the
/// code; saving a loaded canonical descriptor reproduces the text.
inline std::string descriptor_save(const base_code& code) {
  validate_base(code);
  std::ostringstream os;
  os << "msrforge-base 1\n";
  os << "field " << code.fld().q();
  if (code.fld().kind() == field_kind::binary_ext) os << ' ' << code.fld().modulus();
  os << '\n';
  os << "params " << code.k() << ' ' << code.r() << ' ' << code.n() << '\n';
  for (int i = 0; i < code.r(); ++i)
    for (int j = 0; j < code.k(); ++j) {
      os << "A " << i << ' ' << j << '\n';
      detail::write_matrix(os, code.coding(i, j));
    }
  if (code.repair == repair_kind::uniform) {
    for (int i = 0; i < code.k(); ++i) {
      os << "Su " << i << '\n';
      detail::write_matrix(os, code.repair_matrix(i, i == 0 ? 1 : 0));
    }
  } else if (code.repair == repair_kind::per_helper) {
    for (int i = 0; i < code.k(); ++i)
      for (int j = 0; j < code.k() + code.r(); ++j) {
        if (j == i) continue;
        os << "S " << i << ' ' << j << '\n';
        detail::write_matrix(os, code.repair_matrix(i, j));
      }
  }
  return os.str();
}

inline base_code descriptor_load(const std::string& text) {
  parsed_descriptor parsed = descriptor_parse(text);
  if (parsed.perms || parsed.theta)
    fail(errc::parse_error, "expected a base descriptor, found bundle directives");
  return std::move(parsed.base);
}

/// Bundle = base descriptor followed by the transform directives.
inline std::string bundle_save(const msr_code& m) {
  std::ostringstream os;
  os << descriptor_save(m.base);
  bool cyclic = true;
  for (int i = 0; i < m.r() && cyclic; ++i)
    for (int j = 0; j < m.r(); ++j)
      if (m.perms.at(i, j) != (i + j) % m.r()) {
        cyclic = false;
        break;
      }
  if (cyclic) {
    os << "perm cyclic\n";
  } else {
    os << "perm explicit\n";
    for (int l = 0; l < m.r(); ++l) {
      for (int j = 0; j < m.r(); ++j) {
        if (j) os << ' ';
        os << m.perms.at(l, j);
      }
      os << '\n';
    }
  }
  os << "theta " << m.theta.a << '\n';
  bool default_orient = true;
  const auto def = theta_orientation::make_default(m.r());
  for (int j = 0; j < m.r() && default_orient; ++j)
    for (int l = 0; l < m.r(); ++l)
      if (j != l && m.theta.is_a(j, l) != def.is_a(j, l)) {
        default_orient = false;
        break;
      }
  if (!default_orient) {
    os << "theta-orient explicit\n";
    for (int j = 0; j < m.r(); ++j) {
      for (int l = 0; l < m.r(); ++l) {
        if (l) os << ' ';
        os << (j == l ? 0 : int(m.theta.at(j, l)));
      }
      os << '\n';
    }
  }
  return os.str();
}

/// Load a bundle and run the full transformation pipeline (loaded
/// descriptors are never trusted: the transform re-verifies the base).
inline msr_code bundle_load(const std::string& text) {
  parsed_descriptor parsed = descriptor_parse(text);
  if (!parsed.is_bundle())
    fail(errc::parse_error, "descriptor has no transform directives");
  return transform(parsed.base, *parsed.perms, *parsed.theta);
}

}  // namespace msrforge
