// Acceptance suite: runs every criterion end to end and prints one
// pass/fail line each. Exits nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "msrforge/msrforge.hpp"

using namespace msrforge;
namespace fs = std::filesystem;

namespace {

struct criterion {
  int number;
  std::string name;
  double budget_seconds;
  std::function<bool(std::string&)> run;
};

std::vector<std::vector<gf_vec>> random_instances(const msr_code& m, rng& gen) {
  std::vector<std::vector<gf_vec>> data(m.k(), std::vector<gf_vec>(m.r(), gf_vec(m.n())));
  for (auto& blocks : data)
    for (auto& v : blocks)
      for (auto& x : v) x = elem(gen.below(m.fld().q()));
  return data;
}

msr_code transformed(int r, unsigned q, std::uint64_t seed = 0) {
  const base_code base = make_eigen_base(r, q, seed);
  const field& f = base.fld();
  const elem a = f.kind() == field_kind::prime ? f.minus_one() : elem(2);
  return transform(base, perm_family::cyclic(r), theta_table::make_default(f, a, r));
}

bool node_restored(const msr_code& m, const msr_codeword& cw, int id,
                   const std::vector<gf_vec>& restored) {
  for (int l = 0; l < m.r(); ++l) {
    const gf_vec& want = id < m.k() ? cw.systematic[id][l] : cw.parity[id - m.k()][l];
    if (restored[l] != want) return false;
  }
  return true;
}

// shared across criteria 3-5 so the repair sweep runs once
struct repair_sweep_result {
  bool restored_ok = true;
  bool bandwidth_ok = true;
  bool parity_access_ok = true;
  bool ran = false;
};

repair_sweep_result& repair_sweep() {
  static repair_sweep_result res;
  if (res.ran) return res;
  res.ran = true;
  for (const int r : {2, 3}) {
    const msr_code m = transformed(r, r == 2 ? 5u : 7u);
    rng gen(2024);
    for (int trial = 0; trial < 100; ++trial) {
      const auto data = random_instances(m, gen);
      const auto cw = encode(m, data);
      for (int id = 0; id < m.nodes(); ++id) {
        const auto [restored, trace] = repair_node(m, id, cw);
        if (!node_restored(m, cw, id, restored)) res.restored_ok = false;
        if (!trace.optimal ||
            trace.total_downloaded != static_cast<long long>(m.nodes() - 1) * m.n())
          res.bandwidth_ok = false;
        for (const auto d : trace.downloaded)
          if (d != m.n()) res.bandwidth_ok = false;
        if (id >= m.k()) {
          if (!trace.access_optimal) res.parity_access_ok = false;
          for (const auto a : trace.accessed)
            if (a != m.n()) res.parity_access_ok = false;
        }
      }
    }
  }
  return res;
}

bool criterion_blueprint(std::string& note) {
  const auto lines = format_blueprint(perm_family::cyclic(3),
                                      theta_orientation::make_default(3), "-1");
  const std::vector<std::string> want = {
      "P0 I0: g0^(0)",          "P0 I1: -g1^(1) + g1^(0)", "P0 I2: -g2^(2) + g2^(0)",
      "P1 I0: g1^(0) + g1^(1)", "P1 I1: g2^(1)",           "P1 I2: -g0^(2) + g0^(1)",
      "P2 I0: g2^(0) + g2^(2)", "P2 I1: g0^(1) + g0^(2)",  "P2 I2: g1^(2)"};
  if (lines != want) {
    note = "layout mismatch";
    return false;
  }
  note = "all nine cells match";
  return true;
}

bool criterion_certification(std::string& note) {
  for (const int r : {2, 3}) {
    const auto start = std::chrono::steady_clock::now();
    const base_code c = make_eigen_base(r, r == 2 ? 5u : 7u, 0);
    const bool ok = verify_mds(c).ok() && verify_repair(c).ok();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!ok) {
      note = "verifier failed for r=" + std::to_string(r);
      return false;
    }
    if (seconds > 5.0) {
      note = "r=" + std::to_string(r) + " took over 5s";
      return false;
    }
  }
  note = "(5,3) and (7,4) certified, each under 5s";
  return true;
}

bool criterion_repair_roundtrip(std::string& note) {
  if (!repair_sweep().restored_ok) {
    note = "some node repair differed from the original";
    return false;
  }
  note = "100 codewords x all nodes x both codes, bit-exact";
  return true;
}

bool criterion_bandwidth(std::string& note) {
  if (!repair_sweep().bandwidth_ok) {
    note = "a repair moved more or less than (k+r-1)*N";
    return false;
  }
  note = "every repair moved exactly (k+r-1)*N symbols, N per helper";
  return true;
}

bool criterion_parity_access(std::string& note) {
  if (!repair_sweep().parity_access_ok) {
    note = "a parity repair accessed more than N symbols at a helper";
    return false;
  }
  note = "every parity repair accessed exactly N symbols per helper";
  return true;
}

bool criterion_case_split(std::string& note) {
  const base_code base = make_eigen_base(2, 5, 0);
  const field& f = base.fld();
  const base_code ph = perturb_repair_scalars(base, 77);
  const auto theta = theta_table::make_default(f, 4, 2);

  // per-helper matrices with symmetric permutations repair exactly
  const msr_code m2 = transform(ph, perm_family::cyclic(2), theta);
  rng gen(6);
  for (int trial = 0; trial < 20; ++trial) {
    const auto data = random_instances(m2, gen);
    const auto cw = encode(m2, data);
    for (int i = 0; i < m2.k(); ++i) {
      const auto [restored, trace] = repair_systematic(m2, i, cw);
      if (!node_restored(m2, cw, i, restored)) {
        note = "case (ii) repair mismatch";
        return false;
      }
    }
  }

  // per-helper matrices with a non-symmetric family are rejected
  const auto ids = perm_family::from_rows({{0, 1}, {0, 1}});
  try {
    transform(ph, ids, theta);
    note = "asymmetric + per-helper was not rejected";
    return false;
  } catch (const error& e) {
    if (e.code() != errc::asymmetric_perms_with_per_helper_repair) {
      note = std::string("wrong rejection: ") + e.what();
      return false;
    }
  }

  // uniform matrices accept any permutations and still repair
  const msr_code m1 = transform(base, ids, theta);
  for (int trial = 0; trial < 20; ++trial) {
    const auto data = random_instances(m1, gen);
    const auto cw = encode(m1, data);
    for (int i = 0; i < m1.k(); ++i) {
      const auto [restored, trace] = repair_systematic(m1, i, cw);
      if (!node_restored(m1, cw, i, restored)) {
        note = "case (i) repair mismatch under non-symmetric permutations";
        return false;
      }
    }
  }
  note = "case (ii) exact, asymmetric rejected, case (i) exact";
  return true;
}

bool criterion_mds_exhaustive(std::string& note) {
  for (const int r : {2, 3}) {
    const msr_code m = transformed(r, r == 2 ? 5u : 7u);
    rng gen(7);
    const auto data = random_instances(m, gen);
    const auto cw = encode(m, data);
    int subsets = 0;
    bool ok = true;
    detail::for_each_combination(m.nodes(), m.k(), [&](const std::vector<int>& take) {
      std::vector<std::optional<gf_vec>> nodes(m.nodes());
      for (int id : take) nodes[id] = node_content(cw, id);
      const auto got = reconstruct(m, nodes);
      if (got != data || oracle_reconstruct(m, nodes) != got) ok = false;
      ++subsets;
    });
    if (!ok || subsets != (r == 2 ? 10 : 35)) {
      note = "subset sweep failed for r=" + std::to_string(r);
      return false;
    }
  }
  note = "10 + 35 subsets equal the source and the oracle";
  return true;
}

bool criterion_matrix_view(std::string& note) {
  for (const int r : {2, 3}) {
    const msr_code m = transformed(r, r == 2 ? 5u : 7u);
    const auto rep = check_full(m, 1, 100);  // 100 random encode comparisons
    if (!rep.ok()) {
      note = "check_full failed for r=" + std::to_string(r) + " (" +
             (rep.failures.empty() ? "?" : rep.failures.front().condition) + ")";
      return false;
    }
  }
  note = "encode equivalence, closed form, and both rank displays hold";
  return true;
}

bool criterion_negative_controls(std::string& note) {
  // a = 1 must be rejected
  try {
    theta_table::make_default(field(5), 1, 2);
    note = "a=1 accepted";
    return false;
  } catch (const error& e) {
    if (e.code() != errc::invalid_a) {
      note = "a=1 rejected with the wrong class";
      return false;
    }
  }

  // an interference-cancellation violation must corrupt a repair
  base_code broken = make_eigen_base(2, 5, 0);
  broken.a[1][2] = matrix::from_rows(broken.fld(), {{1, 1}, {0, 1}});
  if (verify_repair(broken).ok()) {
    note = "tampered base still verified";
    return false;
  }
  rng gen(8);
  bool wrong = false;
  for (int trial = 0; trial < 10 && !wrong; ++trial) {
    std::vector<gf_vec> src(broken.k(), gf_vec(std::size_t(broken.n())));
    for (auto& v : src)
      for (auto& x : v) x = elem(gen.below(5));
    std::vector<gf_vec> nodes = src;
    for (auto& g : base_encode(broken, src)) nodes.push_back(std::move(g));
    try {
      if (base_repair_systematic(broken, 0, collect_base_repair(broken, 0, nodes)) !=
          src[0])
        wrong = true;
    } catch (const error&) {
      wrong = true;
    }
  }
  if (!wrong) {
    note = "repair absorbed the rank violation";
    return false;
  }

  // a tampered block grid must trip the full checker with a witness
  const msr_code m = transformed(2, 5);
  auto blocks = build_coding_blocks(m);
  blocks[0][1].set(1, 2, m.fld().add(blocks[0][1].at(1, 2), 1));
  const auto rep = check_full(m, blocks, 1, 5);
  if (rep.ok() || rep.failures.empty()) {
    note = "tampered block grid passed the checker";
    return false;
  }
  note = "a=1 rejected, broken cancellation detected, tampered grid witnessed";
  return true;
}

bool criterion_file_roundtrip(std::string& note) {
  const msr_code m = transformed(2, 256, 1);
  const fs::path dir = fs::temp_directory_path() / "msrforge_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const fs::path input = dir / "input.bin";
  {
    std::ofstream out(input, std::ios::binary);
    rng gen(31337);
    for (int i = 0; i < (1 << 20); ++i) out.put(char(gen.below(256)));
  }
  encode_file(m, input.string(), (dir / "chunks").string(), "input");

  // lose one systematic and, in a second pass, one parity chunk
  for (const int victim : {1, m.k()}) {
    fs::remove(dir / "chunks" / ("input.node" + std::to_string(victim) + ".bin"));
    const auto trace = repair_chunk(m, (dir / "chunks").string(), "input", victim);
    if (!trace.optimal) {
      note = "chunk repair was not bandwidth-optimal";
      return false;
    }
  }

  std::vector<int> take;
  for (int id = m.nodes() - 1; int(take.size()) < m.k(); --id) take.push_back(id);
  reconstruct_file(m, (dir / "chunks").string(), "input", take, (dir / "restored.bin").string());

  std::ifstream a(input, std::ios::binary), b(dir / "restored.bin", std::ios::binary);
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  if (sa != sb || sa.size() != std::size_t(1 << 20)) {
    note = "restored file differs";
    return false;
  }
  note = "1 MiB encode -> repair x2 -> reconstruct, byte-identical";
  return true;
}

}  // namespace

int main() {
  const std::vector<criterion> criteria = {
      {1, "golden parity layout (r=3, cyclic, a=-1)", 1.0, criterion_blueprint},
      {2, "base-code certification (5,3) and (7,4)", 10.0, criterion_certification},
      {3, "all-node repair round-trip", 30.0, criterion_repair_roundtrip},
      {4, "bandwidth optimality of every repair", 30.0, criterion_bandwidth},
      {5, "access optimality of parity repair", 30.0, criterion_parity_access},
      {6, "repair-matrix case split", 30.0, criterion_case_split},
      {7, "exhaustive reconstruction vs oracle", 60.0, criterion_mds_exhaustive},
      {8, "matrix-view equivalence and rank displays", 60.0, criterion_matrix_view},
      {9, "negative controls", 30.0, criterion_negative_controls},
      {10, "file round-trip under a GF(256) bundle", 30.0, criterion_file_roundtrip},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    std::string note;
    bool ok = false;
    const auto start = std::chrono::steady_clock::now();
    try {
      ok = c.run(note);
    } catch (const std::exception& e) {
      note = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > c.budget_seconds) {
      ok = false;
      note += " [exceeded " + std::to_string(c.budget_seconds) + "s budget]";
    }
    std::printf("[%s] criterion %2d: %s (%.3fs) %s\n", ok ? "PASS" : "FAIL", c.number,
                c.name.c_str(), seconds, note.c_str());
    if (!ok) ++failures;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures ? 1 : 0;
}
