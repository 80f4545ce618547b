#include <catch2/catch_amalgamated.hpp>

#include "msrforge/repair.hpp"

using namespace msrforge;

namespace {

std::vector<std::vector<gf_vec>> random_instances(const msr_code& m, rng& gen) {
  std::vector<std::vector<gf_vec>> data(m.k(), std::vector<gf_vec>(m.r(), gf_vec(m.n())));
  for (auto& blocks : data)
    for (auto& v : blocks)
      for (auto& x : v) x = elem(gen.below(m.fld().q()));
  return data;
}

msr_code transformed(int r, unsigned q, bool per_helper, std::uint64_t seed = 0) {
  base_code base = make_eigen_base(r, q, seed);
  if (per_helper) base = perturb_repair_scalars(base, seed + 100);
  const field& f = base.fld();
  return transform(base, perm_family::cyclic(r),
                   theta_table::make_default(f, f.minus_one(), r));
}

bool node_restored(const msr_code& m, const msr_codeword& cw, int id,
                   const std::vector<gf_vec>& restored) {
  for (int l = 0; l < m.r(); ++l) {
    const gf_vec& want = id < m.k() ? cw.systematic[id][l] : cw.parity[id - m.k()][l];
    if (restored[l] != want) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("zero codeword repairs to zero with an optimal trace") {
  const msr_code m = transformed(2, 5, false);
  const std::vector<std::vector<gf_vec>> zero(
      m.k(), std::vector<gf_vec>(m.r(), gf_vec(m.n(), 0)));
  const auto cw = encode(m, zero);
  for (int id = 0; id < m.nodes(); ++id) {
    const auto [restored, trace] = repair_node(m, id, cw);
    for (const auto& v : restored) CHECK(v == gf_vec(m.n(), 0));
    CHECK(trace.optimal);
  }
}

TEST_CASE("every node of the transformed codes repairs exactly") {
  rng gen(1);
  for (const bool per_helper : {false, true}) {
    for (const int r : {2, 3}) {
      const msr_code m = transformed(r, r == 2 ? 5u : 7u, per_helper);
      for (int trial = 0; trial < 20; ++trial) {
        const auto data = random_instances(m, gen);
        const auto cw = encode(m, data);
        for (int id = 0; id < m.nodes(); ++id) {
          const auto [restored, trace] = repair_node(m, id, cw);
          INFO("r=" << r << " per_helper=" << per_helper << " node=" << id);
          CHECK(node_restored(m, cw, id, restored));
          CHECK(trace.optimal);
          CHECK(trace.total_downloaded ==
                static_cast<long long>(m.nodes() - 1) * m.n());
          for (const auto d : trace.downloaded) CHECK(d == m.n());
        }
      }
    }
  }
}

TEST_CASE("parity repair downloads exactly the failed node's instance column") {
  const msr_code m = transformed(3, 7, false);
  rng gen(2);
  const auto cw = encode(m, random_instances(m, gen));
  const int j = 0;
  const auto d = collect_parity_downloads(m, j, cw);
  for (int node = 0; node < m.nodes(); ++node) {
    if (node == m.k() + j) {
      CHECK(d.instance_block[node].empty());
      continue;
    }
    const gf_vec& want =
        node < m.k() ? cw.systematic[node][j] : cw.parity[node - m.k()][j];
    CHECK(d.instance_block[node] == want);
  }
}

TEST_CASE("parity repair has optimal access") {
  rng gen(3);
  for (const int r : {2, 3}) {
    const msr_code m = transformed(r, r == 2 ? 5u : 7u, false);
    const auto cw = encode(m, random_instances(m, gen));
    for (int j = 0; j < m.r(); ++j) {
      const auto [restored, trace] = repair_parity(m, j, cw);
      CHECK(node_restored(m, cw, m.k() + j, restored));
      CHECK(trace.access_optimal);
      for (const auto a : trace.accessed) CHECK(a == m.n());
    }
  }
}

TEST_CASE("systematic access counts follow the repair rows") {
  const msr_code m = transformed(2, 5, false);
  rng gen(4);
  const auto cw = encode(m, random_instances(m, gen));
  // node 0 downloads through the unit row (one column): r * 1 = N accessed
  const auto [r0, t0] = repair_systematic(m, 0, cw);
  CHECK(t0.access_optimal);
  // node 2 downloads through the all-ones row (N columns): r * N accessed
  const auto [r2, t2] = repair_systematic(m, 2, cw);
  CHECK_FALSE(t2.access_optimal);
  for (const auto a : t2.accessed) CHECK(a == static_cast<long long>(m.r()) * m.n());
}

TEST_CASE("repair without base repair matrices") {
  base_code base = make_eigen_base(2, 5, 0);
  base.repair = repair_kind::none;
  base.s.clear();
  const msr_code m = transform(base, perm_family::cyclic(2),
                               theta_table::make_default(base.fld(), 4, 2));
  rng gen(5);
  const auto cw = encode(m, random_instances(m, gen));

  SECTION("systematic repair is unavailable") {
    CHECK_THROWS_AS(repair_systematic(m, 0, cw), error);
    try {
      repair_systematic(m, 0, cw);
    } catch (const error& e) {
      CHECK(e.code() == errc::missing_repair_matrices);
    }
  }

  SECTION("parity repair still works with optimal access") {
    for (int j = 0; j < m.r(); ++j) {
      const auto [restored, trace] = repair_parity(m, j, cw);
      CHECK(node_restored(m, cw, m.k() + j, restored));
      CHECK(trace.optimal);
      CHECK(trace.access_optimal);
    }
  }
}

TEST_CASE("corrupting any downloaded symbol changes the repaired content") {
  const msr_code m = transformed(2, 5, false);
  rng gen(6);
  const auto data = random_instances(m, gen);
  const auto cw = encode(m, data);

  SECTION("systematic repair") {
    const int i = 0;
    const auto clean = repair_systematic_from(m, i, collect_systematic_downloads(m, i, cw));
    REQUIRE(node_restored(m, cw, i, clean));
    for (int node = 0; node < m.nodes(); ++node) {
      if (node == i) continue;
      for (int l = 0; l < m.r(); ++l) {
        auto d = collect_systematic_downloads(m, i, cw);
        d.pieces[node][l][0] = m.fld().add(d.pieces[node][l][0], 1);
        bool changed = false;
        try {
          changed = repair_systematic_from(m, i, d) != clean;
        } catch (const error&) {
          changed = true;
        }
        INFO("node=" << node << " piece=" << l);
        CHECK(changed);
      }
    }
  }

  SECTION("parity repair") {
    const int j = 1;
    const auto clean = repair_parity_from(m, j, collect_parity_downloads(m, j, cw));
    for (int node = 0; node < m.nodes(); ++node) {
      if (node == m.k() + j) continue;
      for (int t = 0; t < m.n(); ++t) {
        auto d = collect_parity_downloads(m, j, cw);
        d.instance_block[node][t] = m.fld().add(d.instance_block[node][t], 1);
        CHECK(repair_parity_from(m, j, d) != clean);
      }
    }
  }
}

TEST_CASE("trace line format") {
  const msr_code m = transformed(2, 5, false);
  rng gen(7);
  const auto cw = encode(m, random_instances(m, gen));
  const auto [restored, trace] = repair_node(m, 3, cw);
  CHECK(trace.to_line() ==
        "repair node=3 helpers=4 per_helper=2 total=8 optimal=true access_optimal=true");
}
