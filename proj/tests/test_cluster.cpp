#include <catch2/catch_amalgamated.hpp>

#include "msrforge/cluster.hpp"

using namespace msrforge;

namespace {

msr_code transformed(int r, unsigned q, std::uint64_t seed = 0) {
  const base_code base = make_eigen_base(r, q, seed);
  const field& f = base.fld();
  return transform(base, perm_family::cyclic(r),
                   theta_table::make_default(f, f.minus_one(), r));
}

}  // namespace

TEST_CASE("an empty cluster is healthy and idle") {
  cluster cl(transformed(2, 5), 0, 1);
  CHECK(cl.stripes() == 0);
  for (int id = 0; id < cl.node_count(); ++id) CHECK(cl.alive(id));
  const auto m = cl.metrics_report();
  CHECK(m.repairs_run == 0);
  CHECK(m.symbols_moved == 0);
}

TEST_CASE("each node stores stripes * rN symbols") {
  cluster cl(transformed(2, 5), 100, 1);
  for (int id = 0; id < cl.node_count(); ++id) {
    long total = 0;
    for (const auto& blk : cl.node_store(id)) total += long(blk.size());
    CHECK(total == 400);  // 100 * rN with rN = 4
  }
}

TEST_CASE("read-back of every stripe equals the source") {
  const msr_code code = transformed(2, 5);
  cluster cl(code, 25, 7);
  const gf_vec src = cluster::random_source(code, 25, 7);
  const int stripe_symbols = code.k() * code.node_capacity();
  for (int st = 0; st < 25; ++st)
    CHECK(cl.degrade_read(st) == vec_slice(src, st * stripe_symbols, stripe_symbols));
}

TEST_CASE("fail and repair restores bit-exact content with exact accounting") {
  const msr_code code = transformed(2, 5);
  const int stripes = 20;
  for (int victim = 0; victim < code.nodes(); ++victim) {
    cluster cl(code, stripes, 3);
    const auto before = cl.node_store(victim);
    cl.fail_node(victim);
    CHECK_FALSE(cl.alive(victim));
    const auto trace = cl.repair_failed(victim);
    CHECK(cl.alive(victim));
    CHECK(cl.node_store(victim) == before);
    CHECK(trace.optimal);
    CHECK(trace.total_downloaded ==
          static_cast<long long>(stripes) * (code.nodes() - 1) * code.n());
    if (victim >= code.k()) CHECK(trace.access_optimal);
  }
}

TEST_CASE("state machine errors") {
  cluster cl(transformed(2, 5), 4, 9);

  SECTION("repair on a healthy cluster") {
    CHECK_THROWS_AS(cl.repair_failed(0), error);
    try {
      cl.repair_failed(0);
    } catch (const error& e) {
      CHECK(e.code() == errc::not_failed);
    }
  }

  SECTION("double failure of the same node") {
    cl.fail_node(1);
    try {
      cl.fail_node(1);
      FAIL("expected AlreadyFailed");
    } catch (const error& e) {
      CHECK(e.code() == errc::already_failed);
    }
  }

  SECTION("repair with two concurrent failures") {
    cl.fail_node(0);
    cl.fail_node(3);
    try {
      cl.repair_failed(0);
      FAIL("expected TooManyFailures");
    } catch (const error& e) {
      CHECK(e.code() == errc::too_many_failures);
    }
  }
}

TEST_CASE("degraded reads survive up to r failures") {
  const msr_code code = transformed(2, 5);
  cluster cl(code, 10, 11);
  const gf_vec src = cluster::random_source(code, 10, 11);
  const int stripe_symbols = code.k() * code.node_capacity();

  cl.fail_node(0);
  cl.fail_node(3);  // r = 2 failures: worst case
  for (int st = 0; st < 10; ++st)
    CHECK(cl.degrade_read(st) == vec_slice(src, st * stripe_symbols, stripe_symbols));

  cl.fail_node(1);  // r+1 failures
  try {
    cl.degrade_read(0);
    FAIL("expected TooManyFailures");
  } catch (const error& e) {
    CHECK(e.code() == errc::too_many_failures);
  }
}

TEST_CASE("metrics after a full failure/repair cycle over all nodes") {
  const msr_code code = transformed(2, 5);
  const int stripes = 8;
  cluster cl(code, stripes, 13);
  for (int id = 0; id < code.nodes(); ++id) {
    cl.fail_node(id);
    const auto trace = cl.repair_failed(id);
    CHECK(trace.optimal);
  }
  const auto m = cl.metrics_report();
  CHECK(m.repairs_run == code.nodes());
  CHECK(m.symbols_moved == m.optimal_moved);  // ratio exactly 1
  CHECK(m.naive_per_stripe == long(code.k()) * code.node_capacity());
  CHECK(m.optimal_per_stripe == long(code.nodes() - 1) * code.n());
  for (int id = 0; id < code.nodes(); ++id) {
    CHECK(m.per_node[id].repairs == 1);
    CHECK(m.per_node[id].moved == m.per_node[id].optimal_moved);
  }
  // the text and kv reports agree on the headline numbers
  const std::string text = m.to_text();
  CHECK(text.find("repairs_run=5") != std::string::npos);
  CHECK(text.find("bandwidth_ratio=1.000") != std::string::npos);
  const std::string kv = m.to_kv();
  CHECK(kv.find("repairs_run=5\n") != std::string::npos);
  CHECK(kv.find("node0.repairs=1\n") != std::string::npos);
}

TEST_CASE("metrics are deterministic in the seed and operation sequence") {
  const msr_code code = transformed(2, 5);
  auto run = [&] {
    cluster cl(code, 6, 21);
    cl.fail_node(2);
    cl.repair_failed(2);
    cl.fail_node(4);
    cl.repair_failed(4);
    return cl.metrics_report().to_kv();
  };
  CHECK(run() == run());
}

TEST_CASE("degraded reads also cover the per-helper variant") {
  const base_code base = perturb_repair_scalars(make_eigen_base(3, 7, 0), 5);
  const msr_code code = transform(base, perm_family::cyclic(3),
                                  theta_table::make_default(base.fld(), 6, 3));
  cluster cl(code, 5, 17);
  const gf_vec src = cluster::random_source(code, 5, 17);
  cl.fail_node(1);
  cl.fail_node(4);
  cl.fail_node(6);  // three failures, r = 3
  const int stripe_symbols = code.k() * code.node_capacity();
  for (int st = 0; st < 5; ++st)
    CHECK(cl.degrade_read(st) == vec_slice(src, st * stripe_symbols, stripe_symbols));
}
