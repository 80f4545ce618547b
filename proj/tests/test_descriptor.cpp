#include <catch2/catch_amalgamated.hpp>

#include "msrforge/descriptor.hpp"

using namespace msrforge;

namespace {

const char* kCanonicalBase =
    "msrforge-base 1\n"
    "field 5\n"
    "params 2 2 2\n"
    "A 0 0\n"
    "1 0\n"
    "0 1\n"
    "A 0 1\n"
    "1 0\n"
    "0 1\n"
    "A 1 0\n"
    "1 0\n"
    "0 1\n"
    "A 1 1\n"
    "2 0\n"
    "0 3\n"
    "Su 0\n"
    "1 0\n"
    "Su 1\n"
    "0 1\n";

}  // namespace

TEST_CASE("canonical fixture round-trips through load and save") {
  const base_code c = descriptor_load(kCanonicalBase);
  CHECK(c.k() == 2);
  CHECK(c.r() == 2);
  CHECK(c.n() == 2);
  CHECK(c.repair == repair_kind::uniform);
  CHECK(c.coding(1, 1) == matrix::from_rows(c.fld(), {{2, 0}, {0, 3}}));
  CHECK(descriptor_save(c) == kCanonicalBase);
}

TEST_CASE("load inverts save for generated codes") {
  for (const bool perturbed : {false, true}) {
    base_code c = make_eigen_base(2, 5, 3);
    if (perturbed) c = perturb_repair_scalars(c, 5);
    CHECK(descriptor_load(descriptor_save(c)) == c);
  }
  // binary-extension field line carries the modulus
  const base_code c256 = make_eigen_base(2, 256, 1);
  const std::string text = descriptor_save(c256);
  CHECK(text.find("field 256 285") != std::string::npos);
  CHECK(descriptor_load(text) == c256);
}

TEST_CASE("comments and blank lines are ignored") {
  std::string text = std::string("# header comment\n") + kCanonicalBase + "\n# trailing\n";
  text.insert(text.find("params"), "   \n# mid comment\n");
  CHECK(descriptor_load(text) == descriptor_load(kCanonicalBase));
}

TEST_CASE("descriptor without a repair section loads with repair = none") {
  std::string text(kCanonicalBase);
  text.erase(text.find("Su 0"));
  const base_code c = descriptor_load(text);
  CHECK(c.repair == repair_kind::none);
  CHECK_FALSE(c.has_repair());
}

TEST_CASE("parse errors carry line numbers") {
  SECTION("bad header") {
    try {
      descriptor_load("msrforge-base 2\n");
      FAIL("expected ParseError");
    } catch (const error& e) {
      CHECK(e.code() == errc::parse_error);
      CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
  }
  SECTION("entry outside the field") {
    std::string text(kCanonicalBase);
    text.replace(text.find("2 0\n"), 4, "7 0\n");
    try {
      descriptor_load(text);
      FAIL("expected ValueOutOfField");
    } catch (const error& e) {
      CHECK(e.code() == errc::value_out_of_field);
      CHECK(std::string(e.what()).find("line 14") != std::string::npos);
    }
  }
  SECTION("missing matrix") {
    std::string text(kCanonicalBase);
    text.erase(text.find("A 1 1"), std::string("A 1 1\n2 0\n0 3\n").size());
    CHECK_THROWS_AS(descriptor_load(text), error);
  }
  SECTION("unknown directive") {
    try {
      descriptor_load(std::string(kCanonicalBase) + "garbage 1\n");
      FAIL("expected ParseError");
    } catch (const error& e) {
      CHECK(e.code() == errc::parse_error);
    }
  }
}

TEST_CASE("bundles carry perm and theta directives") {
  const base_code base = make_eigen_base(2, 5, 3);
  const msr_code m = transform(base, perm_family::cyclic(2),
                               theta_table::make_default(base.fld(), 4, 2));
  const std::string text = bundle_save(m);
  CHECK(text.find("perm cyclic\n") != std::string::npos);
  CHECK(text.find("theta 4\n") != std::string::npos);

  const msr_code loaded = bundle_load(text);
  CHECK(loaded.base == m.base);
  CHECK(loaded.perms.p == m.perms.p);
  CHECK(loaded.theta.t == m.theta.t);
  CHECK(bundle_save(loaded) == text);
}

TEST_CASE("explicit permutations and orientations round-trip") {
  const base_code base = make_eigen_base(2, 5, 3);
  const auto perms = perm_family::from_rows({{1, 0}, {0, 1}});
  theta_orientation orient;
  orient.a_at = {{0, 0}, {1, 0}};  // a sits at (1,0) instead of (0,1)
  const msr_code m =
      transform(base, perms, theta_table::make_oriented(base.fld(), 4, orient));
  const std::string text = bundle_save(m);
  CHECK(text.find("perm explicit\n") != std::string::npos);
  CHECK(text.find("theta-orient explicit\n") != std::string::npos);
  const msr_code loaded = bundle_load(text);
  CHECK(loaded.perms.p == m.perms.p);
  CHECK(loaded.theta.t == m.theta.t);
  CHECK(bundle_save(loaded) == text);
}

TEST_CASE("a bundle with only one transform directive is rejected") {
  const std::string text = std::string(kCanonicalBase) + "perm cyclic\n";
  try {
    descriptor_parse(text);
    FAIL("expected ParseError");
  } catch (const error& e) {
    CHECK(e.code() == errc::parse_error);
  }
}

TEST_CASE("descriptor_load rejects bundle text") {
  const base_code base = make_eigen_base(2, 5, 3);
  const msr_code m = transform(base, perm_family::cyclic(2),
                               theta_table::make_default(base.fld(), 4, 2));
  CHECK_THROWS_AS(descriptor_load(bundle_save(m)), error);
}

TEST_CASE("loaded bundles are re-verified by the transform") {
  const base_code base = make_eigen_base(2, 5, 3);
  const msr_code m = transform(base, perm_family::cyclic(2),
                               theta_table::make_default(base.fld(), 4, 2));
  std::string text = bundle_save(m);
  // tamper one coding-matrix entry so the MDS sweep must fail
  const auto pos = text.find("A 0 0\n");
  REQUIRE(pos != std::string::npos);
  text.replace(pos + 6, 1, "0");
  text.replace(pos + 8, 1, "0");
  try {
    bundle_load(text);
    FAIL("expected UnverifiedBase");
  } catch (const error& e) {
    CHECK(e.code() == errc::unverified_base);
  }
}
