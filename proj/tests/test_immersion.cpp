#include <doctest.h>

#include <cmath>

#include "support.hpp"

using namespace dsurf;

namespace {

const char* kPlane = R"(# a comment line
name: plane
params: u v
x1: u
x2: v   # trailing comment
x3: 0
x4: 0
domain: u -1 1 v -1 1
periodic: false false
)";

std::string without(const std::string& key) {
  std::string out;
  size_t start = 0;
  const std::string text = kPlane;
  while (start < text.size()) {
    const size_t end = text.find('\n', start);
    const std::string line = text.substr(start, end - start);
    if (line.rfind(key + ":", 0) != 0) out += line + "\n";
    start = end + 1;
  }
  return out;
}

}  // namespace

TEST_CASE("bundled clifford torus") {
  const ImmersionSpec spec = testing::load("clifford");
  CHECK(spec.name == "clifford");
  CHECK(spec.periodic[0]);
  CHECK(spec.periodic[1]);
  CHECK(spec.domain[0].lo == 0);
  CHECK(spec.domain[0].hi == doctest::Approx(2 * M_PI).epsilon(1e-15));
  CHECK(spec.domain[1].hi == doctest::Approx(2 * M_PI).epsilon(1e-15));
  CHECK_FALSE(spec.has_frame_rotation);
  CHECK(is_constant(spec.frame_rotation));
  CHECK(eval(spec.frame_rotation, Vec2(1, 2)) == 0);
}

TEST_CASE("frame rotation expression") {
  const ImmersionSpec spec = testing::load("clifford-rotated");
  REQUIRE(spec.has_frame_rotation);
  REQUIRE(spec.frame_rotation.root().kind == ExprNode::Kind::Param);
  CHECK(spec.frame_rotation.root().param == 0);
}

TEST_CASE("every bundled file parses") {
  for (const char* name : {"plane", "plane-torus", "graph", "sphere", "clifford", "clifford-rotated",
                           "torus-revolution"}) {
    CAPTURE(name);
    CHECK_NOTHROW(testing::load(name));
  }
}

TEST_CASE("inline text with comments") {
  const ImmersionSpec spec = parse_immersion(kPlane);
  CHECK(spec.params[0] == "u");
  CHECK(spec.domain[0].lo == -1);
  CHECK_FALSE(spec.periodic[0]);
}

TEST_CASE("missing keys") {
  CHECK_THROWS_WITH_AS(parse_immersion(without("x3")), "missing key: x3", ParseError);
  CHECK_THROWS_WITH_AS(parse_immersion(without("domain")), "missing key: domain", ParseError);
}

TEST_CASE("layout errors") {
  const std::string base = kPlane;
  CHECK_THROWS_WITH_AS(parse_immersion(base + "x1: v\n"), doctest::Contains("duplicate key: x1"), ParseError);
  CHECK_THROWS_WITH_AS(parse_immersion(base + "colour: red\n"), doctest::Contains("unknown key"), ParseError);
  CHECK_THROWS_WITH_AS(parse_immersion(base + "just text\n"), doctest::Contains("key: value"), ParseError);
  CHECK_THROWS_AS(parse_immersion(without("domain") + "domain: u 1 -1 v 0 1\n"), ParseError);
  CHECK_THROWS_AS(parse_immersion(without("domain") + "domain: u 0 1 w 0 1\n"), ParseError);
  CHECK_THROWS_AS(parse_immersion(without("domain") + "domain: u 0 1 v 0\n"), ParseError);
  CHECK_THROWS_AS(parse_immersion(without("domain") + "domain: u 0 u v 0 1\n"), ParseError);
  CHECK_THROWS_AS(parse_immersion(without("periodic") + "periodic: yes no\n"), ParseError);
  CHECK_THROWS_AS(load_immersion("/nonexistent/file.imm"), ParseError);
}

TEST_CASE("expression errors are reported with the file line") {
  try {
    parse_immersion(without("x2") + "x2: v + * u\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 9);
    CHECK(e.column() == 9);
  }
  CHECK_THROWS_WITH_AS(parse_immersion(without("x4") + "x4: s\n"), doctest::Contains("unknown identifier: s"),
                       ParseError);
}
