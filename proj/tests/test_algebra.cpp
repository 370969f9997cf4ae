#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "cpn/algebra.hpp"
#include "cpn/selftest.hpp"

using namespace cpn;

namespace {

PetriNet single(const StructuralUnit& u) {
  PetriNet net;
  net.add_unit(u);
  return net;
}

}  // namespace

TEST_CASE("pf composes at a shared position") {
  SUBCASE("pf(C, C): one position, two outgoing arcs") {
    PetriNet net = pf({single(c_unit("b", "x")), single(c_unit("b", "y"))}, "b");
    CHECK(net.positions().size() == 1);
    CHECK(net.transitions().size() == 2);
    CHECK(net.arcs().size() == 2);
    CHECK(net.find_arc(UnitKind::C, "b", "x") != nullptr);
    CHECK(net.find_arc(UnitKind::C, "b", "y") != nullptr);
  }
  SUBCASE("pf(I, I): one position, two incoming arcs") {
    PetriNet net = pf({single(i_unit("x", "b")), single(i_unit("y", "b"))}, "b");
    CHECK(net.positions().size() == 1);
    CHECK(net.transitions().size() == 2);
    CHECK(net.find_arc(UnitKind::I, "b", "x") != nullptr);
    CHECK(net.find_arc(UnitKind::I, "b", "y") != nullptr);
  }
  SUBCASE("pf(I, C) = IC chain") {
    PetriNet net = pf({single(i_unit("x", "b")), single(c_unit("b", "y"))}, "b");
    CHECK(net.positions().size() == 1);
    CHECK(net.transitions().size() == 2);
    CHECK(net.find_arc(UnitKind::I, "b", "x") != nullptr);
    CHECK(net.find_arc(UnitKind::C, "b", "y") != nullptr);
  }
  SUBCASE("missing target") {
    CHECK_THROWS_AS(pf({single(c_unit("b", "x")), single(c_unit("q", "y"))}, "b"), Error);
  }
}

TEST_CASE("tf composes at a shared transition") {
  SUBCASE("tf(C, C): two inputs into one transition") {
    PetriNet net = tf({single(c_unit("x", "b")), single(c_unit("y", "b"))}, "b");
    CHECK(net.positions().size() == 2);
    CHECK(net.transitions().size() == 1);
    CHECK(net.find_arc(UnitKind::C, "x", "b") != nullptr);
    CHECK(net.find_arc(UnitKind::C, "y", "b") != nullptr);
  }
  SUBCASE("tf(I, I): two outputs out of one transition") {
    PetriNet net = tf({single(i_unit("b", "x")), single(i_unit("b", "y"))}, "b");
    CHECK(net.positions().size() == 2);
    CHECK(net.transitions().size() == 1);
    CHECK(net.find_arc(UnitKind::I, "x", "b") != nullptr);
    CHECK(net.find_arc(UnitKind::I, "y", "b") != nullptr);
  }
  SUBCASE("tf(C, I) = CI chain") {
    PetriNet net = tf({single(c_unit("a", "b")), single(i_unit("b", "c"))}, "b");
    CHECK(net.positions().size() == 2);
    CHECK(net.transitions().size() == 1);
    CHECK(net.find_arc(UnitKind::C, "a", "b") != nullptr);
    CHECK(net.find_arc(UnitKind::I, "c", "b") != nullptr);
  }
}

TEST_CASE("fusion parameter conflicts") {
  PetriNet marked1 = single(c_unit("b", "x"));
  marked1.set_marking("b", 5);
  PetriNet marked2 = single(c_unit("b", "y"));
  marked2.set_marking("b", 3);
  CHECK_THROWS_AS(pf({marked1, marked2}, "b"), Error);

  PetriNet equal2 = single(c_unit("b", "y"));
  equal2.set_marking("b", 5);
  PetriNet fused = pf({marked1, equal2}, "b");
  CHECK(fused.marking("b") == 5);

  PetriNet fast1 = single(c_unit("x", "b"));
  fast1.set_speed("b", 2);
  PetriNet fast2 = single(c_unit("y", "b"));
  fast2.set_speed("b", 3);
  CHECK_THROWS_AS(tf({fast1, fast2}, "b"), Error);
  PetriNet default2 = single(c_unit("y", "b"));
  CHECK(tf({fast1, default2}, "b").transition_info("b").speed == 2);
}

TEST_CASE("wf multiplies arc multiplicity") {
  PetriNet doubled = wf(c_unit("a", "b"), 2);
  REQUIRE(doubled.arcs().size() == 1);
  CHECK(doubled.arcs().front().multiplicity == 2);

  PetriNet quadrupled = wf(c_unit("a", "b", 2), 2);
  CHECK(quadrupled.arcs().front().multiplicity == 4);

  CHECK_THROWS_AS(wf(c_unit("a", "b"), 1), Error);

  // wf(u, n) equals adding u n times.
  PetriNet tripled = wf(i_unit("b", "c"), 3);
  PetriNet added;
  added.add_unit(i_unit("b", "c"));
  added.add_unit(i_unit("b", "c"));
  added.add_unit(i_unit("b", "c"));
  CHECK(labeled_equal(tripled, added));
}

TEST_CASE("build evaluates formulas bottom-up") {
  SUBCASE("CICI chain") {
    NetFormula cici = NetFormula::tfuse(
        {NetFormula::pfuse(
             {NetFormula::tfuse({NetFormula::lit(c_unit("a", "b")), NetFormula::lit(i_unit("b", "c"))}),
              NetFormula::lit(c_unit("c", "d"))}),
         NetFormula::lit(i_unit("d", "e"))});
    PetriNet net = build(cici);
    CHECK(net.positions().size() == 3);
    CHECK(net.transitions().size() == 2);
    CHECK(net.arcs().size() == 4);
    CHECK(net.find_arc(UnitKind::C, "a", "b") != nullptr);
    CHECK(net.find_arc(UnitKind::I, "c", "b") != nullptr);
    CHECK(net.find_arc(UnitKind::C, "c", "d") != nullptr);
    CHECK(net.find_arc(UnitKind::I, "e", "d") != nullptr);
  }
  SUBCASE("compose with an inhibitor gate") {
    PetriNet net = build(NetFormula::compose({NetFormula::lit(c_unit("a", "b")),
                                              NetFormula::lit(b_unit("i", "b")),
                                              NetFormula::lit(i_unit("b", "c"))}));
    CHECK(net.transitions().size() == 1);
    CHECK(net.find_arc(UnitKind::B, "i", "b") != nullptr);
    CHECK(net.find_arc(UnitKind::I, "c", "b") != nullptr);
  }
  SUBCASE("unit literal is the identity") {
    PetriNet net = build(NetFormula::lit(c_unit("a", "b")));
    CHECK(labeled_equal(net, single(c_unit("a", "b"))));
  }
  SUBCASE("whole-fusion formula") {
    PetriNet net = build(NetFormula::wfuse(c_unit("a", "b"), 2));
    CHECK(labeled_equal(net, wf(c_unit("a", "b"), 2)));
  }
  SUBCASE("target inference fails when nothing is shared") {
    NetFormula bad = NetFormula::pfuse(
        {NetFormula::lit(c_unit("a", "b")), NetFormula::lit(c_unit("c", "d"))});
    CHECK_THROWS_AS(build(bad), Error);
  }
}

TEST_CASE("pf and tf are commutative and associative in their operands") {
  std::mt19937_64 rng(3);
  std::vector<PetriNet> fragments = {single(c_unit("b", "x")), single(i_unit("y", "b")),
                                     single(c_unit("b", "z", 2))};
  PetriNet reference = pf(fragments, "b");
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(fragments.begin(), fragments.end(), rng);
    CHECK(labeled_equal(pf(fragments, "b"), reference));
  }
}

TEST_CASE("full defusion lists one unit per arc in canonical order") {
  PetriNet net;
  net.add_unit(i_unit("a", "b"));
  net.add_unit(c_unit("b", "c"));
  net.add_unit(i_unit("c", "e"));
  DefusionResult parts = defuse(net);
  CHECK_FALSE(parts.residual.has_value());
  auto units = parts.units();
  REQUIRE(units.size() == 3);
  CHECK(units[0] == i_unit("a", "b"));
  CHECK(units[1] == c_unit("b", "c"));
  CHECK(units[2] == i_unit("c", "e"));
}

TEST_CASE("partial defusion splits the outgoing arcs of the node") {
  PetriNet net;
  net.add_unit(i_unit("a", "b"));
  net.add_unit(c_unit("b", "c"));
  net.add_unit(i_unit("c", "e"));
  DefusionResult parts = defuse(net, std::optional<std::string>{"c"});
  REQUIRE(parts.residual.has_value());
  auto units = parts.units();
  REQUIRE(units.size() == 1);
  CHECK(units[0] == i_unit("c", "e"));
  CHECK(parts.residual->find_arc(UnitKind::I, "b", "a") != nullptr);
  CHECK(parts.residual->find_arc(UnitKind::C, "b", "c") != nullptr);
  CHECK(parts.residual->arcs().size() == 2);

  CHECK_THROWS_AS(defuse(net, std::optional<std::string>{"nope"}), Error);
}

TEST_CASE("defusion round trip including markings") {
  PetriNet net;
  net.add_unit(c_unit("a", "b"));
  net.add_unit(i_unit("b", "c"));
  net.set_marking("a", 5);
  net.set_marking("c", 2);
  net.set_speed("b", 2);
  CHECK(labeled_equal(rebuild(defuse(net)), net));
  CHECK(labeled_equal(rebuild(defuse(net, std::optional<std::string>{"b"})), net));
  CHECK(total_tokens(rebuild(defuse(net))) == 7);

  // Defusion never touches the source net.
  CHECK(net.marking("a") == 5);
  CHECK(net.arcs().size() == 2);
}

TEST_CASE("randomized defusion round trips") {
  auto report = selftest::roundtrip_defusion(200);
  CHECK(report.failures == 0);
}
