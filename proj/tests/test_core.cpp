#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "cpn/core.hpp"

using namespace cpn;

TEST_CASE("new net is empty") {
  PetriNet net = new_net();
  CHECK(net.positions().empty());
  CHECK(net.transitions().empty());
  CHECK(net.arcs().empty());
  CHECK(total_tokens(net) == 0);
  CHECK(labeled_equal(new_net(), new_net()));
}

TEST_CASE("add_unit fuses by identifier matching") {
  PetriNet net;
  net.add_unit(c_unit("a", "b"));
  net.add_unit(i_unit("b", "c"));
  CHECK(net.positions().size() == 2);
  CHECK(net.transitions().size() == 1);
  CHECK(net.arcs().size() == 2);
  CHECK(net.has_position("a"));
  CHECK(net.has_transition("b"));
  CHECK(net.has_position("c"));
  CHECK(net.find_arc(UnitKind::C, "a", "b") != nullptr);
  CHECK(net.find_arc(UnitKind::I, "c", "b") != nullptr);
}

TEST_CASE("adding the same unit twice is whole-fusion") {
  PetriNet net;
  net.add_unit(c_unit("a", "b"));
  net.add_unit(c_unit("a", "b"));
  REQUIRE(net.arcs().size() == 1);
  CHECK(net.arcs().front().multiplicity == 2);
  CHECK(net.arcs().front().effective_threshold() == 2);
}

TEST_CASE("disjoint units stay disjoint") {
  PetriNet net;
  net.add_unit(c_unit("a", "b"));
  net.add_unit(c_unit("c", "d"));
  net.add_unit(c_unit("e", "f"));
  CHECK(net.positions().size() == 3);
  CHECK(net.transitions().size() == 3);
  CHECK(net.arcs().size() == 3);
  CHECK(component_count(net) == 3);
}

TEST_CASE("namespace clashes are rejected") {
  PetriNet net;
  CHECK_THROWS_AS(net.add_unit(c_unit("a", "a")), Error);
  net.add_unit(c_unit("a", "b"));
  CHECK_THROWS_AS(net.add_unit(c_unit("b", "x")), Error);   // b is a transition
  CHECK_THROWS_AS(net.add_unit(c_unit("x", "a")), Error);   // a is a position
  try {
    net.add_unit(c_unit("b", "x"));
    FAIL("expected a NamespaceClash");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NamespaceClash);
  }
}

TEST_CASE("total_tokens sums markings") {
  PetriNet net;
  net.add_unit(c_unit("a", "b"));
  net.add_unit(i_unit("b", "c"));
  net.set_marking("a", 5);
  net.set_marking("c", 2);
  CHECK(total_tokens(net) == 7);
}

TEST_CASE("labeled_equal distinguishes multiplicity") {
  PetriNet x;
  x.add_unit(c_unit("a", "b"));
  PetriNet y;
  y.add_unit(c_unit("a", "b", 2));
  CHECK(labeled_equal(x, x));
  CHECK_FALSE(labeled_equal(x, y));
}

TEST_CASE("threshold merge rules") {
  PetriNet net;
  net.add_unit(c_unit("a", "b", 1, 3));
  net.add_unit(c_unit("a", "b"));  // defaulted threshold merges silently
  REQUIRE(net.arcs().size() == 1);
  CHECK(net.arcs().front().multiplicity == 2);
  CHECK(net.arcs().front().effective_threshold() == 3);
  CHECK_THROWS_AS(net.add_unit(c_unit("a", "b", 1, 5)), Error);
}

TEST_CASE("endpoint classification") {
  SUBCASE("resource entry, accumulative end") {
    PetriNet net;
    net.add_unit(c_unit("a", "b"));
    net.add_unit(i_unit("b", "c"));
    auto classes = classify_endpoints(net);
    REQUIRE(classes.size() == 2);
    CHECK(classes[0] == std::pair<std::string, EndpointClass>{"a", EndpointClass::ResourceEntry});
    CHECK(classes[1] ==
          std::pair<std::string, EndpointClass>{"c", EndpointClass::AccumulativeEnd});
  }
  SUBCASE("process entry, stock end") {
    PetriNet net;
    net.add_unit(i_unit("b", "c"));
    net.add_unit(c_unit("c", "d"));
    auto classes = classify_endpoints(net);
    REQUIRE(classes.size() == 2);
    CHECK(classes[0] == std::pair<std::string, EndpointClass>{"b", EndpointClass::ProcessEntry});
    CHECK(classes[1] == std::pair<std::string, EndpointClass>{"d", EndpointClass::StockEnd});
  }
  SUBCASE("procreating a t-unit in front of an entry flips it") {
    PetriNet net;
    net.add_unit(c_unit("a", "b"));
    net.add_unit(i_unit("b", "c"));
    net.add_unit(i_unit("x", "a"));
    auto classes = classify_endpoints(net);
    bool a_entry = false, x_process = false;
    for (const auto& [id, cls] : classes) {
      if (id == "a" && cls == EndpointClass::ResourceEntry) a_entry = true;
      if (id == "x" && cls == EndpointClass::ProcessEntry) x_process = true;
    }
    CHECK_FALSE(a_entry);
    CHECK(x_process);
  }
  SUBCASE("gates do not make a transition a consumer") {
    PetriNet net;
    net.add_unit(b_unit("i", "b"));
    net.add_unit(i_unit("b", "c"));
    auto classes = classify_endpoints(net);
    bool b_process = false;
    for (const auto& [id, cls] : classes)
      if (id == "b" && cls == EndpointClass::ProcessEntry) b_process = true;
    CHECK(b_process);
  }
}

TEST_CASE("add_unit order never changes the result") {
  std::mt19937_64 rng(7);
  std::vector<StructuralUnit> units = {
      c_unit("a", "b"), i_unit("b", "c"), c_unit("c", "d", 2), b_unit("i", "b"),
      a_unit("l", "d"), i_unit("d", "e"), c_unit("a", "b"),
  };
  PetriNet reference;
  for (const auto& u : units) reference.add_unit(u);
  for (int trial = 0; trial < 50; ++trial) {
    std::shuffle(units.begin(), units.end(), rng);
    PetriNet net;
    for (const auto& u : units) net.add_unit(u);
    CHECK(labeled_equal(net, reference));
  }
}

TEST_CASE("n additions equal one n-fold addition") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 1 + static_cast<int>(rng() % 4);
    PetriNet repeated;
    for (int i = 0; i < n; ++i) repeated.add_unit(i_unit("t", "p"));
    PetriNet once;
    once.add_unit(i_unit("t", "p", n));
    CHECK(labeled_equal(repeated, once));
  }
}

TEST_CASE("remove_complex prunes orphans and reports them") {
  PetriNet net;
  net.add_unit(c_unit("a", "b"));
  net.add_unit(i_unit("b", "c"));
  net.set_marking("c", 4);
  auto gone = net.remove_complex({i_unit("b", "c")});
  REQUIRE(gone.positions.size() == 1);
  CHECK(gone.positions.front() == std::pair<std::string, int>{"c", 4});
  CHECK(gone.transitions.empty());
  CHECK(net.has_transition("b"));
  CHECK_FALSE(net.has_position("c"));
  validate(net);

  // Removing the last unit leaves the degenerate empty net.
  auto gone2 = net.remove_complex({c_unit("a", "b")});
  CHECK(gone2.positions.size() == 1);
  CHECK(gone2.transitions == std::vector<std::string>{"b"});
  CHECK(net.empty());
}

TEST_CASE("remove_complex is all-or-nothing") {
  PetriNet net;
  net.add_unit(c_unit("a", "b"));
  CHECK_THROWS_AS(net.remove_complex({c_unit("a", "b"), i_unit("b", "z")}), Error);
  CHECK(net.arcs().size() == 1);  // untouched
  CHECK_THROWS_AS(net.remove_complex({c_unit("a", "b", 2)}), Error);
  CHECK(net.arcs().size() == 1);
}

TEST_CASE("validation accepts isolated positions and rejects broken nets") {
  PetriNet pool;
  pool.set_marking("z", 9);
  validate(pool);
  CHECK(component_count(pool) == 1);

  PetriNet net;
  net.add_unit(c_unit("a", "b"));
  validate(net);
}

TEST_CASE("marking stays nonnegative") {
  PetriNet net;
  net.add_unit(c_unit("a", "b"));
  net.set_marking("a", 1);
  CHECK_THROWS_AS(net.add_tokens("a", -2), std::invalid_argument);
  CHECK(net.marking("a") == 1);
  CHECK_THROWS_AS(net.set_marking("a", -1), std::invalid_argument);
}

TEST_CASE("unit text forms") {
  CHECK(c_unit("a", "b").text() == "C[a,b]");
  CHECK(c_unit("a", "b", 2).text() == "C[a,b]^2");
  CHECK(c_unit("a", "b", 2, 3).text() == "C[a,b]^2 k=3");
  CHECK(i_unit("b", "c").text() == "I[b,c]");
  CHECK(b_unit("i", "b", 1, 4).text() == "B[i,b] k=4");
}
