#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cpn/selftest.hpp"
#include "cpn/textio.hpp"

using namespace cpn;

TEST_CASE("parse the resource-intensive example net") {
  ParseResult r = parse_net("net { C[a,b] m(a)=5  I[b,c] m(c)=2 }");
  REQUIRE(r.ok());
  const PetriNet& net = r.document->net;
  CHECK(net.marking("a") == 5);
  CHECK(net.marking("c") == 2);
  CHECK(net.arcs().size() == 2);
  CHECK(total_tokens(net) == 7);
}

TEST_CASE("parse an inhibitor-gated chain") {
  ParseResult r = parse_net("net { C[a,b]  B[i,b]  I[b,c] }");
  REQUIRE(r.ok());
  CHECK(r.document->net.find_arc(UnitKind::B, "i", "b") != nullptr);
  CHECK(r.document->net.transitions().size() == 1);
}

TEST_CASE("namespace clash carries a span") {
  ParseResult r = parse_net("net { C[a,a] }");
  REQUIRE_FALSE(r.ok());
  REQUIRE(r.diagnostics.size() == 1);
  const ParseDiagnostic& d = r.diagnostics.front();
  CHECK(d.severity == Severity::Error);
  CHECK(d.span.line == 1);
  CHECK(d.span.column == 7);
  CHECK(d.message.find("a") != std::string::npos);
}

TEST_CASE("parse failures always carry a span inside the input") {
  const char* bad[] = {
      "",                                   // missing net block
      "net {",                              // unterminated
      "net { C[a] }",                       // malformed unit
      "net { C[a,b] ^ }",                   // dangling caret
      "net { C[a,b]^0 }",                   // zero multiplicity
      "net { C[a,b] k=0 }",                 // zero threshold
      "net { X[a,b] }",                     // unknown kind
      "net { m(a)=5 v(a)=2 }",              // v on a position
      "net { v(t)=2 }",                     // v on an unknown transition
      "net { C[a,b] m(a)=1 m(a)=2 }",       // duplicate annotation
      "net { C[a,b] } rules { when m(a) spawn { C[a,b] } }",    // missing comparator
      "net { C[a,b] } rules { when m(a)>=1 spawn { } }",        // empty complex
      "net { C[a,b] } rules { when m(a)>=1 spawn { I[b,e] } init { e:1 } }",  // init > cost
      "net { C[a,b] } rules { when m(a)>=1 spawn { I[b,e] } release { b:all } }",
      "net { C[a,b] } rules { when m(a)>=1 remove { C[a,b] } init { a:1 } }",
      "net { C[a,b] } rules { when m(a)>=1 remove { C[a,b] } cost { a:1 } release { a:all } }",
      "net { C[a,b] } rules { when m(a)>=1 remove { C[a,b] } release { a:all, b:2 } }",
      "net { C[a,b] } rules { when d(a)>=1 remove { C[a,b] } }",  // d not allowed in conditions
      "net { C[a,b] } junk",
      "net { C[a,b] $ }",
  };
  for (const char* text : bad) {
    CAPTURE(text);
    ParseResult r = parse_net(text);
    CHECK_FALSE(r.ok());
    REQUIRE(!r.diagnostics.empty());
    for (const ParseDiagnostic& d : r.diagnostics) {
      CHECK(d.span.begin <= d.span.end);
      CHECK(d.span.end <= std::string_view(text).size());
    }
  }
}

TEST_CASE("rules parse with costs, init and release") {
  ParseResult r = parse_net(
      "net { C[a,b] m(a)=5  I[b,c] m(c)=4  I[b,e] m(e)=3 }\n"
      "rules {\n"
      "  when m(e) >= 3 remove { I[b,e] } release { c:all }\n"
      "  when 2*m(c) + m(a) >= 7 spawn { C[c,f] } cost { c:1 }\n"
      "  when m(a) > 0 remove { C[a,b] } release { nearest_successor }\n"
      "}\n");
  REQUIRE(r.ok());
  const auto& rules = r.document->rules;
  REQUIRE(rules.size() == 3);
  CHECK(rules[0].action == RuleAction::Remove);
  CHECK(rules[0].release.mode == ReleaseMode::Explicit);
  REQUIRE(rules[0].release.shares.size() == 1);
  CHECK(rules[0].release.shares[0].all);
  CHECK(rules[1].condition.terms.size() == 2);
  CHECK(rules[1].condition.terms[0].coefficient == 2);
  CHECK(rules[1].cost.at("c") == 1);
  CHECK(rules[2].release.mode == ReleaseMode::NearestSuccessor);
}

TEST_CASE("canonical rendering") {
  SUBCASE("paper example") {
    PetriNet net;
    net.add_unit(c_unit("a", "b"));
    net.add_unit(i_unit("b", "c"));
    net.set_marking("a", 5);
    net.set_marking("c", 2);
    CHECK(render_canonical(net) == "net { C[a,b] m(a)=5  I[b,c] m(c)=2 }\n");
  }
  SUBCASE("empty net") { CHECK(render_canonical(new_net()) == "net { }\n"); }
  SUBCASE("isolated position survives") {
    PetriNet net;
    net.set_marking("z", 0);
    CHECK(render_canonical(net) == "net { m(z)=0 }\n");
    ParseResult r = parse_net(render_canonical(net));
    REQUIRE(r.ok());
    CHECK(labeled_equal(r.document->net, net));
  }
}

TEST_CASE("rule rendering is a parse fixpoint") {
  std::string text =
      "net { C[a,b] m(a)=5  I[b,c] m(c)=4  I[b,e] m(e)=3 }\n"
      "rules {\n"
      "  when m(e) >= 3 remove { I[b,e] } release { c:all }\n"
      "  when m(c) >= 7 spawn { C[c,f] } cost { c:1 }\n"
      "  when m(a) >= 9 remove { C[a,b] } release { c:2, e:1 }\n"
      "  when v(b) > 1 remove { C[a,b] } cost { a:1 }\n"
      "  when m(a) >= 9 remove { C[a,b] } release { nearest_predecessor }\n"
      "}\n";
  ParseResult first = parse_net(text);
  REQUIRE(first.ok());
  std::string rendered = render_canonical(first.document->net, first.document->rules);
  ParseResult second = parse_net(rendered);
  REQUIRE(second.ok());
  CHECK(labeled_equal(second.document->net, first.document->net));
  CHECK(render_canonical(second.document->net, second.document->rules) == rendered);
}

TEST_CASE("randomized canonical round trips") {
  auto report = selftest::roundtrip_dsl(300);
  for (const auto& sample : report.samples) CAPTURE(sample);
  CHECK(report.failures == 0);
}

TEST_CASE("pretty rendering") {
  SUBCASE("serial chain") {
    PetriNet net;
    net.add_unit(c_unit("a", "b"));
    net.add_unit(i_unit("b", "c"));
    net.add_unit(c_unit("c", "d"));
    net.add_unit(i_unit("d", "e"));
    CHECK(render_pretty(net) == "aCbIcCdIe");
  }
  SUBCASE("fan-out") {
    PetriNet net;
    net.add_unit(c_unit("a", "b"));
    net.add_unit(i_unit("b", "c"));
    net.add_unit(i_unit("b", "e"));
    CHECK(render_pretty(net) == "aCb(.Ic, .Ie)");
  }
  SUBCASE("single unit") {
    PetriNet net;
    net.add_unit(c_unit("a", "b"));
    CHECK(render_pretty(net) == "aCb");
  }
  SUBCASE("fan-in with a gate") {
    PetriNet net;
    net.add_unit(c_unit("a", "b"));
    net.add_unit(b_unit("i", "b"));
    net.add_unit(i_unit("b", "c"));
    CHECK(render_pretty(net) == "(aC., iB.)bIc");
  }
  SUBCASE("associative-gated net from the worked example") {
    PetriNet net;
    net.add_unit(i_unit("a", "b"));
    net.add_unit(c_unit("b", "c"));
    net.add_unit(a_unit("l", "c"));
    net.add_unit(i_unit("c", "e"));
    CHECK(render_pretty(net) == "(aIbC., lA.)cIe");
    net.add_unit(i_unit("c", "k"));
    CHECK(render_pretty(net) == "(aIbC., lA.)c(.Ie, .Ik)");
  }
  SUBCASE("disjoint fragments join with the composition sign") {
    PetriNet net;
    net.add_unit(c_unit("a", "b"));
    net.add_unit(c_unit("c", "d"));
    CHECK(render_pretty(net) == "aCb ∘ cCd");
  }
}

TEST_CASE("dot export") {
  PetriNet net;
  net.add_unit(c_unit("a", "b", 2));
  net.add_unit(b_unit("i", "b"));
  net.add_unit(a_unit("l", "b"));
  net.add_unit(i_unit("b", "c"));
  net.set_marking("a", 5);
  net.set_speed("b", 2);
  std::string dot = export_dot(net);
  CHECK(dot.find("\"a\" [shape=circle, label=\"a:5\"]") != std::string::npos);
  CHECK(dot.find("\"b\" [shape=box, label=\"b v=2\"]") != std::string::npos);
  CHECK(dot.find("\"a\" -> \"b\" [label=\"2\"]") != std::string::npos);
  CHECK(dot.find("\"i\" -> \"b\" [arrowhead=odot]") != std::string::npos);
  CHECK(dot.find("\"l\" -> \"b\" [style=dashed]") != std::string::npos);
  CHECK(dot.find("\"b\" -> \"c\";") != std::string::npos);
  CHECK(export_dot(net) == dot);  // byte-deterministic
}

TEST_CASE("trace json shape") {
  TraceEvent event;
  event.step = 1;
  event.fired["b"] = 1;
  event.triggered_rules = {0};
  event.spawned.push_back(i_unit("b", "e"));
  event.marking = {{"a", 3}, {"c", 2}, {"e", 1}};
  CHECK(trace_event_json(event) ==
        R"({"step":1,"fired":{"b":1},"rules":[0],"spawned":["I[b,e]"],"removed":[],"marking":{"a":3,"c":2,"e":1}})");
  RuleWarning warning{2, "cost unpayable"};
  CHECK(rule_warning_json(warning) == R"({"warning":"cost unpayable","rule":2})");
}
