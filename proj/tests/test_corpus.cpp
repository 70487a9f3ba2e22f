/*
 * Copyright (c) 2026 dynapt contributors
 * SPDX-License-Identifier: Apache-2.0
 */

// Frozen expectations for the bundled example programs. Every value here was
// cross-checked against the reference evaluator; a failure means the engine's
// semantics moved, not that the corpus needs updating.

#include <doctest.h>

#include <filesystem>

#include "dynapt/analysis.hpp"
#include "dynapt/corpus.hpp"
#include "dynapt/facts.hpp"
#include "dynapt/solver.hpp"
#include "support.hpp"

using namespace dynapt;
using namespace dynapt::test;

namespace {

Program loadCorpus(const std::string& name) {
  return load_program(std::filesystem::path(corpusDir()) / name);
}

const char* kLmf = "java.lang.invoke.LambdaMetafactory.metafactory";

} // namespace

TEST_CASE("corpus: listing discovers every bundled program") {
  auto entries = list_corpus(corpusDir());
  REQUIRE(entries.size() == 13);
  std::vector<std::string> names;
  for (const auto& e : entries)
    names.push_back(e.name);
  CHECK(names == std::vector<std::string>{
                     "ctor-ref", "dynamo", "indy-vararg", "lambda-consumer",
                     "lambda-function", "lambda-supplier", "late-linking",
                     "mh-invoke-boxing", "mref-bound", "mref-static",
                     "mref-unbound", "nested-lambda", "sam-runnable"});
  for (const auto& e : entries) {
    CAPTURE(e.name);
    CHECK(!e.description.empty());
    CHECK(e.expectedReachable >= 1);
    CHECK(e.expectedUnreachable >= 1);
  }
  // Spot-check the counts against the larger tables.
  CHECK(entries[4].expectedUnreachable == 2);  // lambda-function
  CHECK(entries[12].expectedReachable == 2);   // sam-runnable
}

TEST_CASE("corpus: all programs agree across strategies, runs, and threads") {
  for (const auto& e : list_corpus(corpusDir())) {
    CAPTURE(e.name);
    Program p = load_program(e.dir);
    auto res = solve(p);
    auto base = render_relations(res);
    CHECK(base == render_relations(naive_solve(p)));
    CHECK(base == render_relations(solve(p)));
    AnalysisOptions many;
    many.threads = 4;
    CHECK(base == render_relations(solve(p, many)));

    REQUIRE(p.hasExpectations);
    auto check = run_check(res);
    CHECK(!check.hardFail);
    if (e.name == "dynamo") {
      CHECK(check.overApprox);
      CHECK(!check.pass(false));
      CHECK(check.pass(true));
    } else {
      CHECK(!check.overApprox);
      CHECK(check.pass(false));
    }
  }
}

TEST_CASE("corpus: disabling reflection only ever removes tuples") {
  AnalysisOptions off;
  off.reflection = false;
  std::set<std::string> changed;
  for (const auto& e : list_corpus(corpusDir())) {
    CAPTURE(e.name);
    Program p = load_program(e.dir);
    auto base = render_relations(solve(p));
    auto dark = render_relations(solve(p, off));
    for (const auto& [name, rows] : dark) {
      CAPTURE(name);
      for (const auto& row : rows)
        CHECK(base.at(name).count(row) == 1);
    }
    if (base != dark)
      changed.insert(e.name);
  }
  // Only the two programs that route linkage through Class constants move.
  CHECK(changed == std::set<std::string>{"dynamo", "late-linking"});
}

TEST_CASE("corpus late-linking: bootstrap-built call site binds the handle") {
  Program p = loadCorpus("late-linking");
  auto res = solve(p);
  CHECK(has(res, "BootstrapEdge", "A.main/01\tA.bootstrap"));
  CHECK(has(res, "HandleEdge", "A.main/01\tA.print\tMH(A.print,(A)void)"));
  CHECK(has(res, "FieldPointsTo",
            "new java.lang.invoke.ConstantCallSite@A.bootstrap/05\t$target\t"
            "MH(A.print,(A)void)"));
  CHECK(has(res, "VarPointsTo", "A.bootstrap/mh\tMH(A.print,(A)void)"));
  // The dynamic argument flows through the bound handle into the target.
  CHECK(has(res, "VarPointsTo", "A.print/a\tnew A@A.main/00"));
  CHECK(reachableSet(res) ==
        std::set<std::string>{"A.bootstrap", "A.main", "A.print"});
  CHECK(unified_call_graph(res) ==
        std::set<std::string>{"A.main/01\tA.bootstrap\tbootstrap",
                              "A.main/01\tA.print\tindy"});
  CHECK(res.diags.empty());
  CHECK(res.stats.rounds == 9);
}

TEST_CASE("corpus late-linking: the link chain needs the reflection rules") {
  Program p = loadCorpus("late-linking");
  AnalysisOptions off;
  off.reflection = false;
  auto res = solve(p, off);
  CHECK(rel(res, "HandleEdge").empty());
  CHECK(reachableSet(res) == std::set<std::string>{"A.bootstrap", "A.main"});
}

TEST_CASE("corpus lambda-consumer: accept() dispatches into the lambda body") {
  Program p = loadCorpus("lambda-consumer");
  auto res = solve(p);
  CHECK(reachableSet(res) ==
        std::set<std::string>{"Main.lambda$main$0", "Main.main", "Main.target",
                              kLmf});
  CHECK(unified_call_graph(res) ==
        std::set<std::string>{
            "Main.lambda$main$0/00\tMain.target\tstatic",
            std::string("Main.main/00\t") + kLmf + "\tbootstrap",
            "Main.main/02\tMain.lambda$main$0\tlambda"});
}

TEST_CASE("corpus lambda-function: apply() reaches only the used callee") {
  Program p = loadCorpus("lambda-function");
  auto res = solve(p);
  CHECK(reachableSet(res) ==
        std::set<std::string>{"Box.transform", "Main.lambda$main$0",
                              "Main.main", kLmf});
  CHECK(has(res, "CallEdge", "Main.lambda$main$0/00\tBox.transform\tvirtual"));
}

TEST_CASE("corpus lambda-supplier: get() reaches the supplier body") {
  Program p = loadCorpus("lambda-supplier");
  auto res = solve(p);
  CHECK(reachableSet(res) ==
        std::set<std::string>{"Main.lambda$main$0", "Main.main", "Main.make",
                              kLmf});
}

TEST_CASE("corpus ctor-ref: constructor reference mints at the call site") {
  Program p = loadCorpus("ctor-ref");
  auto res = solve(p);
  CHECK(has(res, "VarPointsTo", "Main.main/t\tmock Thing@Main.main/01"));
  CHECK(has(res, "VarPointsTo", "Thing.<init>/this\tmock Thing@Main.main/01"));
  CHECK(has(res, "LambdaEdge",
            "Main.main/01\tThing.<init>\tmock Maker@Main.main/00"));
  CHECK(reachableSet(res) ==
        std::set<std::string>{"Main.main", "Thing.<init>", kLmf});
}

TEST_CASE("corpus mref-static: unbound static reference forwards arguments") {
  Program p = loadCorpus("mref-static");
  auto res = solve(p);
  CHECK(has(res, "LambdaEdge",
            "Main.main/02\tMain.transform\tmock Fn@Main.main/00"));
  CHECK(has(res, "VarPointsTo", "Main.transform/x\t\"x\""));
  CHECK(has(res, "VarPointsTo", "Main.main/r\t\"x\""));
}

TEST_CASE("corpus mref-bound: captured receiver becomes `this`") {
  Program p = loadCorpus("mref-bound");
  auto res = solve(p);
  CHECK(has(res, "VarPointsTo", "Printer.print/this\tnew Printer@Main.main/00"));
  CHECK(has(res, "VarPointsTo", "Printer.print/s\t\"m\""));
  CHECK(reachableSet(res) ==
        std::set<std::string>{"Main.main", "Printer.print", kLmf});
}

TEST_CASE("corpus mref-unbound: first call argument becomes `this`") {
  Program p = loadCorpus("mref-unbound");
  auto res = solve(p);
  CHECK(has(res, "VarPointsTo", "Widget.read/this\tnew Widget@Main.main/01"));
  CHECK(has(res, "VarPointsTo", "Main.main/r\t\"data\""));
}

TEST_CASE("corpus sam-runnable: anonymous class and lambda coexist") {
  Program p = loadCorpus("sam-runnable");
  auto res = solve(p);
  auto full = reachableSet(res);
  CHECK(full == std::set<std::string>{"Main$1.<init>", "Main$1.run",
                                      "Main.lambda$main$0", "Main.main", kLmf});
  CHECK(has(res, "CallEdge", "Main.main/01\tMain$1.<init>\tstatic"));
  CHECK(has(res, "CallEdge", "Main.main/02\tMain$1.run\tvirtual"));

  // Without the metafactory rules only the lambda body drops out; the
  // explicit inner class path is untouched.
  AnalysisOptions off;
  off.lambdaRules = false;
  auto dark = reachableSet(solve(p, off));
  std::set<std::string> lost;
  for (const auto& m : full)
    if (!dark.count(m))
      lost.insert(m);
  CHECK(lost == std::set<std::string>{"Main.lambda$main$0"});
}

TEST_CASE("corpus nested-lambda: lambda bodies bootstrap further lambdas") {
  Program p = loadCorpus("nested-lambda");
  auto res = solve(p);
  CHECK(reachableSet(res) ==
        std::set<std::string>{"Main.core", "Main.lambda$main$0",
                              "Main.lambda$main$1", "Main.main", kLmf});
  CHECK(unified_call_graph(res).count(
            "Main.main/03\tMain.lambda$main$1\tlambda") == 1);
  CHECK(unified_call_graph(res).count(
            "Main.lambda$main$1/00\tMain.core\tstatic") == 1);
}

TEST_CASE("corpus mh-invoke-boxing: invoke adapts, strict invokeExact does not") {
  Program p = loadCorpus("mh-invoke-boxing");
  auto res = solve(p);
  auto cg = unified_call_graph(res);
  CHECK(cg.count("Main.main/02\tMain.inc\tmh") == 1);
  CHECK(cg.count("Main.main/04\tMain.inc\tmh") == 1);

  AnalysisOptions strict;
  strict.strictInvokeExact = true;
  auto cg2 = unified_call_graph(solve(p, strict));
  CHECK(cg2.count("Main.main/02\tMain.inc\tmh") == 1);
  CHECK(cg2.count("Main.main/04\tMain.inc\tmh") == 0);
}

TEST_CASE("corpus indy-vararg: trailing boot arguments pack into an array") {
  Program p = loadCorpus("indy-vararg");
  auto res = solve(p);
  CHECK(hasDiag(res, "bootstrap argument 1 beyond the arity of 'Main.bsm'"));
  CHECK(hasDiag(res, "bootstrap argument 2 beyond the arity of 'Main.bsm'"));
  CHECK(rel(res, "ArrayPointsTo") ==
        std::set<std::string>{
            "mock java.lang.Object[]@Main.main/00\tMH(Main.target,()void)",
            "mock java.lang.Object[]@Main.main/00\tint:42"});
  CHECK(has(res, "VarPointsTo",
            "Main.bsm/extra\tmock java.lang.Object[]@Main.main/00"));
  // The bootstrap loads array elements back out before wrapping one.
  CHECK(has(res, "VarPointsTo", "Main.bsm/h\tMH(Main.target,()void)"));
  CHECK(has(res, "HandleEdge",
            "Main.main/00\tMain.target\tMH(Main.target,()void)"));
}

TEST_CASE("corpus dynamo: reflective target set over-approximates") {
  Program p = loadCorpus("dynamo");
  auto res = solve(p);
  CHECK(rel(res, "HandleEdge") ==
        std::set<std::string>{
            "Main.main/00\tWidget.<init>\tMH(Widget.<init>,()void)",
            "Main.main/01\tGadget.render\tMH(Gadget.render,()java.lang.Object)",
            "Main.main/01\tWidget.render\tMH(Widget.render,()java.lang.Object)"});
  CHECK(reachableSet(res).size() == 6);

  auto check = run_check(res);
  REQUIRE(check.rows.size() == 2);
  CHECK(check.rows[0] ==
        std::pair<std::string, MethodCheck>{"Widget.render", MethodCheck::Ok});
  CHECK(check.rows[1] == std::pair<std::string, MethodCheck>{
                             "Gadget.render", MethodCheck::OverApprox});

  auto report = build_report(res, &check, false);
  CHECK(report["reachableCount"] == 6);
  CHECK(report["edgeCountsByKind"]["bootstrap"] == 2);
  CHECK(report["edgeCountsByKind"]["indy"] == 3);
  CHECK(report["edgeCountsByKind"]["mh"] == 0);
  CHECK(report["checkOutcome"]["Widget.render"] == "pass");
  CHECK(report["checkOutcome"]["Gadget.render"] == "over-approx");

  // Both handle lookups ride on constant class names.
  AnalysisOptions off;
  off.reflection = false;
  auto dark = solve(p, off);
  CHECK(rel(dark, "HandleEdge").empty());
  CHECK(reachableSet(dark) ==
        std::set<std::string>{"Main.bootCtor", "Main.bootRender", "Main.main"});
}
