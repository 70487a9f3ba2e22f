/*
 * Copyright (c) 2026 dynapt contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#include <doctest.h>

#include <set>
#include <vector>

#include "dynapt/analysis.hpp"
#include "dynapt/solver.hpp"
#include "support.hpp"

using namespace dynapt;
using namespace dynapt::test;

namespace {

constexpr const char* kLmf = "java.lang.invoke.LambdaMetafactory.metafactory";

Facts lamFixture() {
  Facts f;
  f.jdkBase();
  f.invokeCore();
  f.metafactory();
  f.row("Type", {"Fn", "interface", "java.lang.Object", "-"});
  f.row("Type", {"A", "class", "java.lang.Object", "-"});
  f.method("A.main", "A", "main", "void", {}, "static");
  f.row("EntryPoint", {"A.main"});
  return f;
}

// The javac-shaped boot argument triple: erased type, impl handle, checked
// type. The two types are irrelevant to the model but keep the shape honest.
void lmfArgs(Facts& f, const std::string& indy, const std::string& erased,
             const std::string& impl, const std::string& inst) {
  f.row("BootArg", {indy, "0", "mt", erased});
  f.row("BootArg", {indy, "1", "mh", impl});
  f.row("BootArg", {indy, "2", "mt", inst});
}

} // namespace

TEST_CASE("lambda: metafactory mints an interface mock that dispatches") {
  Facts f = lamFixture();
  f.method("A.impl", "A", "impl", "void", {"java.lang.String"}, "static",
           {"s"});
  f.row("InvokeDynamic",
        {"A.main/00", "A.main", kLmf, "run", "Fn", "-", "A.main/fn"});
  lmfArgs(f, "A.main/00", "(java.lang.Object)void", "A.impl",
          "(java.lang.String)void");
  f.row("Const", {"A.main/01", "A.main", "A.main/arg", "string", "x"});
  f.row("Call", {"A.main/02", "A.main", "interface", "A.main/fn", "Fn.run",
                 "(java.lang.Object)void", "-"});
  f.row("ActualParam", {"A.main/02", "0", "A.main/arg"});
  Program p = f.load();
  auto res = solve(p);

  const std::string lam = "mock Fn@A.main/00";
  CHECK(has(res, "MetafactoryInvoke", "A.main/00\trun\tFn"));
  CHECK(has(res, "LambdaObject", lam + "\tA.impl\trun\tA.main/00"));
  CHECK(has(res, "VarPointsTo", "A.main/fn\t" + lam));
  CHECK(has(res, "LambdaEdge", "A.main/02\tA.impl\t" + lam));
  CHECK(has(res, "ReceiverShift", lam + "\tA.impl\t0\t0"));
  CHECK(has(res, "VarPointsTo", "A.impl/s\t\"x\""));
  CHECK(rel(res, "LambdaCaptured").empty());
  CHECK(reachableSet(res) ==
        std::set<std::string>{"A.impl", "A.main", kLmf});
  CHECK(render_relations(res) == render_relations(naive_solve(p)));
}

TEST_CASE("lambda: dispatch is by method name") {
  Facts f = lamFixture();
  f.method("A.impl", "A", "impl", "void", {}, "static");
  f.row("InvokeDynamic",
        {"A.main/00", "A.main", kLmf, "run", "Fn", "-", "A.main/fn"});
  lmfArgs(f, "A.main/00", "()void", "A.impl", "()void");
  f.row("Call", {"A.main/01", "A.main", "interface", "A.main/fn", "Fn.other",
                 "()void", "-"});
  Program p = f.load();
  auto res = solve(p);
  CHECK(rel(res, "LambdaEdge").empty());
  CHECK(reachableSet(res).count("A.impl") == 0);
  // Failed lookups on functional mocks never warn.
  CHECK_FALSE(hasDiag(res, "unlinked call"));
}

TEST_CASE("lambda: bound instance impls take the captured receiver") {
  Facts f = lamFixture();
  f.method("A.m", "A", "m", "void", {"java.lang.String"}, "instance", {"s"},
           "this");
  f.row("Alloc", {"A.main/00", "A.main", "A.main/a", "A"});
  f.row("InvokeDynamic",
        {"A.main/01", "A.main", kLmf, "run", "Fn", "A", "A.main/fn"});
  f.row("ActualParam", {"A.main/01", "0", "A.main/a"});
  lmfArgs(f, "A.main/01", "(java.lang.String)void", "A.m",
          "(java.lang.String)void");
  f.row("Const", {"A.main/02", "A.main", "A.main/arg", "string", "x"});
  f.row("Call", {"A.main/03", "A.main", "interface", "A.main/fn", "Fn.run",
                 "(java.lang.String)void", "-"});
  f.row("ActualParam", {"A.main/03", "0", "A.main/arg"});
  Program p = f.load();
  auto res = solve(p);

  const std::string lam = "mock Fn@A.main/01";
  CHECK(has(res, "LambdaCaptured", "A.main/01\t0\tnew A@A.main/00"));
  CHECK(has(res, "InstanceImpl", "A.main/01\tA.m\t" + lam));
  CHECK(has(res, "ReceiverShift", lam + "\tA.m\t1\t0"));
  CHECK(has(res, "VarPointsTo", "A.m/this\tnew A@A.main/00"));
  CHECK(has(res, "VarPointsTo", "A.m/s\t\"x\""));
}

TEST_CASE("lambda: unbound instance impls take the receiver from the call") {
  Facts f = lamFixture();
  f.method("A.m", "A", "m", "void", {"java.lang.String"}, "instance", {"s"},
           "this");
  f.row("InvokeDynamic",
        {"A.main/00", "A.main", kLmf, "run", "Fn", "-", "A.main/fn"});
  lmfArgs(f, "A.main/00", "(A,java.lang.String)void", "A.m",
          "(A,java.lang.String)void");
  f.row("Alloc", {"A.main/01", "A.main", "A.main/a", "A"});
  f.row("Const", {"A.main/02", "A.main", "A.main/arg", "string", "y"});
  f.row("Call", {"A.main/03", "A.main", "interface", "A.main/fn", "Fn.run",
                 "(A,java.lang.String)void", "-"});
  f.row("ActualParam", {"A.main/03", "0", "A.main/a"});
  f.row("ActualParam", {"A.main/03", "1", "A.main/arg"});
  Program p = f.load();
  auto res = solve(p);

  const std::string lam = "mock Fn@A.main/00";
  CHECK(has(res, "ReceiverShift", lam + "\tA.m\t0\t1"));
  CHECK(has(res, "VarPointsTo", "A.m/this\tnew A@A.main/01"));
  CHECK(has(res, "VarPointsTo", "A.m/s\t\"y\""));
  CHECK(rel(res, "LambdaCaptured").empty());
}

TEST_CASE("lambda: constructor references mint objects at the call site") {
  Facts f = lamFixture();
  f.row("Type", {"W", "class", "java.lang.Object", "-"});
  f.method("W.<init>", "W", "<init>", "void", {}, "constructor", {}, "this");
  f.row("InvokeDynamic",
        {"A.main/00", "A.main", kLmf, "make", "Fn", "-", "A.main/fn"});
  lmfArgs(f, "A.main/00", "()java.lang.Object", "W.<init>", "()W");
  f.row("Call", {"A.main/01", "A.main", "interface", "A.main/fn", "Fn.make",
                 "()W", "A.main/w"});
  Program p = f.load();
  auto res = solve(p);
  CHECK(has(res, "LambdaEdge", "A.main/01\tW.<init>\tmock Fn@A.main/00"));
  CHECK(has(res, "VarPointsTo", "A.main/w\tmock W@A.main/01"));
  CHECK(has(res, "VarPointsTo", "W.<init>/this\tmock W@A.main/01"));
  CHECK(has(res, "ReceiverShift", "mock Fn@A.main/00\tW.<init>\t0\t0"));
  CHECK(reachableSet(res).count("W.<init>") == 1);
}

TEST_CASE("lambda: non-interface site types are not modeled") {
  Facts f = lamFixture();
  f.method("A.impl", "A", "impl", "void", {}, "static");
  f.row("InvokeDynamic",
        {"A.main/00", "A.main", kLmf, "run", "A", "-", "A.main/fn"});
  lmfArgs(f, "A.main/00", "()void", "A.impl", "()void");
  Program p = f.load();
  auto res = solve(p);
  CHECK(hasDiag(res, "metafactory result type is not an interface"));
  CHECK(rel(res, "MetafactoryInvoke").empty());
  CHECK(rel(res, "LambdaObject").empty());
}

TEST_CASE("lambda: a missing implementation handle warns") {
  Facts f = lamFixture();
  f.row("InvokeDynamic",
        {"A.main/00", "A.main", kLmf, "run", "Fn", "-", "A.main/fn"});
  f.row("BootArg", {"A.main/00", "0", "mt", "()void"});
  f.row("BootArg", {"A.main/00", "1", "mt", "()void"});
  Program p = f.load();
  auto res = solve(p);
  CHECK(hasDiag(res, "metafactory call without an implementation method "
                     "handle"));
  CHECK(has(res, "MetafactoryInvoke", "A.main/00\trun\tFn"));
  CHECK(rel(res, "LambdaObject").empty());
}

TEST_CASE("lambda: altMetafactory extras are noted and skipped") {
  Facts f = lamFixture();
  f.method("A.impl", "A", "impl", "void", {}, "static");
  f.row("InvokeDynamic",
        {"A.main/00", "A.main", kLmf, "run", "Fn", "-", "A.main/fn"});
  lmfArgs(f, "A.main/00", "()void", "A.impl", "()void");
  f.row("BootArg", {"A.main/00", "3", "int", "1"});
  f.row("Call",
        {"A.main/01", "A.main", "interface", "A.main/fn", "Fn.run", "()void",
         "-"});
  Program p = f.load();
  auto res = solve(p);
  CHECK(hasDiag(res, "extra metafactory bootstrap arguments ignored"));
  CHECK(has(res, "LambdaEdge", "A.main/01\tA.impl\tmock Fn@A.main/00"));
}

TEST_CASE("lambda: strict dispatch also checks the static callee type") {
  Facts f = lamFixture();
  f.row("Type", {"Other", "interface", "java.lang.Object", "-"});
  f.method("A.impl", "A", "impl", "void", {}, "static");
  f.row("InvokeDynamic",
        {"A.main/00", "A.main", kLmf, "run", "Fn", "-", "A.main/fn"});
  lmfArgs(f, "A.main/00", "()void", "A.impl", "()void");
  f.row("Call", {"A.main/01", "A.main", "interface", "A.main/fn", "Other.run",
                 "()void", "-"});
  f.row("Call", {"A.main/02", "A.main", "interface", "A.main/fn", "Fn.run",
                 "()void", "-"});
  Program p = f.load();

  auto res = solve(p);
  CHECK(has(res, "LambdaEdge", "A.main/01\tA.impl\tmock Fn@A.main/00"));
  CHECK(has(res, "LambdaEdge", "A.main/02\tA.impl\tmock Fn@A.main/00"));

  AnalysisOptions strict;
  strict.strictLambdaDispatch = true;
  auto res2 = solve(p, strict);
  CHECK_FALSE(has(res2, "LambdaEdge", "A.main/01\tA.impl\tmock Fn@A.main/00"));
  CHECK(has(res2, "LambdaEdge", "A.main/02\tA.impl\tmock Fn@A.main/00"));
}

TEST_CASE("lambda: argument slots outside the impl are skipped loudly") {
  Facts f = lamFixture();
  f.method("A.impl", "A", "impl", "void", {"java.lang.String"}, "static",
           {"s"});
  f.row("InvokeDynamic",
        {"A.main/00", "A.main", kLmf, "run", "Fn", "-", "A.main/fn"});
  lmfArgs(f, "A.main/00", "(java.lang.String,java.lang.String)void", "A.impl",
          "(java.lang.String,java.lang.String)void");
  f.row("Const", {"A.main/01", "A.main", "A.main/p", "string", "p"});
  f.row("Const", {"A.main/02", "A.main", "A.main/q", "string", "q"});
  f.row("Call", {"A.main/03", "A.main", "interface", "A.main/fn", "Fn.run",
                 "(java.lang.String,java.lang.String)void", "-"});
  f.row("ActualParam", {"A.main/03", "0", "A.main/p"});
  f.row("ActualParam", {"A.main/03", "1", "A.main/q"});
  Program p = f.load();
  auto res = solve(p);
  CHECK(has(res, "VarPointsTo", "A.impl/s\t\"p\""));
  CHECK(hasDiag(res,
                "lambda argument 1 has no parameter slot in 'A.impl'; "
                "skipped"));
}

TEST_CASE("lambda: captured slots outside the impl are skipped loudly") {
  Facts f = lamFixture();
  f.method("A.impl", "A", "impl", "void", {"A"}, "static", {"p"});
  f.row("Alloc", {"A.main/00", "A.main", "A.main/a", "A"});
  f.row("Const", {"A.main/01", "A.main", "A.main/s", "string", "x"});
  f.row("InvokeDynamic",
        {"A.main/02", "A.main", kLmf, "run", "Fn", "A,java.lang.String",
         "A.main/fn"});
  f.row("ActualParam", {"A.main/02", "0", "A.main/a"});
  f.row("ActualParam", {"A.main/02", "1", "A.main/s"});
  lmfArgs(f, "A.main/02", "()void", "A.impl", "()void");
  f.row("Call",
        {"A.main/03", "A.main", "interface", "A.main/fn", "Fn.run", "()void",
         "-"});
  Program p = f.load();
  auto res = solve(p);
  CHECK(has(res, "VarPointsTo", "A.impl/p\tnew A@A.main/00"));
  CHECK(hasDiag(res,
                "captured value 1 has no parameter slot in 'A.impl'; "
                "skipped"));
}

TEST_CASE("lambda: the ruleset gate removes exactly the lambda bodies") {
  Facts f = lamFixture();
  f.method("A.impl", "A", "impl", "void", {}, "static");
  f.row("InvokeDynamic",
        {"A.main/00", "A.main", kLmf, "run", "Fn", "-", "A.main/fn"});
  lmfArgs(f, "A.main/00", "()void", "A.impl", "()void");
  f.row("Call",
        {"A.main/01", "A.main", "interface", "A.main/fn", "Fn.run", "()void",
         "-"});
  Program p = f.load();

  auto on = solve(p);
  AnalysisOptions noLam;
  noLam.lambdaRules = false;
  auto off = solve(p, noLam);

  for (const char* r :
       {"MetafactoryInvoke", "LambdaObject", "LambdaEdge", "ReceiverShift"})
    CHECK_FALSE(rel(on, r).empty());
  for (const char* r : {"MetafactoryInvoke", "LambdaObject", "LambdaEdge",
                        "LambdaCaptured", "InstanceImpl", "ReceiverShift"})
    CHECK(rel(off, r).empty());
  CHECK(has(on, "BootstrapEdge", "A.main/00\t" + std::string(kLmf)));
  CHECK(has(off, "BootstrapEdge", "A.main/00\t" + std::string(kLmf)));

  std::set<std::string> rOn = reachableSet(on);
  std::set<std::string> rOff = reachableSet(off);
  std::set<std::string> diff;
  for (const std::string& m : rOn)
    if (!rOff.count(m))
      diff.insert(m);
  CHECK(diff == std::set<std::string>{"A.impl"});
}
