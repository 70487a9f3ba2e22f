/*
 * Copyright (c) 2026 dynapt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <array>
#include <mutex>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dynapt/base.hpp"
#include "dynapt/program.hpp"
#include "dynapt/relations.hpp"
#include "dynapt/solver.hpp"
#include "dynapt/values.hpp"

// Rule evaluation internals. The solver drives a fixed set of handlers, one
// list per relation; a handler receives every tuple of its relation that is
// "in play" for the round (the previous round's delta in incremental mode,
// the full relation in naive mode). Handlers may only read committed state
// and insert tuples; new tuples become visible at the next round boundary.
// A rule is correct here iff re-running its handler on any one premise tuple
// re-derives the conclusions for all combinations involving that tuple.

namespace dynapt {

struct SolverContext {
  const Program& prog;
  const AnalysisOptions& opts;
  ValueStore& values;
  RelationStore& rels;

  // Shared mutable side channels; guarded by mu (relations guard themselves).
  std::mutex mu;
  DiagSet diags;
  // Unmodeled java.lang.invoke API calls at reachable sites: (insn, signature).
  std::set<std::pair<std::string, std::string>> unmodeledApi;

  SolverContext(const Program& p, const AnalysisOptions& o, ValueStore& v,
                RelationStore& r)
      : prog(p), opts(o), values(v), rels(r) {}

  void diag(Severity sev, const std::string& site, std::string msg) {
    std::lock_guard<std::mutex> g(mu);
    diags.insert(Diag{sev, site, std::move(msg)});
  }
  void unmodeled(const std::string& insn, std::string sig) {
    std::lock_guard<std::mutex> g(mu);
    unmodeledApi.emplace(insn, std::move(sig));
  }

  bool reachable(MethodId m) const {
    return rels[RelId::kReachable].contains(make1(m));
  }
  // Committed points-to rows for a variable: keys (var, value).
  const std::vector<Key>& vpt(VarId v) const {
    return rels[RelId::kVarPointsTo].byCol0(v);
  }

  void emitReachable(MethodId m) { rels[RelId::kReachable].insert(make1(m)); }
  void emitVPT(VarId v, ValueId val) {
    if (v == kNone) return;
    rels[RelId::kVarPointsTo].insert(make2(v, val));
  }
  void emitFieldPointsTo(ValueId base, StrId field, ValueId val) {
    rels[RelId::kFieldPointsTo].insert(make3(base, field, val));
  }
  void emitArrayPointsTo(ValueId arr, ValueId val) {
    rels[RelId::kArrayPointsTo].insert(make2(arr, val));
  }

  // Call-graph edges imply callee reachability; emitted atomically with it
  // (both land in the same commit).
  void emitCallEdge(InsnId i, MethodId callee, u32 kind) {
    rels[RelId::kCallEdge].insert(make3(i, callee, kind));
    emitReachable(callee);
  }
  void emitBootstrapEdge(InsnId i, MethodId bm) {
    rels[RelId::kBootstrapEdge].insert(make2(i, bm));
    emitReachable(bm);
  }
  void emitHandleEdge(InsnId i, MethodId m, ValueId handle) {
    rels[RelId::kHandleEdge].insert(make3(i, m, handle));
    emitReachable(m);
  }
  void emitLambdaEdge(InsnId i, MethodId impl, ValueId lam) {
    rels[RelId::kLambdaEdge].insert(make3(i, impl, lam));
    emitReachable(impl);
  }
};

using SeedFn = void (*)(SolverContext&);
using HandlerFn = void (*)(SolverContext&, const Key&);

// The complete rule system for one configuration. Built once per solve;
// options prune whole modules (lambda rules, invoke API rules) or change
// rule behaviour via SolverContext::opts.
struct RulePack {
  std::vector<SeedFn> seeds;
  std::array<std::vector<HandlerFn>, kNumRelations> onDelta;

  void on(RelId r, HandlerFn h) { onDelta[static_cast<size_t>(r)].push_back(h); }
};

RulePack build_rule_pack(const AnalysisOptions& opts);

// -- module registration (rules_*.cpp) --------------------------------------

void register_base_rules(RulePack& pack);    // statements, plain calls, field/array flow
void register_invoke_rules(RulePack& pack);  // method-handle creation, asType, mhpoly calls
void register_indy_rules(RulePack& pack);    // bootstrap evaluation, call-site binding
void register_lambda_rules(RulePack& pack);  // metafactory objects, interface dispatch to lambdas

// -- shared evaluators (rules_base.cpp) --------------------------------------

// Re-evaluates every statement and call site of a reachable method.
void evalMethod(SolverContext& ctx, MethodId m);
// Non-call statement rules for one instruction.
void evalStmt(SolverContext& ctx, InsnId i);
// Call and invokedynamic rules for one instruction.
void evalSite(SolverContext& ctx, InsnId i);
// evalStmt or evalSite depending on opcode; used by points-to delta handlers.
void evalUnit(SolverContext& ctx, InsnId i);

// Actual->formal and return flow along an established plain edge; the
// receiver flows from the base variable only for special calls (virtual
// dispatch feeds this-vars per receiver value instead).
void flowPlainEdge(SolverContext& ctx, InsnId site, MethodId callee,
                   bool passReceiver);

// -- cross-module hooks ------------------------------------------------------

// rules_invoke.cpp: classified java.lang.invoke / reflection API call at a
// reachable site. Consumes the site (plain dispatch is skipped).
void apiEvalCall(SolverContext& ctx, InsnId i);
// rules_invoke.cpp: invoke/invokeExact on a method-handle receiver.
void evalPolySite(SolverContext& ctx, InsnId i);
// rules_invoke.cpp: argument, receiver and return flow for HandleEdge(i, m, h).
void flowHandleEdge(SolverContext& ctx, InsnId site, MethodId m, ValueId handle);

// rules_reflection.cpp: Class.forName / getMethod / getConstructor family.
void reflectionEvalCall(SolverContext& ctx, InsnId i);

// rules_indy.cpp: bootstrap return value c may be a linked call site for
// invokedynamic instruction i.
void indyTryBindCallSite(SolverContext& ctx, InsnId i, ValueId c);
// rules_indy.cpp: ConstantCallSite construction, setTarget, getTarget.
void indyEvalCallSiteApi(SolverContext& ctx, InsnId i);

// rules_lambda.cpp: virtual/interface dispatch where the receiver value is a
// metafactory-created object; emits a LambdaEdge on a simple-name match.
void lambdaTryDispatch(SolverContext& ctx, InsnId site, ValueId recv);
// rules_lambda.cpp: argument/captured/receiver/return flow for
// LambdaEdge(site, impl, lam).
void flowLambdaEdge(SolverContext& ctx, InsnId site, MethodId impl, ValueId lam);

}  // namespace dynapt
