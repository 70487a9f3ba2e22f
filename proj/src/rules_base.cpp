/*
 * Copyright (c) 2026 dynapt contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "dynapt/rules.hpp"

namespace dynapt {

namespace {

// alloc / move / field / array / const rules for one instruction.
void stmtRules(SolverContext& ctx, InsnId i) {
  const Program& p = ctx.prog;
  const Instruction& ins = p.insns[i];
  auto& rels = ctx.rels;
  switch (ins.op) {
  case Opcode::Alloc: {
    ctx.emitVPT(ins.to, ctx.values.alloc(i, ins.allocType));
    // String allocations also carry the unknown-contents string: their text
    // is runtime data, not a literal.
    if (ins.allocType == p.known.string)
      ctx.emitVPT(ins.to, ctx.values.topStr());
    break;
  }
  case Opcode::Move:
    for (const Key& k : ctx.vpt(ins.from))
      ctx.emitVPT(ins.to, k.c[1]);
    break;
  case Opcode::StoreField:
    if (ins.base == kNone) { // static field
      for (const Key& k : ctx.vpt(ins.from))
        ctx.emitFieldPointsTo(kNone, ins.field, k.c[1]);
    } else {
      for (const Key& b : ctx.vpt(ins.base))
        for (const Key& k : ctx.vpt(ins.from))
          ctx.emitFieldPointsTo(b.c[1], ins.field, k.c[1]);
    }
    break;
  case Opcode::LoadField: {
    auto loadFrom = [&](ValueId base) {
      for (const Key& f : rels[RelId::kFieldPointsTo].byCol0(base))
        if (f.c[1] == ins.field)
          ctx.emitVPT(ins.to, f.c[2]);
    };
    if (ins.base == kNone)
      loadFrom(kNone);
    else
      for (const Key& b : ctx.vpt(ins.base))
        loadFrom(b.c[1]);
    break;
  }
  case Opcode::StoreArray:
    for (const Key& b : ctx.vpt(ins.base))
      for (const Key& k : ctx.vpt(ins.from))
        ctx.emitArrayPointsTo(b.c[1], k.c[1]);
    break;
  case Opcode::LoadArray:
    for (const Key& b : ctx.vpt(ins.base))
      for (const Key& e : rels[RelId::kArrayPointsTo].byCol0(b.c[1]))
        ctx.emitVPT(ins.to, e.c[1]);
    break;
  case Opcode::Const:
    switch (ins.constKind) {
    case ConstKind::Str:
      ctx.emitVPT(ins.to, ctx.values.str(ins.constRef));
      break;
    case ConstKind::ClassRef:
      // Class reification is part of the reflection surface.
      if (ctx.opts.reflection)
        ctx.emitVPT(ins.to, ctx.values.classObj(ins.constRef));
      break;
    case ConstKind::MethodHandleRef:
      ctx.emitVPT(ins.to, ctx.values.materializeHandle(ins.constRef));
      break;
    case ConstKind::MethodTypeLit:
      ctx.emitVPT(ins.to, ctx.values.methodTypeVal(ins.constRef));
      break;
    case ConstKind::Int:
      ctx.emitVPT(ins.to, ctx.values.intVal(ins.constInt));
      break;
    case ConstKind::None:
      break;
    }
    break;
  default:
    break;
  }
}

void dispatchPlainCall(SolverContext& ctx, InsnId i) {
  const Program& p = ctx.prog;
  const Instruction& ins = p.insns[i];

  if (ins.callKind == CallKind::Static || ins.callKind == CallKind::Special) {
    LookupMode mode = ins.callKind == CallKind::Static ? LookupMode::StaticOnly
                                                       : LookupMode::Virtual;
    auto ms = p.methodLookup(ins.calleeDeclType, ins.calleeSimpleName,
                             ins.calleeDescriptor, mode);
    if (ms.empty()) {
      ctx.diag(Severity::Warning, ins.id,
               "unlinked call: no target for '" + ins.calleeName +
                   ctx.values.renderMType(ins.calleeDescriptor) + "'");
      return;
    }
    ctx.emitCallEdge(i, ms[0], 0);
    flowPlainEdge(ctx, i, ms[0], ins.callKind == CallKind::Special);
    return;
  }

  // virtual / interface: resolve per receiver value.
  for (const Key& r : ctx.vpt(ins.base)) {
    ValueId recv = r.c[1];
    if (ctx.opts.lambdaRules)
      lambdaTryDispatch(ctx, i, recv);
    TypeId rt = ctx.values.dispatchType(recv);
    if (rt == kNone)
      continue;
    auto ms = p.methodLookup(rt, ins.calleeSimpleName, ins.calleeDescriptor,
                             LookupMode::Virtual);
    if (ms.empty()) {
      // Functional-object mocks resolve through the lambda rules instead.
      Value rv = ctx.values.at(recv);
      bool functionalMock = rv.kind == ValueKind::Mock &&
                            p.types[rv.b].kind == TypeKind::Interface;
      if (!functionalMock)
        ctx.diag(Severity::Warning, ins.id,
                 "unlinked call: no target for '" + ins.calleeSimpleName +
                     ctx.values.renderMType(ins.calleeDescriptor) +
                     "' on type '" + p.types[rt].id + "'");
      continue;
    }
    ctx.emitCallEdge(i, ms[0], 1);
    if (p.methods[ms[0]].thisVar != kNone)
      ctx.emitVPT(p.methods[ms[0]].thisVar, recv);
    flowPlainEdge(ctx, i, ms[0], false);
  }
  if (ctx.opts.lambdaRules)
    for (const Key& e : ctx.rels[RelId::kLambdaEdge].byCol0(i))
      flowLambdaEdge(ctx, i, e.c[1], e.c[2]);
}

// ---- delta handlers ---------------------------------------------------------

void onReachableDelta(SolverContext& ctx, const Key& k) {
  evalMethod(ctx, k.c[0]);
}

void onVarPointsToDelta(SolverContext& ctx, const Key& k) {
  const Program& p = ctx.prog;
  VarId v = k.c[0];
  ValueId val = k.c[1];
  for (InsnId u : p.varUses[v])
    if (ctx.reachable(p.insns[u].method))
      evalUnit(ctx, u);

  const VarInfo& vi = p.vars[v];
  if (!vi.isReturnVar)
    return;
  // Return flow crosses methods: push the new value to every site with an
  // edge into the enclosing method.
  MethodId m = vi.method;
  auto pushRet = [&](InsnId site) {
    VarId ret = p.insns[site].assignRet;
    if (ret != kNone)
      ctx.emitVPT(ret, val);
  };
  for (const Key& e : ctx.rels[RelId::kCallEdge].all())
    if (e.c[1] == m)
      pushRet(e.c[0]);
  for (const Key& e : ctx.rels[RelId::kHandleEdge].all())
    if (e.c[1] == m)
      pushRet(e.c[0]);
  if (ctx.opts.lambdaRules)
    for (const Key& e : ctx.rels[RelId::kLambdaEdge].all())
      if (e.c[1] == m)
        pushRet(e.c[0]);
  for (const Key& e : ctx.rels[RelId::kBootstrapEdge].all())
    if (e.c[1] == m) {
      pushRet(e.c[0]); // bootstrap result also lands in the site's result var
      indyTryBindCallSite(ctx, e.c[0], val);
    }
}

void onFieldPointsToDelta(SolverContext& ctx, const Key& k) {
  const Program& p = ctx.prog;
  auto it = p.fieldLoads.find(k.c[1]);
  if (it == p.fieldLoads.end())
    return;
  for (InsnId u : it->second)
    if (ctx.reachable(p.insns[u].method))
      evalUnit(ctx, u);
}

void onArrayPointsToDelta(SolverContext& ctx, const Key&) {
  const Program& p = ctx.prog;
  for (InsnId u : p.arrayLoads)
    if (ctx.reachable(p.insns[u].method))
      evalUnit(ctx, u);
}

void onCallEdgeDelta(SolverContext& ctx, const Key& k) {
  evalSite(ctx, k.c[0]);
}

void seedEntries(SolverContext& ctx) {
  const Program& p = ctx.prog;
  if (p.entryPoints.empty()) {
    ctx.diag(Severity::Warning, "-",
             "no entry points declared; nothing is reachable");
    return;
  }
  for (size_t n = 0; n < p.entryPoints.size(); ++n) {
    MethodId e = p.entryPoints[n];
    ctx.emitReachable(e);
    const MethodInfo& mi = p.methods[e];
    // Instance entry points need a receiver; fabricate one per entry.
    if (!mi.isStatic() && mi.thisVar != kNone)
      ctx.emitVPT(mi.thisVar,
                  ctx.values.mock(mi.declaringType, p.entryMarkers[n]));
  }
}

} // namespace

void evalMethod(SolverContext& ctx, MethodId m) {
  for (InsnId i : ctx.prog.methods[m].body)
    evalUnit(ctx, i);
}

void evalStmt(SolverContext& ctx, InsnId i) { stmtRules(ctx, i); }

void evalUnit(SolverContext& ctx, InsnId i) {
  Opcode op = ctx.prog.insns[i].op;
  if (op == Opcode::Call || op == Opcode::InvokeDynamic)
    evalSite(ctx, i);
  else
    evalStmt(ctx, i);
}

void evalSite(SolverContext& ctx, InsnId i) {
  const Instruction& ins = ctx.prog.insns[i];
  if (ins.op == Opcode::InvokeDynamic) {
    ctx.emitBootstrapEdge(i, ins.bootMethod);
    // Captured values for metafactory sites: every dynamic actual.
    if (ctx.opts.lambdaRules &&
        !ctx.rels[RelId::kMetafactoryInvoke].byCol0(i).empty())
      for (size_t n = 0; n < ins.actuals.size(); ++n)
        for (const Key& k : ctx.vpt(ins.actuals[n]))
          ctx.rels[RelId::kLambdaCaptured].insert(
              make3(i, static_cast<u32>(n), k.c[1]));
    for (const Key& e : ctx.rels[RelId::kHandleEdge].byCol0(i))
      flowHandleEdge(ctx, i, e.c[1], e.c[2]);
    return;
  }
  if (ins.apiOp == ApiOp::PolyInvoke || ins.apiOp == ApiOp::PolyInvokeExact) {
    evalPolySite(ctx, i);
    return;
  }
  if (ins.apiOp != ApiOp::None) {
    apiEvalCall(ctx, i);
    return;
  }
  dispatchPlainCall(ctx, i);
}

void flowPlainEdge(SolverContext& ctx, InsnId site, MethodId callee,
                   bool passReceiver) {
  const Program& p = ctx.prog;
  const Instruction& ins = p.insns[site];
  const MethodInfo& mi = p.methods[callee];
  size_t n = std::min(ins.actuals.size(), mi.formals.size());
  for (size_t a = 0; a < n; ++a)
    for (const Key& k : ctx.vpt(ins.actuals[a]))
      ctx.emitVPT(mi.formals[a], k.c[1]);
  if (passReceiver && ins.base != kNone && mi.thisVar != kNone)
    for (const Key& k : ctx.vpt(ins.base))
      ctx.emitVPT(mi.thisVar, k.c[1]);
  if (ins.assignRet != kNone && mi.returnVar != kNone)
    for (const Key& k : ctx.vpt(mi.returnVar))
      ctx.emitVPT(ins.assignRet, k.c[1]);
}

void register_base_rules(RulePack& pack) {
  pack.seeds.push_back(&seedEntries);
  pack.on(RelId::kReachable, &onReachableDelta);
  pack.on(RelId::kVarPointsTo, &onVarPointsToDelta);
  pack.on(RelId::kFieldPointsTo, &onFieldPointsToDelta);
  pack.on(RelId::kArrayPointsTo, &onArrayPointsToDelta);
  pack.on(RelId::kCallEdge, &onCallEdgeDelta);
}

} // namespace dynapt
