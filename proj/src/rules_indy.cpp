/*
 * Copyright (c) 2026 dynapt contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "dynapt/rules.hpp"

// Generic invokedynamic: bootstrap methods run as ordinary code, their
// CallSite-typed return values bind to the instruction, and the bound site's
// $target handle contents become call targets.

namespace dynapt {

namespace {

ValueId materializeBootArg(SolverContext& ctx, const BootArg& arg) {
  switch (arg.kind) {
  case BootArgKind::MethodHandleRef:
    return ctx.values.materializeHandle(arg.ref);
  case BootArgKind::MethodTypeLit:
    return ctx.values.methodTypeVal(arg.ref);
  case BootArgKind::Str:
    return ctx.values.str(arg.ref);
  case BootArgKind::ClassRef:
    // Linkage constant, not reflection; never gated.
    return ctx.values.classObj(arg.ref);
  case BootArgKind::Int:
    return ctx.values.intVal(arg.intValue);
  }
  return kNone;
}

// CallSite c (bound to some instruction with interface type t) holds handle
// value h: h becomes a target when its return type fits t, or when it is a
// constructor of t (the construction idiom returns the receiver).
void tryCallSiteContents(SolverContext& ctx, ValueId c, TypeId t, ValueId h) {
  Value hv = ctx.values.at(h);
  if (hv.kind != ValueKind::MethodHandle)
    return;
  const Program& p = ctx.prog;
  bool retFits = p.typeCompat(ctx.values.mtypes().at(hv.b).ret, t);
  const MethodInfo& mi = p.methods[hv.a];
  bool ctorOfT = mi.isConstructor() && mi.declaringType == t;
  if (retFits || ctorOfT)
    ctx.rels[RelId::kCallSiteTarget].insert(make3(c, h, hv.a));
}

// Bootstrap invocation: standard (Lookup, name, MethodType) prefix, static
// boot arguments into the remaining formals, trailing varargs packed into a
// mock array.
void onBootstrapEdgeDelta(SolverContext& ctx, const Key& k) {
  const Program& p = ctx.prog;
  InsnId i = k.c[0];
  MethodId bm = k.c[1];
  const Instruction& ins = p.insns[i];
  const MethodInfo& mi = p.methods[bm];

  if (!mi.formals.empty())
    ctx.emitVPT(mi.formals[0],
                ctx.values.lookupVal(p.methods[ins.method].declaringType));
  if (mi.formals.size() > 1)
    ctx.emitVPT(mi.formals[1], ctx.values.str(ins.dynName));
  if (mi.formals.size() > 2)
    ctx.emitVPT(mi.formals[2], ctx.values.methodTypeVal(ins.dynType));

  bool vararg = mi.paramTypes.size() == 4 &&
                p.types[mi.paramTypes[3]].kind == TypeKind::Array;
  for (size_t n = 0; n < ins.bootArgs.size(); ++n) {
    size_t formalIdx = n + 3;
    if (formalIdx < mi.formals.size())
      ctx.emitVPT(mi.formals[formalIdx],
                  materializeBootArg(ctx, ins.bootArgs[n]));
    else if (!(vararg && n >= 3))
      ctx.diag(Severity::Warning, ins.id,
               "bootstrap argument " + std::to_string(n) +
                   " beyond the arity of '" + mi.id + "'; dropped");
  }
  if (vararg) {
    bool any = false;
    ValueId mockArr = kNone;
    for (size_t n = 3; n < ins.bootArgs.size(); ++n) {
      if (!any) {
        mockArr = ctx.values.mock(mi.paramTypes[3], i);
        any = true;
      }
      ctx.emitArrayPointsTo(mockArr, materializeBootArg(ctx, ins.bootArgs[n]));
    }
    if (any)
      ctx.emitVPT(mi.formals[3], mockArr);
  }

  if (mi.returnVar != kNone)
    for (const Key& t : ctx.vpt(mi.returnVar)) {
      if (ins.assignRet != kNone)
        ctx.emitVPT(ins.assignRet, t.c[1]);
      indyTryBindCallSite(ctx, i, t.c[1]);
    }
}

void onIndyCallSiteDelta(SolverContext& ctx, const Key& k) {
  ValueId c = k.c[0];
  InsnId i = k.c[1];
  TypeId t = k.c[2];
  StrId target = ctx.prog.known.targetField;
  for (const Key& f : ctx.rels[RelId::kFieldPointsTo].byCol0(c))
    if (f.c[1] == target)
      tryCallSiteContents(ctx, c, t, f.c[2]);
  for (const Key& e : ctx.rels[RelId::kCallSiteTarget].byCol0(c))
    ctx.emitHandleEdge(i, e.c[2], e.c[1]);
}

void onCallSiteTargetDelta(SolverContext& ctx, const Key& k) {
  ValueId c = k.c[0];
  for (const Key& s : ctx.rels[RelId::kIndyCallSite].byCol0(c))
    ctx.emitHandleEdge(s.c[1], k.c[2], k.c[1]);
}

void onTargetFieldDelta(SolverContext& ctx, const Key& k) {
  const Program& p = ctx.prog;
  if (k.c[1] != p.known.targetField)
    return;
  for (const Key& s : ctx.rels[RelId::kIndyCallSite].byCol0(k.c[0]))
    tryCallSiteContents(ctx, k.c[0], s.c[2], k.c[2]);
  // getTarget reads through $target; re-read sites now that contents grew.
  for (InsnId u : p.getTargetSites)
    if (ctx.reachable(p.insns[u].method))
      evalUnit(ctx, u);
}

} // namespace

void indyTryBindCallSite(SolverContext& ctx, InsnId i, ValueId c) {
  const Program& p = ctx.prog;
  const Instruction& ins = p.insns[i];
  // Metafactory sites are modeled by the lambda rules, not by call-site
  // binding; their bootstrap result is the functional object itself.
  if (ins.metafactorySite)
    return;
  TypeId ct = ctx.values.dispatchType(c);
  if (ct == kNone || p.known.callSite == kNone ||
      !p.subtype(ct, p.known.callSite))
    return;
  TypeId t = ctx.values.mtypes().at(ins.dynType).ret;
  ctx.rels[RelId::kIndyCallSite].insert(make3(c, i, t));
}

void indyEvalCallSiteApi(SolverContext& ctx, InsnId i) {
  const Program& p = ctx.prog;
  const Instruction& ins = p.insns[i];
  StrId target = p.known.targetField;
  switch (ins.apiOp) {
  case ApiOp::CallSiteCtor:
  case ApiOp::SetTarget: {
    if (ins.actuals.empty())
      return;
    for (const Key& b : ctx.vpt(ins.base))
      for (const Key& t : ctx.vpt(ins.actuals[0])) {
        if (ctx.values.at(t.c[1]).kind != ValueKind::MethodHandle)
          continue;
        ctx.emitFieldPointsTo(b.c[1], target, t.c[1]);
      }
    return;
  }
  case ApiOp::GetTarget:
    for (const Key& b : ctx.vpt(ins.base))
      for (const Key& f : ctx.rels[RelId::kFieldPointsTo].byCol0(b.c[1]))
        if (f.c[1] == target)
          ctx.emitVPT(ins.assignRet, f.c[2]);
    return;
  default:
    return;
  }
}

void register_indy_rules(RulePack& pack) {
  pack.on(RelId::kBootstrapEdge, &onBootstrapEdgeDelta);
  pack.on(RelId::kIndyCallSite, &onIndyCallSiteDelta);
  pack.on(RelId::kCallSiteTarget, &onCallSiteTargetDelta);
  pack.on(RelId::kFieldPointsTo, &onTargetFieldDelta);
}

} // namespace dynapt
