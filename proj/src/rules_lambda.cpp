/*
 * Copyright (c) 2026 dynapt contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "dynapt/rules.hpp"

// Lambda metafactory model, in three phases: (1) the metafactory call makes a
// mock object of the functional interface type and records its implementation
// method; (2) interface calls on that mock resolve to the implementation by
// simple name; (3) arguments split between values captured at the creation
// site and values passed at the interface call, with the receiver taken from
// either side depending on the implementation's shape.

namespace dynapt {

namespace {

void onBootstrapEdgeDelta(SolverContext& ctx, const Key& k) {
  const Program& p = ctx.prog;
  InsnId i = k.c[0];
  const Instruction& ins = p.insns[i];
  if (!ins.metafactorySite)
    return;
  TypeId ti = ctx.values.mtypes().at(ins.dynType).ret;
  if (ti == kNone || p.types[ti].kind != TypeKind::Interface) {
    ctx.diag(Severity::Warning, ins.id,
             "metafactory result type is not an interface; site not modeled");
    return;
  }
  // altMetafactory flags/markers/bridges beyond the standard three are not
  // modeled; the core object creation still is.
  if (ins.bootArgs.size() > 3)
    ctx.diag(Severity::Warning, ins.id,
             "extra metafactory bootstrap arguments ignored");
  ctx.rels[RelId::kMetafactoryInvoke].insert(make3(i, ins.dynName, ti));
}

void onMetafactoryInvokeDelta(SolverContext& ctx, const Key& k) {
  const Program& p = ctx.prog;
  InsnId i = k.c[0];
  StrId name = k.c[1];
  TypeId ti = k.c[2];
  const Instruction& ins = p.insns[i];
  if (ins.bootArgs.size() > 1 &&
      ins.bootArgs[1].kind == BootArgKind::MethodHandleRef) {
    ValueId lam = ctx.values.mock(ti, i);
    ctx.emitVPT(ins.assignRet, lam);
    ctx.rels[RelId::kLambdaObject].insert(
        make4(lam, ins.bootArgs[1].ref, name, i));
  } else {
    ctx.diag(Severity::Warning, ins.id,
             "metafactory call without an implementation method handle");
  }
  // Captured-value collection keys on the MetafactoryInvoke tuple; the site
  // is worth re-evaluating now that it exists.
  evalSite(ctx, i);
}

// A lambda object can reach a call-site base variable before its LambdaObject
// tuple exists; when the tuple lands, re-dispatch those sites.
void onLambdaObjectDelta(SolverContext& ctx, const Key& k) {
  const Program& p = ctx.prog;
  ValueId lam = k.c[0];
  for (const Key& t : ctx.rels[RelId::kVarPointsTo].all()) {
    if (t.c[1] != lam)
      continue;
    for (InsnId u : p.varUses[t.c[0]]) {
      const Instruction& ins = p.insns[u];
      if (ins.op != Opcode::Call)
        continue;
      if (ins.callKind != CallKind::Virtual &&
          ins.callKind != CallKind::Interface)
        continue;
      if (ins.base == t.c[0] && ctx.reachable(ins.method))
        evalSite(ctx, u);
    }
  }
}

void onLambdaEdgeDelta(SolverContext& ctx, const Key& k) {
  flowLambdaEdge(ctx, k.c[0], k.c[1], k.c[2]);
}

// Implementation is an instance method: the receiver is the first captured
// value when the site captures anything, else the interface call's first
// argument.
void onInstanceImplDelta(SolverContext& ctx, const Key& k) {
  InsnId indy = k.c[0];
  bool bound = !ctx.prog.insns[indy].actuals.empty();
  ctx.rels[RelId::kReceiverShift].insert(
      make4(k.c[2], k.c[1], bound ? 1 : 0, bound ? 0 : 1));
}

void onReceiverShiftDelta(SolverContext& ctx, const Key& k) {
  ValueId lam = k.c[0];
  MethodId m = k.c[1];
  for (const Key& e : ctx.rels[RelId::kLambdaEdge].all())
    if (e.c[2] == lam && e.c[1] == m)
      flowLambdaEdge(ctx, e.c[0], m, lam);
}

void onLambdaCapturedDelta(SolverContext& ctx, const Key& k) {
  InsnId indy = k.c[0];
  for (const Key& o : ctx.rels[RelId::kLambdaObject].all()) {
    if (o.c[3] != indy)
      continue;
    for (const Key& e : ctx.rels[RelId::kLambdaEdge].all())
      if (e.c[2] == o.c[0] && e.c[1] == o.c[1])
        flowLambdaEdge(ctx, e.c[0], o.c[1], o.c[0]);
  }
}

} // namespace

void lambdaTryDispatch(SolverContext& ctx, InsnId site, ValueId recv) {
  const Program& p = ctx.prog;
  const Instruction& ins = p.insns[site];
  StrId n = p.strings.find(ins.calleeSimpleName);
  if (n == kNone)
    return;
  for (const Key& o : ctx.rels[RelId::kLambdaObject].byCol0(recv)) {
    if (o.c[2] != n)
      continue;
    if (ctx.opts.strictLambdaDispatch) {
      TypeId lamType = ctx.values.at(recv).b;
      if (ins.calleeDeclType == kNone ||
          !p.typeCompat(ins.calleeDeclType, lamType))
        continue;
    }
    ctx.emitLambdaEdge(site, o.c[1], recv);
    flowLambdaEdge(ctx, site, o.c[1], recv);
  }
}

void flowLambdaEdge(SolverContext& ctx, InsnId site, MethodId impl,
                    ValueId lam) {
  const Program& p = ctx.prog;
  InsnId indy = kNone;
  for (const Key& o : ctx.rels[RelId::kLambdaObject].byCol0(lam))
    if (o.c[1] == impl)
      indy = o.c[3];
  if (indy == kNone)
    return;

  const Instruction& ins = p.insns[site];
  const MethodInfo& mi = p.methods[impl];
  size_t cap = p.insns[indy].actuals.size();

  if (ins.assignRet != kNone && mi.returnVar != kNone)
    for (const Key& t : ctx.vpt(mi.returnVar))
      ctx.emitVPT(ins.assignRet, t.c[1]);

  if (mi.isConstructor()) {
    // Constructor reference: the interface call yields the new object.
    ValueId obj = ctx.values.mock(mi.declaringType, site);
    ctx.emitVPT(mi.thisVar, obj);
    ctx.emitVPT(ins.assignRet, obj);
  }

  if (mi.isInstance())
    ctx.rels[RelId::kInstanceImpl].insert(make3(indy, impl, lam));
  else
    ctx.rels[RelId::kReceiverShift].insert(make4(lam, impl, 0, 0));

  for (const Key& s : ctx.rels[RelId::kReceiverShift].byCol0(lam)) {
    if (s.c[1] != impl)
      continue;
    u32 kRecv = s.c[2]; // captured values consumed by the receiver
    u32 nRecv = s.c[3]; // call arguments consumed by the receiver

    for (size_t a = nRecv; a < ins.actuals.size(); ++a) {
      long idx = static_cast<long>(cap) - static_cast<long>(kRecv + nRecv) +
                 static_cast<long>(a);
      if (idx < 0 || idx >= static_cast<long>(mi.formals.size())) {
        ctx.diag(Severity::Warning, ins.id,
                 "lambda argument " + std::to_string(a) +
                     " has no parameter slot in '" + mi.id + "'; skipped");
        continue;
      }
      for (const Key& t : ctx.vpt(ins.actuals[a]))
        ctx.emitVPT(mi.formals[static_cast<size_t>(idx)], t.c[1]);
    }

    for (const Key& c : ctx.rels[RelId::kLambdaCaptured].byCol0(indy)) {
      u32 pos = c.c[1];
      if (pos < kRecv)
        continue; // receiver slot, handled below
      u32 idx = pos - kRecv;
      if (idx >= mi.formals.size()) {
        ctx.diag(Severity::Warning, p.insns[indy].id,
                 "captured value " + std::to_string(pos) +
                     " has no parameter slot in '" + mi.id + "'; skipped");
        continue;
      }
      ctx.emitVPT(mi.formals[idx], c.c[2]);
    }

    if (nRecv == 1 && !ins.actuals.empty() && mi.thisVar != kNone)
      for (const Key& t : ctx.vpt(ins.actuals[0]))
        ctx.emitVPT(mi.thisVar, t.c[1]);
    if (kRecv == 1 && mi.thisVar != kNone)
      for (const Key& c : ctx.rels[RelId::kLambdaCaptured].byCol0(indy))
        if (c.c[1] == 0)
          ctx.emitVPT(mi.thisVar, c.c[2]);
  }
}

void register_lambda_rules(RulePack& pack) {
  pack.on(RelId::kBootstrapEdge, &onBootstrapEdgeDelta);
  pack.on(RelId::kMetafactoryInvoke, &onMetafactoryInvokeDelta);
  pack.on(RelId::kLambdaObject, &onLambdaObjectDelta);
  pack.on(RelId::kLambdaEdge, &onLambdaEdgeDelta);
  pack.on(RelId::kInstanceImpl, &onInstanceImplDelta);
  pack.on(RelId::kReceiverShift, &onReceiverShiftDelta);
  pack.on(RelId::kLambdaCaptured, &onLambdaCapturedDelta);
}

} // namespace dynapt
