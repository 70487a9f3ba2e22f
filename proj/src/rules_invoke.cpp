/*
 * Copyright (c) 2026 dynapt contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "dynapt/rules.hpp"

namespace dynapt {

namespace {

// Applies f to every committed points-to value of v with the given kind.
template <class F>
void eachVpt(SolverContext& ctx, VarId v, ValueKind kind, F&& f) {
  if (v == kNone)
    return;
  for (const Key& t : ctx.vpt(v)) {
    Value val = ctx.values.at(t.c[1]);
    if (val.kind == kind)
      f(t.c[1], val);
  }
}

VarId argVar(const Instruction& ins, size_t n) {
  return n < ins.actuals.size() ? ins.actuals[n] : kNone;
}

// findStatic / findVirtual: Lookup receiver, (Class, name, MethodType)
// arguments; produces MH(m, mt) for the resolved method.
void findRule(SolverContext& ctx, InsnId i, bool wantStatic) {
  const Program& p = ctx.prog;
  const Instruction& ins = p.insns[i];

  bool haveLookup = false;
  eachVpt(ctx, ins.base, ValueKind::Lookup,
          [&](ValueId, const Value&) { haveLookup = true; });
  if (!haveLookup)
    return;

  LookupMode mode = wantStatic ? LookupMode::StaticOnly : LookupMode::Virtual;
  eachVpt(ctx, argVar(ins, 0), ValueKind::ClassObj, [&](ValueId, const Value& cls) {
    eachVpt(ctx, argVar(ins, 2), ValueKind::MethodTypeV, [&](ValueId,
                                                            const Value& mtv) {
      MTypeId mt = mtv.a;
      VarId nameV = argVar(ins, 1);
      if (nameV == kNone)
        return;
      for (const Key& t : ctx.vpt(nameV)) {
        Value nv = ctx.values.at(t.c[1]);
        if (nv.kind == ValueKind::Str) {
          auto ms = p.methodLookup(cls.a, p.strings.text(nv.a), mt, mode);
          if (ms.empty())
            ctx.diag(Severity::Warning, ins.id,
                     "method handle lookup failed: no '" +
                         p.strings.text(nv.a) + ctx.values.renderMType(mt) +
                         "' in '" + p.types[cls.a].id + "'");
          else
            ctx.emitVPT(ins.assignRet, ctx.values.methodHandle(ms[0], mt));
        } else if (nv.kind == ValueKind::TopStr) {
          if (!ctx.opts.topStringMatchesAll) {
            ctx.diag(Severity::Warning, ins.id,
                     "non-constant method name in handle lookup; "
                     "no targets derived");
            continue;
          }
          // Every name matches: union over type-correct members in scope.
          const std::vector<TypeId> self{cls.a};
          const std::vector<TypeId>& scope =
              wantStatic ? self : p.ancestors[cls.a];
          for (TypeId ty : scope)
            for (MethodId m : p.types[ty].methods) {
              const MethodInfo& mi = p.methods[m];
              if (mi.isConstructor() || mi.isStatic() != wantStatic)
                continue;
              if (mi.mtype == mt)
                ctx.emitVPT(ins.assignRet, ctx.values.methodHandle(m, mt));
            }
        }
      }
    });
  });
}

// MethodType.methodType(ret [, p...]) with up to four parameter classes, or
// methodType(ret, MethodType) which reuses the argument's parameter list.
void methodTypeRule(SolverContext& ctx, InsnId i) {
  const Instruction& ins = ctx.prog.insns[i];
  size_t arity = ins.actuals.size();
  if (arity == 0)
    return;
  if (arity > 5) {
    ctx.diag(Severity::Warning, ins.id,
             "methodType with more than 4 parameter classes; not modeled");
    return;
  }

  auto emitMT = [&](TypeId ret, std::vector<TypeId> params) {
    MTypeId mt = ctx.values.mtypes().intern(ret, std::move(params));
    ctx.emitVPT(ins.assignRet, ctx.values.methodTypeVal(mt));
  };

  eachVpt(ctx, ins.actuals[0], ValueKind::ClassObj, [&](ValueId,
                                                        const Value& r) {
    if (arity == 1) {
      emitMT(r.a, {});
      return;
    }
    if (arity == 2)
      eachVpt(ctx, ins.actuals[1], ValueKind::MethodTypeV,
              [&](ValueId, const Value& m) {
                emitMT(r.a, ctx.values.mtypes().at(m.a).params);
              });
    // Parameter classes: cross product over the class objects each argument
    // variable points to.
    std::vector<std::vector<TypeId>> slots(arity - 1);
    for (size_t n = 1; n < arity; ++n)
      eachVpt(ctx, ins.actuals[n], ValueKind::ClassObj,
              [&](ValueId, const Value& c) { slots[n - 1].push_back(c.a); });
    for (const auto& s : slots)
      if (s.empty())
        return;
    std::vector<size_t> idx(slots.size(), 0);
    for (;;) {
      std::vector<TypeId> params(slots.size());
      for (size_t n = 0; n < slots.size(); ++n)
        params[n] = slots[n][idx[n]];
      emitMT(r.a, std::move(params));
      size_t n = 0;
      while (n < slots.size() && ++idx[n] == slots[n].size())
        idx[n++] = 0;
      if (n == slots.size())
        break;
    }
  });
}

void onHandleEdgeDelta(SolverContext& ctx, const Key& k) {
  flowHandleEdge(ctx, k.c[0], k.c[1], k.c[2]);
}

} // namespace

void evalPolySite(SolverContext& ctx, InsnId i) {
  const Instruction& ins = ctx.prog.insns[i];
  bool exact = ins.apiOp == ApiOp::PolyInvokeExact;
  eachVpt(ctx, ins.base, ValueKind::MethodHandle, [&](ValueId hid,
                                                      const Value& h) {
    // invokeExact is descriptor-exact only in strict mode; invoke adapts
    // arguments and return, so any as_type-convertible handle applies.
    bool ok = exact
                  ? (!ctx.opts.strictInvokeExact || ins.calleeDescriptor == h.b)
                  : ctx.values.asTypeCompat(ins.calleeDescriptor, h.b);
    if (ok)
      ctx.emitHandleEdge(i, h.a, hid);
  });
  for (const Key& e : ctx.rels[RelId::kHandleEdge].byCol0(i))
    flowHandleEdge(ctx, i, e.c[1], e.c[2]);
}

void flowHandleEdge(SolverContext& ctx, InsnId site, MethodId m,
                    ValueId handle) {
  const Program& p = ctx.prog;
  const Instruction& ins = p.insns[site];
  const MethodInfo& mi = p.methods[m];

  bool instance = mi.isInstance();
  size_t expected = mi.paramTypes.size() + (instance ? 1 : 0);
  if (ins.actuals.size() < expected)
    ctx.diag(Severity::Warning, ins.id,
             "handle invocation passes " + std::to_string(ins.actuals.size()) +
                 " arguments; '" + mi.id + "' takes " +
                 std::to_string(expected));

  if (instance && !ins.actuals.empty() && mi.thisVar != kNone)
    for (const Key& t : ctx.vpt(ins.actuals[0]))
      ctx.emitVPT(mi.thisVar, t.c[1]);
  size_t shift = instance ? 1 : 0;
  size_t avail = ins.actuals.size() > shift ? ins.actuals.size() - shift : 0;
  size_t n = std::min(avail, mi.formals.size());
  for (size_t a = 0; a < n; ++a)
    for (const Key& t : ctx.vpt(ins.actuals[a + shift]))
      ctx.emitVPT(mi.formals[a], t.c[1]);

  if (ins.assignRet != kNone && mi.returnVar != kNone)
    for (const Key& t : ctx.vpt(mi.returnVar))
      ctx.emitVPT(ins.assignRet, t.c[1]);

  if (mi.isConstructor()) {
    ValueId obj = ctx.values.handleMock(mi.declaringType, handle);
    ctx.emitVPT(mi.thisVar, obj);
    ctx.emitVPT(ins.assignRet, obj);
  }
}

void apiEvalCall(SolverContext& ctx, InsnId i) {
  const Program& p = ctx.prog;
  const Instruction& ins = p.insns[i];

  switch (ins.apiOp) {
  case ApiOp::CallSiteCtor:
  case ApiOp::SetTarget:
  case ApiOp::GetTarget:
    indyEvalCallSiteApi(ctx, i);
    return;
  case ApiOp::ForName:
  case ApiOp::GetMethod:
  case ApiOp::GetDeclaredMethod:
  case ApiOp::GetConstructor:
  case ApiOp::GetDeclaredConstructor:
    if (ctx.opts.reflection)
      reflectionEvalCall(ctx, i);
    return;
  case ApiOp::UnmodeledInvoke:
    ctx.unmodeled(ins.id,
                  ins.calleeName + ctx.values.renderMType(ins.calleeDescriptor));
    ctx.diag(Severity::Warning, ins.id,
             "unmodeled invoke API call '" + ins.calleeName + "'");
    return;
  default:
    break;
  }

  if (!ctx.opts.invokeApiRules)
    return;

  switch (ins.apiOp) {
  case ApiOp::Lookup:
    ctx.emitVPT(ins.assignRet,
                ctx.values.lookupVal(p.methods[ins.method].declaringType));
    return;
  case ApiOp::LookupClass:
    eachVpt(ctx, ins.base, ValueKind::Lookup, [&](ValueId, const Value& v) {
      ctx.emitVPT(ins.assignRet, ctx.values.classObj(v.a));
    });
    return;
  case ApiOp::Unreflect:
    eachVpt(ctx, argVar(ins, 0), ValueKind::MethodObj,
            [&](ValueId, const Value& v) {
              ctx.emitVPT(ins.assignRet, ctx.values.materializeHandle(v.a));
            });
    return;
  case ApiOp::FindVirtual:
    findRule(ctx, i, false);
    return;
  case ApiOp::FindStatic:
    findRule(ctx, i, true);
    return;
  case ApiOp::MethodTypeMake:
    methodTypeRule(ctx, i);
    return;
  case ApiOp::AsType:
    eachVpt(ctx, ins.base, ValueKind::MethodHandle, [&](ValueId,
                                                        const Value& h) {
      eachVpt(ctx, argVar(ins, 0), ValueKind::MethodTypeV,
              [&](ValueId, const Value& mtv) {
                if (ctx.values.asTypeCompat(h.b, mtv.a))
                  ctx.emitVPT(ins.assignRet,
                              ctx.values.methodHandle(h.a, mtv.a));
              });
    });
    return;
  default:
    return;
  }
}

void register_invoke_rules(RulePack& pack) {
  pack.on(RelId::kHandleEdge, &onHandleEdgeDelta);
}

} // namespace dynapt
