/*
 * Copyright (c) 2026 dynapt contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "dynapt/rules.hpp"

// Constant-string reflection kernel: Class.forName plus method/constructor
// reification. Only string constants (and, under --top-string-matches-all,
// the unknown string) resolve; everything else derives nothing.

namespace dynapt {

namespace {

template <class F>
void eachVpt(SolverContext& ctx, VarId v, ValueKind kind, F&& f) {
  if (v == kNone)
    return;
  for (const Key& t : ctx.vpt(v)) {
    Value val = ctx.values.at(t.c[1]);
    if (val.kind == kind)
      f(val);
  }
}

void forNameRule(SolverContext& ctx, InsnId i) {
  const Program& p = ctx.prog;
  const Instruction& ins = p.insns[i];
  if (ins.actuals.empty())
    return;
  for (const Key& t : ctx.vpt(ins.actuals[0])) {
    Value nv = ctx.values.at(t.c[1]);
    if (nv.kind == ValueKind::Str) {
      TypeId ty = p.findType(p.strings.text(nv.a));
      if (ty == kNone)
        ctx.diag(Severity::Warning, ins.id,
                 "Class.forName of undeclared type '" + p.strings.text(nv.a) +
                     "'");
      else
        ctx.emitVPT(ins.assignRet, ctx.values.classObj(ty));
    } else if (nv.kind == ValueKind::TopStr) {
      if (!ctx.opts.topStringMatchesAll) {
        ctx.diag(Severity::Warning, ins.id,
                 "non-constant class name in Class.forName; "
                 "no targets derived");
        continue;
      }
      for (TypeId ty = 0; ty < p.types.size(); ++ty)
        ctx.emitVPT(ins.assignRet, ctx.values.classObj(ty));
    }
  }
}

void getMethodRule(SolverContext& ctx, InsnId i, bool declaredOnly) {
  const Program& p = ctx.prog;
  const Instruction& ins = p.insns[i];
  if (ins.actuals.empty())
    return;
  eachVpt(ctx, ins.base, ValueKind::ClassObj, [&](const Value& cls) {
    for (const Key& t : ctx.vpt(ins.actuals[0])) {
      Value nv = ctx.values.at(t.c[1]);
      if (nv.kind == ValueKind::Str) {
        for (MethodId m :
             p.methodsNamed(cls.a, p.strings.text(nv.a), declaredOnly))
          ctx.emitVPT(ins.assignRet, ctx.values.methodObj(m));
      } else if (nv.kind == ValueKind::TopStr &&
                 ctx.opts.topStringMatchesAll) {
        const std::vector<TypeId> self{cls.a};
        const std::vector<TypeId>& scope =
            declaredOnly ? self : p.ancestors[cls.a];
        for (TypeId ty : scope)
          for (MethodId m : p.types[ty].methods)
            if (!p.methods[m].isConstructor())
              ctx.emitVPT(ins.assignRet, ctx.values.methodObj(m));
      }
    }
  });
}

void getConstructorRule(SolverContext& ctx, InsnId i) {
  const Program& p = ctx.prog;
  const Instruction& ins = p.insns[i];
  eachVpt(ctx, ins.base, ValueKind::ClassObj, [&](const Value& cls) {
    for (MethodId m : p.constructorsOf(cls.a))
      ctx.emitVPT(ins.assignRet, ctx.values.methodObj(m));
  });
}

} // namespace

void reflectionEvalCall(SolverContext& ctx, InsnId i) {
  switch (ctx.prog.insns[i].apiOp) {
  case ApiOp::ForName:
    forNameRule(ctx, i);
    break;
  case ApiOp::GetMethod:
    getMethodRule(ctx, i, false);
    break;
  case ApiOp::GetDeclaredMethod:
    getMethodRule(ctx, i, true);
    break;
  case ApiOp::GetConstructor:
  case ApiOp::GetDeclaredConstructor:
    getConstructorRule(ctx, i);
    break;
  default:
    break;
  }
}

} // namespace dynapt
