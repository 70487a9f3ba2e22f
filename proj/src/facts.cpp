/*
 * Copyright (c) 2026 dynapt contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "dynapt/facts.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace dynapt {

std::optional<std::string> DirFactSource::read(const std::string& name) const {
  std::ifstream in(dir_ / name, std::ios::binary);
  if (!in)
    return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

struct Row {
  unsigned line;
  std::vector<std::string> fields;
};

// TAB-separated rows; '#' starts a comment line; blank lines are skipped.
std::vector<Row> parse_rows(const std::string& content) {
  std::vector<Row> rows;
  unsigned lineNo = 0;
  size_t pos = 0;
  while (pos <= content.size()) {
    size_t eol = content.find('\n', pos);
    std::string line = content.substr(
        pos, eol == std::string::npos ? std::string::npos : eol - pos);
    pos = eol == std::string::npos ? content.size() + 1 : eol + 1;
    ++lineNo;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty() || line[0] == '#')
      continue;
    Row r;
    r.line = lineNo;
    size_t f = 0;
    while (true) {
      size_t tab = line.find('\t', f);
      if (tab == std::string::npos) {
        r.fields.push_back(line.substr(f));
        break;
      }
      r.fields.push_back(line.substr(f, tab - f));
      f = tab + 1;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  if (s == "-" || s.empty())
    return out;
  size_t pos = 0;
  while (true) {
    size_t c = s.find(',', pos);
    if (c == std::string::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, c - pos));
    pos = c + 1;
  }
}

const char* const kBoxedPairs[][2] = {
    {"int", "java.lang.Integer"},       {"boolean", "java.lang.Boolean"},
    {"byte", "java.lang.Byte"},         {"char", "java.lang.Character"},
    {"short", "java.lang.Short"},       {"long", "java.lang.Long"},
    {"float", "java.lang.Float"},       {"double", "java.lang.Double"},
};

struct Loader {
  const FactSource& src;
  Program prog;

  explicit Loader(const FactSource& s) : src(s) {}

  [[noreturn]] void fail(const std::string& file, unsigned line,
                         const std::string& msg) {
    throw LoadError(file + ":" + std::to_string(line) + ": " + msg);
  }

  std::vector<Row> required(const std::string& file) {
    auto content = src.read(file);
    if (!content)
      throw LoadError(src.origin() + ": missing required fact file " + file);
    return parse_rows(*content);
  }

  void arity(const std::string& file, const Row& r, size_t n) {
    if (r.fields.size() != n)
      fail(file, r.line,
           "expected " + std::to_string(n) + " fields, got " +
               std::to_string(r.fields.size()));
  }

  TypeId typeRef(const std::string& file, unsigned line, const std::string& id) {
    TypeId t = prog.findType(id);
    if (t == kNone)
      fail(file, line, "undeclared type '" + id + "'");
    return t;
  }
  MethodId methodRef(const std::string& file, unsigned line,
                     const std::string& id) {
    MethodId m = prog.findMethod(id);
    if (m == kNone)
      fail(file, line, "undeclared method '" + id + "'");
    return m;
  }

  // Variables are created on first mention; the name must be scoped to the
  // method owning the mentioning row.
  VarId varRef(const std::string& file, unsigned line, MethodId m,
               const std::string& full) {
    const std::string& owner = prog.methods[m].id;
    if (full.size() <= owner.size() + 1 || full.compare(0, owner.size(), owner) != 0 ||
        full[owner.size()] != '/')
      fail(file, line,
           "variable '" + full + "' is not scoped to method '" + owner + "'");
    auto it = prog.varIndex.find(full);
    if (it != prog.varIndex.end()) {
      if (prog.vars[it->second].method != m)
        fail(file, line, "variable '" + full + "' used by a different method");
      return it->second;
    }
    VarId v = static_cast<VarId>(prog.vars.size());
    prog.vars.push_back(VarInfo{full, m, false});
    prog.varIndex.emplace(full, v);
    return v;
  }

  std::int64_t intPayload(const std::string& file, unsigned line,
                          const std::string& s) {
    try {
      size_t used = 0;
      std::int64_t v = std::stoll(s, &used);
      if (used != s.size())
        fail(file, line, "malformed integer '" + s + "'");
      return v;
    } catch (const LoadError&) {
      throw;
    } catch (...) {
      fail(file, line, "malformed integer '" + s + "'");
    }
  }

  // "(T1,T2)R" with all types declared.
  MTypeId mtypeLiteral(const std::string& file, unsigned line,
                       const std::string& s) {
    if (s.size() < 3 || s.front() != '(')
      fail(file, line, "malformed method-type literal '" + s + "'");
    size_t close = s.find(')');
    if (close == std::string::npos || close + 1 >= s.size())
      fail(file, line, "malformed method-type literal '" + s + "'");
    std::vector<TypeId> params;
    std::string inner = s.substr(1, close - 1);
    if (!inner.empty())
      for (const std::string& p : split_commas(inner))
        params.push_back(typeRef(file, line, p));
    TypeId ret = typeRef(file, line, s.substr(close + 1));
    return prog.mtypes.intern(ret, std::move(params));
  }

  // ---- pass 1: types ----
  void loadTypes() {
    const std::string file = "Type.facts";
    auto rows = required(file);
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      return a.fields[0] < b.fields[0];
    });
    for (const Row& r : rows) {
      arity(file, r, 4);
      const std::string& id = r.fields[0];
      if (prog.typeIndex.count(id))
        fail(file, r.line, "duplicate type '" + id + "'");
      TypeInfo t;
      t.id = id;
      if (r.fields[1] == "class")
        t.kind = TypeKind::Class;
      else if (r.fields[1] == "interface")
        t.kind = TypeKind::Interface;
      else if (r.fields[1] == "array")
        t.kind = TypeKind::Array;
      else if (r.fields[1] == "primitive")
        t.kind = TypeKind::Primitive;
      else
        fail(file, r.line, "unknown type kind '" + r.fields[1] + "'");
      prog.typeIndex.emplace(id, static_cast<TypeId>(prog.types.size()));
      prog.types.push_back(std::move(t));
    }
    // Links resolve after all ids exist.
    for (const Row& r : rows) {
      TypeId t = prog.findType(r.fields[0]);
      if (r.fields[2] != "-")
        prog.types[t].superclass = typeRef(file, r.line, r.fields[2]);
      for (const std::string& i : split_commas(r.fields[3]))
        prog.types[t].interfaces.push_back(typeRef(file, r.line, i));
    }
    checkAcyclic(file);
  }

  void checkAcyclic(const std::string& file) {
    // 0 unvisited / 1 in progress / 2 done
    std::vector<int> state(prog.types.size(), 0);
    std::vector<TypeId> stack;
    for (TypeId t = 0; t < prog.types.size(); ++t)
      dfsAcyclic(file, t, state);
  }
  void dfsAcyclic(const std::string& file, TypeId t, std::vector<int>& state) {
    if (state[t] == 2)
      return;
    if (state[t] == 1)
      throw LoadError(file + ": type hierarchy cycle through '" +
                      prog.types[t].id + "'");
    state[t] = 1;
    if (prog.types[t].superclass != kNone)
      dfsAcyclic(file, prog.types[t].superclass, state);
    for (TypeId i : prog.types[t].interfaces)
      dfsAcyclic(file, i, state);
    state[t] = 2;
  }

  // ---- pass 2: methods + their variable maps ----
  void loadMethods() {
    const std::string file = "Method.facts";
    auto rows = required(file);
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      return a.fields[0] < b.fields[0];
    });
    for (const Row& r : rows) {
      arity(file, r, 6);
      const std::string& id = r.fields[0];
      if (prog.methodIndex.count(id))
        fail(file, r.line, "duplicate method '" + id + "'");
      MethodInfo m;
      m.id = id;
      m.declaringType = typeRef(file, r.line, r.fields[1]);
      m.name = prog.strings.intern(r.fields[2]);
      m.returnType = typeRef(file, r.line, r.fields[3]);
      for (const std::string& p : split_commas(r.fields[4]))
        m.paramTypes.push_back(typeRef(file, r.line, p));
      if (r.fields[5] == "static")
        m.flag = MethodFlag::Static;
      else if (r.fields[5] == "constructor")
        m.flag = MethodFlag::Constructor;
      else if (r.fields[5] == "instance")
        m.flag = MethodFlag::Instance;
      else
        fail(file, r.line, "unknown method flag '" + r.fields[5] + "'");
      if (m.isConstructor()) {
        if (r.fields[2] != "<init>")
          fail(file, r.line, "constructor must be named <init>");
        if (prog.types[m.returnType].id != "void")
          fail(file, r.line, "constructor must return void");
      } else if (r.fields[2] == "<init>") {
        fail(file, r.line, "<init> requires the constructor flag");
      }
      m.mtype = prog.mtypes.intern(m.returnType, m.paramTypes);
      m.formals.assign(m.paramTypes.size(), kNone);
      MethodId mid = static_cast<MethodId>(prog.methods.size());
      prog.methodIndex.emplace(id, mid);
      prog.types[m.declaringType].methods.push_back(mid);
      prog.methods.push_back(std::move(m));
    }

    const std::string ff = "FormalParam.facts";
    for (const Row& r : required(ff)) {
      arity(ff, r, 3);
      MethodId m = methodRef(ff, r.line, r.fields[0]);
      auto idx = intPayload(ff, r.line, r.fields[1]);
      MethodInfo& mi = prog.methods[m];
      if (idx < 0 || static_cast<size_t>(idx) >= mi.paramTypes.size())
        fail(ff, r.line, "formal index " + r.fields[1] + " out of range for '" +
                             mi.id + "'");
      if (mi.formals[idx] != kNone)
        fail(ff, r.line, "duplicate formal " + r.fields[1] + " of '" + mi.id + "'");
      mi.formals[idx] = varRef(ff, r.line, m, r.fields[2]);
    }
    const std::string tf = "ThisVar.facts";
    for (const Row& r : required(tf)) {
      arity(tf, r, 2);
      MethodId m = methodRef(tf, r.line, r.fields[0]);
      MethodInfo& mi = prog.methods[m];
      if (mi.isStatic())
        fail(tf, r.line, "static method '" + mi.id + "' cannot have a this-var");
      if (mi.thisVar != kNone)
        fail(tf, r.line, "duplicate this-var for '" + mi.id + "'");
      mi.thisVar = varRef(tf, r.line, m, r.fields[1]);
    }
    const std::string rf = "ReturnVar.facts";
    for (const Row& r : required(rf)) {
      arity(rf, r, 2);
      MethodId m = methodRef(rf, r.line, r.fields[0]);
      MethodInfo& mi = prog.methods[m];
      if (prog.types[mi.returnType].id == "void")
        fail(rf, r.line, "void method '" + mi.id + "' cannot have a return var");
      if (mi.returnVar != kNone)
        fail(rf, r.line, "duplicate return var for '" + mi.id + "'");
      mi.returnVar = varRef(rf, r.line, m, r.fields[1]);
      prog.vars[mi.returnVar].isReturnVar = true;
    }

    // The variable maps must be complete, not merely consistent.
    for (const MethodInfo& mi : prog.methods) {
      for (size_t n = 0; n < mi.formals.size(); ++n)
        if (mi.formals[n] == kNone)
          throw LoadError("FormalParam.facts: method '" + mi.id +
                          "' is missing formal " + std::to_string(n));
      if (!mi.isStatic() && mi.thisVar == kNone)
        throw LoadError("ThisVar.facts: non-static method '" + mi.id +
                        "' has no this-var");
      if (prog.types[mi.returnType].id != "void" && mi.returnVar == kNone)
        throw LoadError("ReturnVar.facts: method '" + mi.id +
                        "' returns a value but has no return var");
    }
  }

  // ---- pass 3: instructions ----

  struct RawInsn {
    std::string file;
    Row row;
    Opcode op;
  };
  std::vector<RawInsn> rawInsns;

  void collect(const std::string& file, Opcode op, size_t fields) {
    for (Row& r : required(file)) {
      arity(file, r, fields);
      rawInsns.push_back(RawInsn{file, std::move(r), op});
    }
  }

  void loadInstructions() {
    collect("Alloc.facts", Opcode::Alloc, 4);
    collect("Move.facts", Opcode::Move, 4);
    collect("StoreField.facts", Opcode::StoreField, 5);
    collect("LoadField.facts", Opcode::LoadField, 5);
    collect("StoreArray.facts", Opcode::StoreArray, 4);
    collect("LoadArray.facts", Opcode::LoadArray, 4);
    collect("Const.facts", Opcode::Const, 5);
    collect("Call.facts", Opcode::Call, 7);
    collect("InvokeDynamic.facts", Opcode::InvokeDynamic, 7);

    std::sort(rawInsns.begin(), rawInsns.end(),
              [](const RawInsn& a, const RawInsn& b) {
                return a.row.fields[0] < b.row.fields[0];
              });

    for (const RawInsn& ri : rawInsns) {
      const auto& f = ri.row.fields;
      const std::string& file = ri.file;
      unsigned line = ri.row.line;
      if (prog.insnIndex.count(f[0]))
        fail(file, line, "duplicate instruction '" + f[0] + "'");
      Instruction ins;
      ins.id = f[0];
      ins.method = methodRef(file, line, f[1]);
      ins.op = ri.op;
      MethodId m = ins.method;
      switch (ri.op) {
      case Opcode::Alloc:
        ins.to = varRef(file, line, m, f[2]);
        ins.allocType = typeRef(file, line, f[3]);
        break;
      case Opcode::Move:
        ins.to = varRef(file, line, m, f[2]);
        ins.from = varRef(file, line, m, f[3]);
        break;
      case Opcode::StoreField:
        if (f[2] == "-")
          ins.base = kNone; // static field
        else
          ins.base = varRef(file, line, m, f[2]);
        ins.field = prog.strings.intern(f[3]);
        ins.from = varRef(file, line, m, f[4]);
        break;
      case Opcode::LoadField:
        if (f[2] == "-")
          ins.base = kNone;
        else
          ins.base = varRef(file, line, m, f[2]);
        ins.field = prog.strings.intern(f[3]);
        ins.to = varRef(file, line, m, f[4]);
        break;
      case Opcode::StoreArray:
        ins.base = varRef(file, line, m, f[2]);
        ins.from = varRef(file, line, m, f[3]);
        break;
      case Opcode::LoadArray:
        ins.base = varRef(file, line, m, f[2]);
        ins.to = varRef(file, line, m, f[3]);
        break;
      case Opcode::Const:
        ins.to = varRef(file, line, m, f[2]);
        if (f[3] == "string") {
          ins.constKind = ConstKind::Str;
          ins.constRef = prog.strings.intern(f[4]);
        } else if (f[3] == "class") {
          ins.constKind = ConstKind::ClassRef;
          ins.constRef = typeRef(file, line, f[4]);
        } else if (f[3] == "mh") {
          ins.constKind = ConstKind::MethodHandleRef;
          ins.constRef = methodRef(file, line, f[4]);
        } else if (f[3] == "mt") {
          ins.constKind = ConstKind::MethodTypeLit;
          ins.constRef = mtypeLiteral(file, line, f[4]);
        } else if (f[3] == "int") {
          ins.constKind = ConstKind::Int;
          ins.constInt = intPayload(file, line, f[4]);
        } else {
          fail(file, line, "unknown const kind '" + f[3] + "'");
        }
        break;
      case Opcode::Call: {
        if (f[2] == "static")
          ins.callKind = CallKind::Static;
        else if (f[2] == "special")
          ins.callKind = CallKind::Special;
        else if (f[2] == "virtual")
          ins.callKind = CallKind::Virtual;
        else if (f[2] == "interface")
          ins.callKind = CallKind::Interface;
        else if (f[2] == "mhpoly")
          ins.callKind = CallKind::MhPoly;
        else
          fail(file, line, "unknown call kind '" + f[2] + "'");
        if (f[3] == "-") {
          if (ins.callKind != CallKind::Static)
            fail(file, line, "non-static call requires a base variable");
        } else {
          if (ins.callKind == CallKind::Static)
            fail(file, line, "static call cannot have a base variable");
          ins.base = varRef(file, line, m, f[3]);
        }
        ins.calleeName = f[4];
        ins.calleeDescriptor = mtypeLiteral(file, line, f[5]);
        if (f[6] != "-")
          ins.assignRet = varRef(file, line, m, f[6]);
        break;
      }
      case Opcode::InvokeDynamic: {
        ins.bootMethod = methodRef(file, line, f[2]);
        ins.dynName = prog.strings.intern(f[3]);
        TypeId ret = typeRef(file, line, f[4]);
        std::vector<TypeId> params;
        for (const std::string& p : split_commas(f[5]))
          params.push_back(typeRef(file, line, p));
        ins.dynType = prog.mtypes.intern(ret, std::move(params));
        if (f[6] != "-")
          ins.assignRet = varRef(file, line, m, f[6]);
        const std::string& bmId = prog.methods[ins.bootMethod].id;
        ins.metafactorySite =
            bmId == "java.lang.invoke.LambdaMetafactory.metafactory" ||
            bmId == "java.lang.invoke.LambdaMetafactory.altMetafactory";
        break;
      }
      default:
        break;
      }
      InsnId iid = static_cast<InsnId>(prog.insns.size());
      prog.insnIndex.emplace(ins.id, iid);
      prog.methods[m].body.push_back(iid);
      prog.insns.push_back(std::move(ins));
    }
  }

  void loadActualsAndBootArgs() {
    const std::string af = "ActualParam.facts";
    std::unordered_map<InsnId, std::vector<std::pair<unsigned, VarId>>> acts;
    for (const Row& r : required(af)) {
      arity(af, r, 3);
      auto it = prog.insnIndex.find(r.fields[0]);
      if (it == prog.insnIndex.end())
        fail(af, r.line, "unknown instruction '" + r.fields[0] + "'");
      Instruction& ins = prog.insns[it->second];
      if (ins.op != Opcode::Call && ins.op != Opcode::InvokeDynamic)
        fail(af, r.line, "instruction '" + r.fields[0] + "' takes no actuals");
      auto idx = intPayload(af, r.line, r.fields[1]);
      if (idx < 0)
        fail(af, r.line, "negative actual index");
      acts[it->second].emplace_back(static_cast<unsigned>(idx),
                                    varRef(af, r.line, ins.method, r.fields[2]));
    }
    for (auto& [iid, list] : acts) {
      std::sort(list.begin(), list.end());
      Instruction& ins = prog.insns[iid];
      for (size_t n = 0; n < list.size(); ++n) {
        if (list[n].first != n)
          throw LoadError(af + ": actuals of instruction '" + ins.id +
                          "' are not dense from 0");
        ins.actuals.push_back(list[n].second);
      }
    }

    const std::string bf = "BootArg.facts";
    std::unordered_map<InsnId, std::vector<std::pair<unsigned, BootArg>>> bargs;
    for (const Row& r : required(bf)) {
      arity(bf, r, 4);
      auto it = prog.insnIndex.find(r.fields[0]);
      if (it == prog.insnIndex.end())
        fail(bf, r.line, "unknown instruction '" + r.fields[0] + "'");
      Instruction& ins = prog.insns[it->second];
      if (ins.op != Opcode::InvokeDynamic)
        fail(bf, r.line, "boot args require an invokedynamic instruction");
      auto idx = intPayload(bf, r.line, r.fields[1]);
      if (idx < 0)
        fail(bf, r.line, "negative boot-arg index");
      BootArg arg;
      const std::string& kind = r.fields[2];
      if (kind == "mh") {
        arg.kind = BootArgKind::MethodHandleRef;
        arg.ref = methodRef(bf, r.line, r.fields[3]);
      } else if (kind == "mt") {
        arg.kind = BootArgKind::MethodTypeLit;
        arg.ref = mtypeLiteral(bf, r.line, r.fields[3]);
      } else if (kind == "string") {
        arg.kind = BootArgKind::Str;
        arg.ref = prog.strings.intern(r.fields[3]);
      } else if (kind == "class") {
        arg.kind = BootArgKind::ClassRef;
        arg.ref = typeRef(bf, r.line, r.fields[3]);
      } else if (kind == "int") {
        arg.kind = BootArgKind::Int;
        arg.intValue = intPayload(bf, r.line, r.fields[3]);
      } else {
        fail(bf, r.line, "unknown boot-arg kind '" + kind + "'");
      }
      bargs[it->second].emplace_back(static_cast<unsigned>(idx), arg);
    }
    for (auto& [iid, list] : bargs) {
      std::sort(list.begin(), list.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      Instruction& ins = prog.insns[iid];
      for (size_t n = 0; n < list.size(); ++n) {
        if (list[n].first != n)
          throw LoadError(bf + ": boot args of instruction '" + ins.id +
                          "' are not dense from 0");
        ins.bootArgs.push_back(list[n].second);
      }
    }
  }

  void loadEntriesAndExpectations() {
    const std::string ef = "EntryPoint.facts";
    for (const Row& r : required(ef)) {
      arity(ef, r, 1);
      prog.entryPoints.push_back(methodRef(ef, r.line, r.fields[0]));
    }
    std::sort(prog.entryPoints.begin(), prog.entryPoints.end());
    prog.entryPoints.erase(
        std::unique(prog.entryPoints.begin(), prog.entryPoints.end()),
        prog.entryPoints.end());

    auto loadExpected = [&](const std::string& file, std::vector<MethodId>& out) {
      auto content = src.read(file);
      if (!content)
        return false;
      for (const Row& r : parse_rows(*content)) {
        arity(file, r, 1);
        out.push_back(methodRef(file, r.line, r.fields[0]));
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return true;
    };
    bool a = loadExpected("ExpectedReachable.facts", prog.expectedReachable);
    bool b = loadExpected("ExpectedUnreachable.facts", prog.expectedUnreachable);
    prog.hasExpectations = a || b;
  }

  // ---- pass 4: derived state ----

  void classifyApi(Instruction& ins) {
    const std::string& name = ins.calleeName;
    size_t dot = name.rfind('.');
    ins.calleeSimpleName = dot == std::string::npos ? name : name.substr(dot + 1);
    std::string owner = dot == std::string::npos ? "" : name.substr(0, dot);
    ins.calleeDeclType = owner.empty() ? kNone : prog.findType(owner);
    const std::string& simple = ins.calleeSimpleName;

    auto bySimple = [&]() -> ApiOp {
      if (simple == "lookup") return ApiOp::Lookup;
      if (simple == "lookupClass") return ApiOp::LookupClass;
      if (simple == "unreflect" || simple == "unreflectSpecial" ||
          simple == "unreflectConstructor")
        return ApiOp::Unreflect;
      if (simple == "findVirtual") return ApiOp::FindVirtual;
      if (simple == "findStatic") return ApiOp::FindStatic;
      if (simple == "methodType") return ApiOp::MethodTypeMake;
      if (simple == "asType") return ApiOp::AsType;
      if (simple == "setTarget") return ApiOp::SetTarget;
      if (simple == "getTarget") return ApiOp::GetTarget;
      if (simple == "invoke") return ApiOp::PolyInvoke;
      if (simple == "invokeExact") return ApiOp::PolyInvokeExact;
      return ApiOp::UnmodeledInvoke;
    };

    if (ins.callKind == CallKind::MhPoly) {
      // Bare names: invoke, invokeExact, or an invoke-API method name.
      ins.apiOp = bySimple();
      return;
    }
    if (owner == "java.lang.invoke.MethodHandles") {
      ins.apiOp = simple == "lookup" ? ApiOp::Lookup : ApiOp::UnmodeledInvoke;
    } else if (owner == "java.lang.invoke.MethodHandles.Lookup") {
      ApiOp op = bySimple();
      ins.apiOp = (op == ApiOp::LookupClass || op == ApiOp::Unreflect ||
                   op == ApiOp::FindVirtual || op == ApiOp::FindStatic)
                      ? op
                      : ApiOp::UnmodeledInvoke;
    } else if (owner == "java.lang.invoke.MethodType") {
      ins.apiOp = simple == "methodType" ? ApiOp::MethodTypeMake
                                         : ApiOp::UnmodeledInvoke;
    } else if (owner == "java.lang.invoke.MethodHandle") {
      ApiOp op = bySimple();
      ins.apiOp = (op == ApiOp::AsType || op == ApiOp::PolyInvoke ||
                   op == ApiOp::PolyInvokeExact)
                      ? op
                      : ApiOp::UnmodeledInvoke;
    } else if (owner == "java.lang.invoke.CallSite" ||
               owner == "java.lang.invoke.ConstantCallSite" ||
               owner == "java.lang.invoke.MutableCallSite" ||
               owner == "java.lang.invoke.VolatileCallSite") {
      if (simple == "<init>")
        ins.apiOp = ApiOp::CallSiteCtor;
      else if (simple == "setTarget")
        ins.apiOp = ApiOp::SetTarget;
      else if (simple == "getTarget")
        ins.apiOp = ApiOp::GetTarget;
      else
        ins.apiOp = ApiOp::UnmodeledInvoke;
    } else if (owner == "java.lang.Class") {
      if (simple == "forName")
        ins.apiOp = ApiOp::ForName;
      else if (simple == "getMethod")
        ins.apiOp = ApiOp::GetMethod;
      else if (simple == "getDeclaredMethod")
        ins.apiOp = ApiOp::GetDeclaredMethod;
      else if (simple == "getConstructor")
        ins.apiOp = ApiOp::GetConstructor;
      else if (simple == "getDeclaredConstructor")
        ins.apiOp = ApiOp::GetDeclaredConstructor;
      else
        ins.apiOp = ApiOp::None;
    } else if (name.rfind("java.lang.invoke.", 0) == 0) {
      ins.apiOp = ApiOp::UnmodeledInvoke;
    } else {
      ins.apiOp = ApiOp::None;
    }
  }

  void finalize() {
    // Entry markers give instance entry points a receiver allocation site.
    for (MethodId e : prog.entryPoints) {
      Instruction marker;
      marker.id = "<entry:" + prog.methods[e].id + ">";
      marker.method = e;
      marker.op = Opcode::EntryMarker;
      InsnId iid = static_cast<InsnId>(prog.insns.size());
      prog.insnIndex.emplace(marker.id, iid);
      prog.entryMarkers.push_back(iid);
      prog.insns.push_back(std::move(marker));
    }

    // Reflexive-transitive supertype closure, sorted for binary search.
    prog.ancestors.resize(prog.types.size());
    for (TypeId t = 0; t < prog.types.size(); ++t)
      closure(t);

    for (const auto& pair : kBoxedPairs) {
      TypeId a = prog.findType(pair[0]);
      TypeId b = prog.findType(pair[1]);
      if (a == kNone || b == kNone)
        continue;
      prog.boxPairs.insert((static_cast<u64>(a) << 32) | b);
      prog.boxPairs.insert((static_cast<u64>(b) << 32) | a);
    }

    WellKnown& wk = prog.known;
    wk.object = prog.findType("java.lang.Object");
    wk.string = prog.findType("java.lang.String");
    wk.clazz = prog.findType("java.lang.Class");
    wk.reflectMethod = prog.findType("java.lang.reflect.Method");
    wk.callSite = prog.findType("java.lang.invoke.CallSite");
    wk.methodHandle = prog.findType("java.lang.invoke.MethodHandle");
    wk.methodType = prog.findType("java.lang.invoke.MethodType");
    wk.lookup = prog.findType("java.lang.invoke.MethodHandles.Lookup");
    wk.intType = prog.findType("int");
    wk.targetField = prog.strings.intern("$target");
    TypeId voidType = prog.findType("void");
    if (voidType != kNone)
      prog.voidNoArg = prog.mtypes.intern(voidType, {});

    prog.varUses.resize(prog.vars.size());
    auto use = [&](VarId v, InsnId i) {
      if (v == kNone)
        return;
      auto& list = prog.varUses[v];
      if (list.empty() || list.back() != i)
        list.push_back(i);
    };
    for (InsnId i = 0; i < prog.insns.size(); ++i) {
      Instruction& ins = prog.insns[i];
      switch (ins.op) {
      case Opcode::Move:
        use(ins.from, i);
        break;
      case Opcode::StoreField:
        use(ins.base, i);
        use(ins.from, i);
        break;
      case Opcode::LoadField:
        use(ins.base, i);
        prog.fieldLoads[ins.field].push_back(i);
        break;
      case Opcode::StoreArray:
        use(ins.base, i);
        use(ins.from, i);
        break;
      case Opcode::LoadArray:
        use(ins.base, i);
        prog.arrayLoads.push_back(i);
        break;
      case Opcode::Call:
        classifyApi(ins);
        use(ins.base, i);
        for (VarId a : ins.actuals)
          use(a, i);
        if (ins.apiOp == ApiOp::GetTarget)
          prog.getTargetSites.push_back(i);
        break;
      case Opcode::InvokeDynamic:
        for (VarId a : ins.actuals)
          use(a, i);
        break;
      default:
        break;
      }
    }
  }

  void closure(TypeId t) {
    if (!prog.ancestors[t].empty())
      return;
    std::vector<TypeId> out;
    std::vector<TypeId> work{t};
    std::unordered_set<TypeId> seen{t};
    while (!work.empty()) {
      TypeId c = work.back();
      work.pop_back();
      out.push_back(c);
      const TypeInfo& ti = prog.types[c];
      if (ti.superclass != kNone && seen.insert(ti.superclass).second)
        work.push_back(ti.superclass);
      for (TypeId i : ti.interfaces)
        if (seen.insert(i).second)
          work.push_back(i);
    }
    std::sort(out.begin(), out.end());
    prog.ancestors[t] = std::move(out);
  }

  Program run() {
    loadTypes();
    loadMethods();
    loadInstructions();
    loadActualsAndBootArgs();
    loadEntriesAndExpectations();
    finalize();
    return std::move(prog);
  }
};

} // namespace

Program load_program(const FactSource& source) { return Loader(source).run(); }

Program load_program(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw LoadError(dir.string() + ": not a directory");
  return load_program(DirFactSource(dir));
}

} // namespace dynapt
