/*
 * Copyright (c) 2026 dynapt contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "dynapt/values.hpp"

namespace dynapt {

TypeId ValueStore::dispatchType(ValueId id) const {
  Value v = at(id);
  const WellKnown& wk = prog_->known;
  switch (v.kind) {
  case ValueKind::Alloc:
  case ValueKind::Mock:
  case ValueKind::HandleMock:
    return v.b;
  case ValueKind::MethodHandle:
    return wk.methodHandle;
  case ValueKind::MethodTypeV:
    return wk.methodType;
  case ValueKind::Lookup:
    return wk.lookup;
  case ValueKind::ClassObj:
    return wk.clazz;
  case ValueKind::MethodObj:
    return wk.reflectMethod;
  case ValueKind::Str:
  case ValueKind::TopStr:
    return wk.string;
  case ValueKind::Int:
    return wk.intType;
  }
  return kNone;
}

std::string ValueStore::renderMType(MTypeId mt) const {
  if (mt == kNone)
    return "(?)?";
  MethodType t = mtypes_.at(mt);
  std::string out = "(";
  for (size_t i = 0; i < t.params.size(); ++i) {
    if (i)
      out += ',';
    out += prog_->types[t.params[i]].id;
  }
  out += ')';
  out += prog_->types[t.ret].id;
  return out;
}

namespace {

std::string escaped(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
    case '\\': out += "\\\\"; break;
    case '\t': out += "\\t"; break;
    case '\n': out += "\\n"; break;
    case '"': out += "\\\""; break;
    default: out += c;
    }
  }
  return out;
}

} // namespace

std::string ValueStore::render(ValueId id) const {
  Value v = at(id);
  const Program& p = *prog_;
  switch (v.kind) {
  case ValueKind::Alloc:
    return "new " + p.types[v.b].id + "@" + p.insns[v.a].id;
  case ValueKind::Mock:
    return "mock " + p.types[v.b].id + "@" + p.insns[v.a].id;
  case ValueKind::HandleMock:
    return "mock " + p.types[v.b].id + "@" + render(v.a);
  case ValueKind::MethodHandle:
    return "MH(" + p.methods[v.a].id + "," + renderMType(v.b) + ")";
  case ValueKind::MethodTypeV:
    return "MT(" + renderMType(v.a) + ")";
  case ValueKind::Lookup:
    return "Lookup(" + p.types[v.a].id + ")";
  case ValueKind::ClassObj:
    return "Class(" + p.types[v.a].id + ")";
  case ValueKind::MethodObj:
    return "Method(" + p.methods[v.a].id + ")";
  case ValueKind::Str:
    return "\"" + escaped(p.strings.text(v.a)) + "\"";
  case ValueKind::TopStr:
    return "<any-string>";
  case ValueKind::Int: {
    auto raw = (static_cast<u64>(v.b) << 32) | v.a;
    return "int:" + std::to_string(static_cast<std::int64_t>(raw));
  }
  }
  return "?";
}

bool ValueStore::asTypeCompat(MTypeId from, MTypeId to) const {
  if (from == to)
    return true;
  if (from == kNone || to == kNone)
    return false;
  MethodType a = mtypes_.at(from);
  MethodType b = mtypes_.at(to);
  if (a.params.size() != b.params.size())
    return false;
  if (!prog_->typeCompat(a.ret, b.ret))
    return false;
  for (size_t i = 0; i < a.params.size(); ++i)
    if (!prog_->typeCompat(a.params[i], b.params[i]))
      return false;
  return true;
}

} // namespace dynapt
