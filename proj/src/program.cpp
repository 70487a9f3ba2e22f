/*
 * Copyright (c) 2026 dynapt contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "dynapt/program.hpp"

#include <algorithm>
#include <unordered_set>

namespace dynapt {

namespace {

inline u64 packPair(TypeId a, TypeId b) {
  return (static_cast<u64>(a) << 32) | b;
}

} // namespace

bool Program::subtype(TypeId a, TypeId b) const {
  if (a == kNone || b == kNone)
    return false;
  if (a == b)
    return true;
  const auto& up = ancestors[a];
  return std::binary_search(up.begin(), up.end(), b);
}

bool Program::typeCompat(TypeId a, TypeId b) const {
  if (a == kNone || b == kNone)
    return false;
  if (a == b || subtype(a, b) || subtype(b, a))
    return true;
  return boxPairs.count(packPair(a, b)) != 0;
}

std::vector<MethodId> Program::methodLookup(TypeId t, std::string_view name,
                                            MTypeId mt, LookupMode mode) const {
  std::vector<MethodId> out;
  if (t == kNone || mt == kNone)
    return out;
  StrId n = strings.find(name);
  if (n == kNone)
    return out;

  auto matchIn = [&](TypeId ty) -> MethodId {
    for (MethodId m : types[ty].methods) {
      const MethodInfo& mi = methods[m];
      if (mi.name != n || mi.mtype != mt)
        continue;
      if (mode == LookupMode::StaticOnly ? mi.isStatic() : !mi.isStatic())
        return m;
    }
    return kNone;
  };

  if (mode == LookupMode::StaticOnly) {
    MethodId m = matchIn(t);
    if (m != kNone)
      out.push_back(m);
    return out;
  }

  // Class chain first, then superinterfaces in declaration order (of the
  // chain, outward); first match wins.
  std::vector<TypeId> order;
  for (TypeId c = t; c != kNone; c = types[c].superclass)
    order.push_back(c);
  std::unordered_set<TypeId> seen(order.begin(), order.end());
  for (size_t i = 0; i < order.size(); ++i)
    for (TypeId iface : types[order[i]].interfaces)
      if (seen.insert(iface).second)
        order.push_back(iface);

  for (TypeId ty : order) {
    MethodId m = matchIn(ty);
    if (m != kNone) {
      out.push_back(m);
      return out;
    }
  }
  return out;
}

std::vector<MethodId> Program::methodsNamed(TypeId t, std::string_view name,
                                            bool declaredOnly) const {
  std::vector<MethodId> out;
  if (t == kNone)
    return out;
  StrId n = strings.find(name);
  if (n == kNone)
    return out;

  auto scan = [&](TypeId ty) {
    for (MethodId m : types[ty].methods) {
      const MethodInfo& mi = methods[m];
      if (mi.name == n && !mi.isConstructor())
        out.push_back(m);
    }
  };
  if (declaredOnly) {
    scan(t);
  } else {
    for (TypeId ty : ancestors[t])
      scan(ty);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<MethodId> Program::constructorsOf(TypeId t) const {
  std::vector<MethodId> out;
  if (t == kNone)
    return out;
  for (MethodId m : types[t].methods)
    if (methods[m].isConstructor())
      out.push_back(m);
  return out;
}

} // namespace dynapt
