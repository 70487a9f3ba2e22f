/*
 * Copyright (c) 2026 dynapt contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "dynapt/program.hpp"

namespace dynapt {

enum class ValueKind : u32 {
  Alloc,        // concrete allocation site: (insn, type)
  Mock,         // analysis-made object: (insn, type); lambdas, entry receivers,
                // vararg boot arrays, constructor-reference results
  HandleMock,   // object made by invoking a constructor handle: (handle value, type)
  MethodHandle, // (method, method type)
  MethodTypeV,  // (method type)
  Lookup,       // (caller type)
  ClassObj,     // reified class: (type)
  MethodObj,    // reified method or constructor: (method)
  Str,          // (string id)
  TopStr,       // the unknown-contents string
  Int,          // 64-bit payload packed into (lo, hi)
};

struct Value {
  ValueKind kind;
  u32 a = 0;
  u32 b = 0;
};

// Interned abstract values. Identity is structural: interning the same
// payload twice yields the same ValueId. All accessors are thread-safe;
// reads return copies (values are 12 bytes).
class ValueStore {
public:
  explicit ValueStore(const Program& prog)
      : prog_(&prog), mtypes_(prog.mtypes) {}

  ValueId alloc(InsnId site, TypeId t) { return intern(ValueKind::Alloc, site, t); }
  ValueId mock(TypeId t, InsnId site) { return intern(ValueKind::Mock, site, t); }
  ValueId handleMock(TypeId t, ValueId handle) {
    return intern(ValueKind::HandleMock, handle, t);
  }
  ValueId methodHandle(MethodId m, MTypeId mt) {
    return intern(ValueKind::MethodHandle, m, mt);
  }
  ValueId methodTypeVal(MTypeId mt) { return intern(ValueKind::MethodTypeV, mt, 0); }
  ValueId lookupVal(TypeId t) { return intern(ValueKind::Lookup, t, 0); }
  ValueId classObj(TypeId t) { return intern(ValueKind::ClassObj, t, 0); }
  ValueId methodObj(MethodId m) { return intern(ValueKind::MethodObj, m, 0); }
  ValueId str(StrId s) { return intern(ValueKind::Str, s, 0); }
  ValueId topStr() { return intern(ValueKind::TopStr, 0, 0); }
  ValueId intVal(std::int64_t v) {
    auto uv = static_cast<u64>(v);
    return intern(ValueKind::Int, static_cast<u32>(uv), static_cast<u32>(uv >> 32));
  }

  // The canonical handle for a method: MH(m, method_mtype(m)).
  ValueId materializeHandle(MethodId m) {
    return methodHandle(m, prog_->methods[m].mtype);
  }

  Value at(ValueId id) const {
    std::lock_guard<std::mutex> lk(mu_);
    return values_.at(id);
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lk(mu_);
    return values_.size();
  }

  // Method-type interning that outlives the program's literal table; ids from
  // the program remain valid here.
  MethodTypeTable& mtypes() { return mtypes_; }
  const MethodTypeTable& mtypes() const { return mtypes_; }

  // Receiver type used for dispatch, kNone when the value has no useful type
  // (or the program does not declare the backing runtime type).
  TypeId dispatchType(ValueId id) const;

  // Stable, id-free text form; used by dumps and cross-run comparisons.
  std::string render(ValueId id) const;
  std::string renderMType(MTypeId mt) const;

  // asType adaptation check between two method types from this store's table:
  // same arity, every parameter pair and the return pair type-compatible.
  bool asTypeCompat(MTypeId from, MTypeId to) const;

private:
  ValueId intern(ValueKind k, u32 a, u32 b) {
    std::lock_guard<std::mutex> lk(mu_);
    u64 key = (static_cast<u64>(k) << 58) ^ (static_cast<u64>(a) << 29) ^
              (static_cast<u64>(a) >> 3) ^ (static_cast<u64>(b) * 0x9e3779b97f4a7c15ull);
    auto range = index_.equal_range(key);
    for (auto it = range.first; it != range.second; ++it) {
      const Value& v = values_[it->second];
      if (v.kind == k && v.a == a && v.b == b)
        return it->second;
    }
    ValueId id = static_cast<ValueId>(values_.size());
    values_.push_back(Value{k, a, b});
    index_.emplace(key, id);
    return id;
  }

  const Program* prog_;
  MethodTypeTable mtypes_;
  mutable std::mutex mu_;
  std::vector<Value> values_;
  std::unordered_multimap<u64, ValueId> index_;
};

} // namespace dynapt
