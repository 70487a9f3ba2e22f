/*
 * Copyright (c) 2026 dynapt contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <array>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "dynapt/base.hpp"

namespace dynapt {

enum class TypeKind { Class, Interface, Array, Primitive };

struct TypeInfo {
  std::string id;                // fully qualified name, e.g. "java.lang.String"
  TypeKind kind = TypeKind::Class;
  TypeId superclass = kNone;
  std::vector<TypeId> interfaces;
  std::vector<MethodId> methods; // declared on this type, in method-id order
};

enum class MethodFlag { Static, Constructor, Instance };

struct MethodInfo {
  std::string id;               // opaque unique id, e.g. "A.print"
  TypeId declaringType = kNone;
  StrId name = kNone;           // simple name; "<init>" for constructors
  TypeId returnType = kNone;
  std::vector<TypeId> paramTypes;
  MethodFlag flag = MethodFlag::Instance;
  MTypeId mtype = kNone;        // (paramTypes)returnType; ctors use void return

  std::vector<VarId> formals;   // dense, one per param
  VarId thisVar = kNone;        // defined iff non-static
  VarId returnVar = kNone;      // defined iff returnType != void
  std::vector<InsnId> body;     // in instruction-id order

  bool isStatic() const { return flag == MethodFlag::Static; }
  bool isConstructor() const { return flag == MethodFlag::Constructor; }
  bool isInstance() const { return flag == MethodFlag::Instance; }
};

struct VarInfo {
  std::string name;             // method-scoped: "<methodId>/<local>"
  MethodId method = kNone;
  bool isReturnVar = false;
};

enum class Opcode {
  Alloc,
  Move,
  LoadField,
  StoreField,
  LoadArray,
  StoreArray,
  Const,
  Call,
  InvokeDynamic,
  EntryMarker, // synthesized per entry point; carries the entry receiver mock site
};

enum class CallKind { Static, Special, Virtual, Interface, MhPoly };

enum class ConstKind { None, Str, ClassRef, MethodHandleRef, MethodTypeLit, Int };

enum class BootArgKind { MethodHandleRef, MethodTypeLit, Str, Int, ClassRef };

struct BootArg {
  BootArgKind kind;
  u32 ref = kNone;           // method/type/string id depending on kind
  std::int64_t intValue = 0; // for Int
};

// Static classification of call sites against the modeled runtime API.
enum class ApiOp {
  None,
  Lookup,          // MethodHandles.lookup()
  LookupClass,     // Lookup.lookupClass()
  Unreflect,       // Lookup.unreflect / unreflectSpecial / unreflectConstructor
  FindVirtual,
  FindStatic,
  MethodTypeMake,  // MethodType.methodType(...)
  AsType,          // MethodHandle.asType(mt)
  CallSiteCtor,    // new ConstantCallSite/MutableCallSite/VolatileCallSite(h)
  SetTarget,
  GetTarget,
  ForName,
  GetMethod,
  GetDeclaredMethod,
  GetConstructor,
  GetDeclaredConstructor,
  PolyInvoke,      // signature-polymorphic MethodHandle.invoke
  PolyInvokeExact, // signature-polymorphic MethodHandle.invokeExact
  UnmodeledInvoke, // anything else under java.lang.invoke.*
};

struct Instruction {
  std::string id;
  MethodId method = kNone;
  Opcode op = Opcode::Move;

  // alloc/move/field/array/const operands
  VarId to = kNone;
  VarId from = kNone;
  VarId base = kNone;
  StrId field = kNone;
  TypeId allocType = kNone;
  ConstKind constKind = ConstKind::None;
  u32 constRef = kNone;
  std::int64_t constInt = 0;

  // calls
  CallKind callKind = CallKind::Static;
  std::string calleeName;       // as written, e.g. "A.print" or "invokeExact"
  std::string calleeSimpleName; // after the last '.'
  TypeId calleeDeclType = kNone;         // resolved static callee type, if declared
  MTypeId calleeDescriptor = kNone;
  VarId assignRet = kNone;
  std::vector<VarId> actuals;
  ApiOp apiOp = ApiOp::None;

  // invokedynamic
  MethodId bootMethod = kNone;
  StrId dynName = kNone;
  MTypeId dynType = kNone;
  std::vector<BootArg> bootArgs;
  bool metafactorySite = false; // bootstrap is LambdaMetafactory.{metafactory,altMetafactory}
};

struct MethodType {
  TypeId ret = kNone;
  std::vector<TypeId> params;

  bool operator==(const MethodType& o) const {
    return ret == o.ret && params == o.params;
  }
};

// Interned method types. Grows during solving (methodType/asType modeling),
// so mutation is mutex-guarded and lookups return copies.
class MethodTypeTable {
public:
  MethodTypeTable() = default;
  MethodTypeTable(const MethodTypeTable& o) {
    std::lock_guard<std::mutex> lk(o.mu_);
    list_ = o.list_;
    index_ = o.index_;
  }
  MethodTypeTable& operator=(const MethodTypeTable& o) = delete;

  MTypeId intern(TypeId ret, std::vector<TypeId> params) {
    std::lock_guard<std::mutex> lk(mu_);
    auto key = std::make_pair(ret, params);
    auto it = index_.find(key);
    if (it != index_.end())
      return it->second;
    MTypeId id = static_cast<MTypeId>(list_.size());
    list_.push_back(MethodType{ret, std::move(params)});
    index_.emplace(std::move(key), id);
    return id;
  }

  MethodType at(MTypeId id) const {
    std::lock_guard<std::mutex> lk(mu_);
    return list_.at(id);
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lk(mu_);
    return list_.size();
  }

private:
  mutable std::mutex mu_;
  std::vector<MethodType> list_;
  std::map<std::pair<TypeId, std::vector<TypeId>>, MTypeId> index_;
};

enum class LookupMode { Virtual, StaticOnly };

// Well-known type ids resolved against the loaded program (kNone when the
// program does not declare them).
struct WellKnown {
  TypeId object = kNone;
  TypeId string = kNone;
  TypeId clazz = kNone;          // java.lang.Class
  TypeId reflectMethod = kNone;  // java.lang.reflect.Method
  TypeId callSite = kNone;       // java.lang.invoke.CallSite
  TypeId methodHandle = kNone;
  TypeId methodType = kNone;
  TypeId lookup = kNone;         // java.lang.invoke.MethodHandles.Lookup
  TypeId intType = kNone;
  StrId targetField = kNone;     // pseudo-field for CallSite targets
};

struct Program {
  StringTable strings;
  std::vector<TypeInfo> types;
  std::vector<MethodInfo> methods;
  std::vector<VarInfo> vars;
  std::vector<Instruction> insns;
  MethodTypeTable mtypes;
  MTypeId voidNoArg = kNone; // interned iff "void" is declared

  std::vector<MethodId> entryPoints;
  std::vector<InsnId> entryMarkers;               // parallel to entryPoints
  std::vector<MethodId> expectedReachable;
  std::vector<MethodId> expectedUnreachable;
  bool hasExpectations = false;

  std::unordered_map<std::string, TypeId> typeIndex;
  std::unordered_map<std::string, MethodId> methodIndex;
  std::unordered_map<std::string, VarId> varIndex;
  std::unordered_map<std::string, InsnId> insnIndex;

  // Derived at load time.
  std::vector<std::vector<TypeId>> ancestors;       // reflexive-transitive, sorted
  std::unordered_set<u64> boxPairs;                 // packed (t1,t2) both directions
  std::vector<std::vector<InsnId>> varUses;         // var -> instructions reading it
  std::unordered_map<StrId, std::vector<InsnId>> fieldLoads;
  std::vector<InsnId> arrayLoads;
  std::vector<InsnId> getTargetSites;
  WellKnown known;

  TypeId findType(std::string_view id) const {
    auto it = typeIndex.find(std::string(id));
    return it == typeIndex.end() ? kNone : it->second;
  }
  MethodId findMethod(std::string_view id) const {
    auto it = methodIndex.find(std::string(id));
    return it == methodIndex.end() ? kNone : it->second;
  }

  bool subtype(TypeId a, TypeId b) const; // a <: b (reflexive)
  bool typeCompat(TypeId a, TypeId b) const;

  // Resolution with exact name + exact method-type match. Virtual mode walks
  // the receiver type, its superclass chain, then superinterfaces; first match
  // wins. StaticOnly consults only static methods declared directly on t.
  std::vector<MethodId> methodLookup(TypeId t, std::string_view name, MTypeId mt,
                                     LookupMode mode) const;

  // Name-only reflective matching. declaredOnly limits to t itself; otherwise
  // the whole supertype closure contributes. Constructors are never returned.
  std::vector<MethodId> methodsNamed(TypeId t, std::string_view name,
                                     bool declaredOnly) const;
  std::vector<MethodId> constructorsOf(TypeId t) const;
};

} // namespace dynapt
