/*
 * Copyright (c) 2026 dynapt contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "dynapt/relations.hpp"

namespace dynapt {

namespace {

constexpr ColKind kVar = ColKind::Var;
constexpr ColKind kVal = ColKind::Value;
constexpr ColKind kMeth = ColKind::Method;
constexpr ColKind kIns = ColKind::Insn;
constexpr ColKind kTy = ColKind::Type;
constexpr ColKind kStr = ColKind::Str;
constexpr ColKind kNum = ColKind::Num;
constexpr ColKind kCk = ColKind::CallKindLabel;

const RelationSchema kSchemas[kNumRelations] = {
    {"VarPointsTo", 2, {kVar, kVal, kVal, kVal}},
    {"FieldPointsTo", 3, {kVal, kStr, kVal, kVal}},
    {"ArrayPointsTo", 2, {kVal, kVal, kVal, kVal}},
    {"Reachable", 1, {kMeth, kMeth, kMeth, kMeth}},
    {"CallEdge", 3, {kIns, kMeth, kCk, kCk}},
    {"BootstrapEdge", 2, {kIns, kMeth, kMeth, kMeth}},
    {"HandleEdge", 3, {kIns, kMeth, kVal, kVal}},
    {"LambdaEdge", 3, {kIns, kMeth, kVal, kVal}},
    {"IndyCallSite", 3, {kVal, kIns, kTy, kTy}},
    {"CallSiteTarget", 3, {kVal, kVal, kMeth, kMeth}},
    {"MetafactoryInvoke", 3, {kIns, kStr, kTy, kTy}},
    {"LambdaObject", 4, {kVal, kMeth, kStr, kIns}},
    {"LambdaCaptured", 3, {kIns, kNum, kVal, kVal}},
    {"InstanceImpl", 3, {kIns, kMeth, kVal, kVal}},
    {"ReceiverShift", 4, {kVal, kMeth, kNum, kNum}},
};

} // namespace

const RelationSchema& relation_schema(RelId id) { return kSchemas[id]; }

RelId relation_by_name(std::string_view name) {
  for (unsigned i = 0; i < kNumRelations; ++i)
    if (name == kSchemas[i].name)
      return static_cast<RelId>(i);
  return kNumRelations;
}

} // namespace dynapt
