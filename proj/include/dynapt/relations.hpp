/*
 * Copyright (c) 2026 dynapt contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <array>
#include <mutex>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dynapt/base.hpp"

namespace dynapt {

// Fixed-arity tuples of interned keys, padded with zeros past the relation's
// arity (construction goes through make*, so padding is uniform).
struct Key {
  std::array<u32, 4> c{0, 0, 0, 0};

  bool operator==(const Key& o) const { return c == o.c; }
};

inline Key make1(u32 a) { return Key{{a, 0, 0, 0}}; }
inline Key make2(u32 a, u32 b) { return Key{{a, b, 0, 0}}; }
inline Key make3(u32 a, u32 b, u32 d) { return Key{{a, b, d, 0}}; }
inline Key make4(u32 a, u32 b, u32 d, u32 e) { return Key{{a, b, d, e}}; }

struct KeyHash {
  std::size_t operator()(const Key& k) const {
    u64 h = 0x2545f4914f6cdd1dull;
    for (u32 v : k.c) {
      h ^= v;
      h *= 0x100000001b3ull;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
};

enum RelId : unsigned {
  kVarPointsTo = 0, // (var, value)
  kFieldPointsTo,   // (base value | kNone for statics, field, value)
  kArrayPointsTo,   // (array value, element value)
  kReachable,       // (method)
  kCallEdge,        // (insn, callee, kind: 0 static / 1 virtual)
  kBootstrapEdge,   // (insn, bootstrap method)
  kHandleEdge,      // (insn, method, handle value)
  kLambdaEdge,      // (insn, impl method, lambda value)
  kIndyCallSite,    // (call-site value, insn, dynamic return type)
  kCallSiteTarget,  // (call-site value, handle value, method)
  kMetafactoryInvoke, // (insn, dynamic name, interface type)
  kLambdaObject,    // (lambda value, impl method, name, indy insn)
  kLambdaCaptured,  // (indy insn, index, value)
  kInstanceImpl,    // (indy insn, impl method, lambda value)
  kReceiverShift,   // (lambda value, impl method, k, n)
  kNumRelations,
};

enum class ColKind { Var, Value, Method, Insn, Type, Str, Num, CallKindLabel };

struct RelationSchema {
  const char* name;
  unsigned arity;
  std::array<ColKind, 4> cols;
};

const RelationSchema& relation_schema(RelId id);
// kNumRelations when the name is unknown.
RelId relation_by_name(std::string_view name);

// One relation: committed tuples (all), the delta committed by the previous
// barrier, and tuples inserted during the current round (pending). Inserts
// are thread-safe; all/delta/byCol0 views are stable between barriers.
class Relation {
public:
  Relation() = default;
  // Moves happen only between barriers, when no evaluator threads run; the
  // mutex itself is not movable and starts fresh.
  Relation(Relation&& o) noexcept
      : all_(std::move(o.all_)), delta_(std::move(o.delta_)),
        pendingVec_(std::move(o.pendingVec_)),
        pendingSet_(std::move(o.pendingSet_)), byCol0_(std::move(o.byCol0_)) {}
  Relation& operator=(Relation&& o) noexcept {
    all_ = std::move(o.all_);
    delta_ = std::move(o.delta_);
    pendingVec_ = std::move(o.pendingVec_);
    pendingSet_ = std::move(o.pendingSet_);
    byCol0_ = std::move(o.byCol0_);
    return *this;
  }

  bool contains(const Key& k) const { return all_.count(k) != 0; }

  // True if the tuple was not yet committed or pending.
  bool insert(const Key& k) {
    if (all_.count(k))
      return false;
    std::lock_guard<std::mutex> lk(mu_);
    if (!pendingSet_.insert(k).second)
      return false;
    pendingVec_.push_back(k);
    return true;
  }

  const std::unordered_set<Key, KeyHash>& all() const { return all_; }
  const std::vector<Key>& delta() const { return delta_; }

  const std::vector<Key>& byCol0(u32 v) const {
    static const std::vector<Key> kEmpty;
    auto it = byCol0_.find(v);
    return it == byCol0_.end() ? kEmpty : it->second;
  }

  // Moves pending tuples into all/delta/index. Returns how many were new.
  std::size_t commit() {
    delta_.clear();
    for (const Key& k : pendingVec_) {
      if (all_.insert(k).second) {
        delta_.push_back(k);
        byCol0_[k.c[0]].push_back(k);
      }
    }
    pendingVec_.clear();
    pendingSet_.clear();
    return delta_.size();
  }

  std::size_t size() const { return all_.size(); }

private:
  std::unordered_set<Key, KeyHash> all_;
  std::vector<Key> delta_;
  std::vector<Key> pendingVec_;
  std::unordered_set<Key, KeyHash> pendingSet_;
  std::unordered_map<u32, std::vector<Key>> byCol0_;
  std::mutex mu_;
};

class RelationStore {
public:
  Relation& operator[](RelId id) { return rels_[id]; }
  const Relation& operator[](RelId id) const { return rels_[id]; }

  std::size_t commitAll() {
    std::size_t n = 0;
    for (auto& r : rels_)
      n += r.commit();
    return n;
  }

  std::vector<std::string> growingRelationNames() const {
    std::vector<std::string> out;
    for (unsigned i = 0; i < kNumRelations; ++i)
      if (!rels_[i].delta().empty())
        out.push_back(relation_schema(static_cast<RelId>(i)).name);
    return out;
  }

  u64 totalTuples() const {
    u64 n = 0;
    for (auto& r : rels_)
      n += r.size();
    return n;
  }

private:
  std::array<Relation, kNumRelations> rels_;
};

} // namespace dynapt
