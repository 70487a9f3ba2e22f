/*
 * Copyright (c) 2026 dynapt contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dynapt {

using u32 = std::uint32_t;
using u64 = std::uint64_t;

// Dense indices into the per-program tables. kNone marks "absent"
// (no return var, no superclass, static field base, ...).
using TypeId = u32;
using MethodId = u32;
using InsnId = u32;
using VarId = u32;
using StrId = u32;
using MTypeId = u32;
using ValueId = u32;

inline constexpr u32 kNone = 0xffffffffu;

// Interned strings: names, field ids, string literals, callee signatures.
class StringTable {
public:
  StrId intern(std::string_view s) {
    auto it = index_.find(std::string(s));
    if (it != index_.end())
      return it->second;
    StrId id = static_cast<StrId>(texts_.size());
    texts_.emplace_back(s);
    index_.emplace(texts_.back(), id);
    return id;
  }

  const std::string& text(StrId id) const { return texts_.at(id); }
  std::size_t size() const { return texts_.size(); }

  // Lookup without interning; kNone if unknown.
  StrId find(std::string_view s) const {
    auto it = index_.find(std::string(s));
    return it == index_.end() ? kNone : it->second;
  }

private:
  std::vector<std::string> texts_;
  std::unordered_map<std::string, StrId> index_;
};

enum class Severity { Warning, Error };

struct Diag {
  Severity severity;
  std::string site;    // instruction id or "-"
  std::string message;

  bool operator<(const Diag& o) const {
    if (severity != o.severity)
      return severity < o.severity;
    if (site != o.site)
      return site < o.site;
    return message < o.message;
  }
};

using DiagSet = std::set<Diag>;

// Fact-file or validation problem; message carries "file:line: what".
class LoadError : public std::runtime_error {
public:
  explicit LoadError(const std::string& msg) : std::runtime_error(msg) {}
};

// Fixpoint ran past the configured round limit.
class SolveLimitError : public std::runtime_error {
public:
  SolveLimitError(const std::string& msg, std::vector<std::string> growing)
      : std::runtime_error(msg), stillGrowing(std::move(growing)) {}

  std::vector<std::string> stillGrowing;
};

} // namespace dynapt
