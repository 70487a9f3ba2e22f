/*
 * Copyright (c) 2026 dynapt contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <memory>
#include <set>
#include <string>
#include <utility>

#include "dynapt/relations.hpp"
#include "dynapt/values.hpp"

namespace dynapt {

struct AnalysisOptions {
  bool reflection = true;          // class/method reification (forName, const
                                   // class loads, getMethod, getConstructor)
  bool strictInvokeExact = false;  // invokeExact requires descriptor == handle type
  bool topStringMatchesAll = false;// unknown strings match every name
  bool strictLambdaDispatch = false; // lambda dispatch also checks the call's
                                   // static callee type against the interface
  bool lambdaRules = true;         // metafactory modeling (differential testing)
  bool invokeApiRules = true;      // lookup/find/methodType/asType/unreflect
                                   // modeling (differential testing)
  u32 maxRounds = 1'000'000;
  unsigned threads = 0;            // 0 = pick from hardware, capped small
};

struct SolveStats {
  u32 rounds = 0;
  u64 tuples = 0;
};

struct SolveResult {
  const Program* prog = nullptr;
  std::unique_ptr<ValueStore> values;
  RelationStore rels;
  DiagSet diags;
  // Unmodeled java.lang.invoke API calls seen at reachable sites:
  // (instruction id, callee signature).
  std::set<std::pair<std::string, std::string>> unmodeledApi;
  SolveStats stats;
};

// Semi-naive fixpoint: each round feeds only the previous round's delta into
// the rule evaluators; inserts become visible at the next round barrier.
// The result keeps a pointer into `prog`; the caller owns its lifetime, so a
// temporary is rejected outright.
SolveResult solve(const Program& prog, const AnalysisOptions& opts = {});
SolveResult solve(Program&&, const AnalysisOptions& = {}) = delete;

// Reference evaluator for testing: every round re-feeds entire relations into
// every evaluator, no delta tracking. Same rules, same fixpoint.
SolveResult naive_solve(const Program& prog, const AnalysisOptions& opts = {});
SolveResult naive_solve(Program&&, const AnalysisOptions& = {}) = delete;

} // namespace dynapt
