/*
 * Copyright (c) 2026 dynapt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "dynapt/solver.hpp"

// Result post-processing: stable text renderings, dump files, the JSON
// report, and expectation checking. Everything here renders ids away first;
// two solves agree iff their rendered maps agree, regardless of internal
// numbering.

namespace dynapt {

// relation name -> sorted rendered rows (TAB-separated columns).
using RenderedRelations = std::map<std::string, std::set<std::string>>;

RenderedRelations render_relations(const SolveResult& res);

// One rendered row of a relation tuple.
std::string render_tuple(const SolveResult& res, RelId rel, const Key& k);

// Unified call graph rows: caller-insn TAB callee TAB kind, where kind is
// static|virtual|bootstrap|mh|indy|lambda. Deduplicated and byte-sorted.
std::set<std::string> unified_call_graph(const SolveResult& res);

// Sorted reachable method ids.
std::vector<std::string> reachable_methods(const SolveResult& res);

enum class MethodCheck { Ok, Missing, OverApprox };

struct CheckResult {
  // method id -> outcome, in the order rows should print.
  std::vector<std::pair<std::string, MethodCheck>> rows;
  bool hardFail = false;   // expected-reachable missing
  bool overApprox = false; // expected-unreachable found reachable
  bool pass(bool allowOverApprox) const {
    return !hardFail && (allowOverApprox || !overApprox);
  }
};

// Compares reachability against the program's expectation tables.
// Requires prog.hasExpectations.
CheckResult run_check(const SolveResult& res);

// Writes Reachable.csv, CallGraphEdge.csv, VarPointsTo.csv,
// UnmodeledInvokeAPI.csv and report.json into outDir (created if missing),
// plus <Relation>.csv for every name in extraRels.
void write_dumps(const SolveResult& res, const std::filesystem::path& outDir,
                 const std::vector<std::string>& extraRels,
                 const CheckResult* check = nullptr);

// The report.json object. checkOutcome maps each expected method to
// "pass"/"fail"/"over-approx" and is present only when check != nullptr.
nlohmann::ordered_json build_report(const SolveResult& res,
                                    const CheckResult* check = nullptr,
                                    bool allowOverApprox = false);

}  // namespace dynapt
