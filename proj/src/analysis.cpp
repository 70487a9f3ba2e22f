/*
 * Copyright (c) 2026 dynapt contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "dynapt/analysis.hpp"

#include <algorithm>
#include <fstream>

namespace dynapt {

namespace {

const char* kindLabel(const SolveResult& res, RelId rel, const Key& k) {
  switch (rel) {
  case RelId::kCallEdge:
    return k.c[2] == 0 ? "static" : "virtual";
  case RelId::kBootstrapEdge:
    return "bootstrap";
  case RelId::kHandleEdge:
    return res.prog->insns[k.c[0]].op == Opcode::InvokeDynamic ? "indy" : "mh";
  case RelId::kLambdaEdge:
    return "lambda";
  default:
    return "?";
  }
}

void writeLines(const std::filesystem::path& file, const auto& lines) {
  std::ofstream f(file, std::ios::binary);
  for (const auto& l : lines)
    f << l << '\n';
}

} // namespace

std::string render_tuple(const SolveResult& res, RelId rel, const Key& k) {
  const Program& p = *res.prog;
  const RelationSchema& sch = relation_schema(rel);
  std::string out;
  for (unsigned c = 0; c < sch.arity; ++c) {
    if (c)
      out += '\t';
    u32 id = k.c[c];
    switch (sch.cols[c]) {
    case ColKind::Var:
      out += p.vars[id].name;
      break;
    case ColKind::Value:
      if (id == kNone)
        out += "<static>"; // static field pseudo-base
      else
        out += res.values->render(id);
      break;
    case ColKind::Method:
      out += p.methods[id].id;
      break;
    case ColKind::Insn:
      out += p.insns[id].id;
      break;
    case ColKind::Type:
      out += p.types[id].id;
      break;
    case ColKind::Str:
      out += p.strings.text(id);
      break;
    case ColKind::Num:
      out += std::to_string(id);
      break;
    case ColKind::CallKindLabel:
      out += id == 0 ? "static" : "virtual";
      break;
    }
  }
  return out;
}

RenderedRelations render_relations(const SolveResult& res) {
  RenderedRelations out;
  for (unsigned i = 0; i < kNumRelations; ++i) {
    RelId rel = static_cast<RelId>(i);
    std::set<std::string>& rows = out[relation_schema(rel).name];
    for (const Key& k : res.rels[rel].all())
      rows.insert(render_tuple(res, rel, k));
  }
  return out;
}

std::set<std::string> unified_call_graph(const SolveResult& res) {
  const Program& p = *res.prog;
  std::set<std::string> out;
  auto add = [&](RelId rel, const Key& k) {
    out.insert(p.insns[k.c[0]].id + '\t' + p.methods[k.c[1]].id + '\t' +
               kindLabel(res, rel, k));
  };
  for (const Key& k : res.rels[RelId::kCallEdge].all())
    add(RelId::kCallEdge, k);
  for (const Key& k : res.rels[RelId::kBootstrapEdge].all())
    add(RelId::kBootstrapEdge, k);
  for (const Key& k : res.rels[RelId::kHandleEdge].all())
    add(RelId::kHandleEdge, k);
  for (const Key& k : res.rels[RelId::kLambdaEdge].all())
    add(RelId::kLambdaEdge, k);
  return out;
}

std::vector<std::string> reachable_methods(const SolveResult& res) {
  std::vector<std::string> out;
  for (const Key& k : res.rels[RelId::kReachable].all())
    out.push_back(res.prog->methods[k.c[0]].id);
  std::sort(out.begin(), out.end());
  return out;
}

CheckResult run_check(const SolveResult& res) {
  const Program& p = *res.prog;
  const Relation& reach = res.rels[RelId::kReachable];
  CheckResult out;
  for (MethodId m : p.expectedReachable) {
    bool r = reach.contains(make1(m));
    out.rows.emplace_back(p.methods[m].id, r ? MethodCheck::Ok
                                             : MethodCheck::Missing);
    if (!r)
      out.hardFail = true;
  }
  for (MethodId m : p.expectedUnreachable) {
    bool r = reach.contains(make1(m));
    out.rows.emplace_back(p.methods[m].id, r ? MethodCheck::OverApprox
                                             : MethodCheck::Ok);
    if (r)
      out.overApprox = true;
  }
  return out;
}

nlohmann::ordered_json build_report(const SolveResult& res,
                                    const CheckResult* check,
                                    bool /*allowOverApprox*/) {
  nlohmann::ordered_json rep;
  rep["reachableCount"] = res.rels[RelId::kReachable].size();

  // Counts are over unified (insn, callee, kind) rows, matching the dump's
  // deduplicated lines; several handle values can back one edge row.
  nlohmann::ordered_json counts;
  for (const char* kind : {"static", "virtual", "bootstrap", "mh", "indy",
                           "lambda"})
    counts[kind] = 0;
  for (const std::string& row : unified_call_graph(res)) {
    std::string kind = row.substr(row.rfind('\t') + 1);
    counts[kind] = counts[kind].get<int>() + 1;
  }
  rep["edgeCountsByKind"] = std::move(counts);

  nlohmann::ordered_json diags = nlohmann::ordered_json::array();
  for (const Diag& d : res.diags)
    diags.push_back({{"severity",
                      d.severity == Severity::Warning ? "warning" : "error"},
                     {"site", d.site},
                     {"message", d.message}});
  rep["diagnostics"] = std::move(diags);

  if (check) {
    nlohmann::ordered_json outcome;
    for (const auto& [method, mc] : check->rows)
      outcome[method] = mc == MethodCheck::Ok          ? "pass"
                        : mc == MethodCheck::Missing   ? "fail"
                                                       : "over-approx";
    rep["checkOutcome"] = std::move(outcome);
  }
  return rep;
}

void write_dumps(const SolveResult& res, const std::filesystem::path& outDir,
                 const std::vector<std::string>& extraRels,
                 const CheckResult* check) {
  std::filesystem::create_directories(outDir);

  writeLines(outDir / "Reachable.csv", reachable_methods(res));
  writeLines(outDir / "CallGraphEdge.csv", unified_call_graph(res));

  std::set<std::string> vpt;
  for (const Key& k : res.rels[RelId::kVarPointsTo].all())
    vpt.insert(render_tuple(res, RelId::kVarPointsTo, k));
  writeLines(outDir / "VarPointsTo.csv", vpt);

  std::set<std::string> unmodeled;
  for (const auto& [insn, sig] : res.unmodeledApi)
    unmodeled.insert(insn + '\t' + sig);
  writeLines(outDir / "UnmodeledInvokeAPI.csv", unmodeled);

  for (const std::string& name : extraRels) {
    RelId rel = relation_by_name(name);
    if (rel == kNumRelations)
      continue; // caller validates; unknown names are skipped here
    std::set<std::string> rows;
    for (const Key& k : res.rels[rel].all())
      rows.insert(render_tuple(res, rel, k));
    writeLines(outDir / (name + ".csv"), rows);
  }

  // checkOutcome belongs in the report whenever the program carries
  // expectations, even if the caller did not run a check explicitly.
  CheckResult local;
  if (!check && res.prog->hasExpectations) {
    local = run_check(res);
    check = &local;
  }
  std::ofstream f(outDir / "report.json", std::ios::binary);
  f << build_report(res, check).dump(2) << '\n';
}

} // namespace dynapt
