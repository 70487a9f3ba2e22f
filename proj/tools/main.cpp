/*
 * Copyright (c) 2026 dynapt contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dynapt/analysis.hpp"
#include "dynapt/corpus.hpp"
#include "dynapt/facts.hpp"
#include "dynapt/solver.hpp"

// Exit codes: 0 success / check passed, 1 check failed, 2 input or usage
// error, 3 iteration limit exceeded.

namespace {

using namespace dynapt;

struct Flags {
  bool noReflection = false;
  bool strictInvokeExact = false;
  bool topStringMatchesAll = false;
  bool singleThread = false;
  bool allowOverApprox = false;
  unsigned maxRounds = 1'000'000;
  std::string dumpList;
};

void addAnalysisFlags(CLI::App* cmd, Flags& f) {
  cmd->add_flag("--no-reflection", f.noReflection,
                "disable the constant-string reflection rules");
  cmd->add_flag("--strict-invoke-exact", f.strictInvokeExact,
                "invokeExact requires the exact handle descriptor");
  cmd->add_flag("--top-string-matches-all", f.topStringMatchesAll,
                "let unknown strings match every name in lookups");
  cmd->add_flag("--single-thread", f.singleThread,
                "evaluate rules on one thread");
  cmd->add_option("--max-rounds", f.maxRounds, "fixpoint iteration limit");
}

AnalysisOptions toOptions(const Flags& f) {
  AnalysisOptions o;
  o.reflection = !f.noReflection;
  o.strictInvokeExact = f.strictInvokeExact;
  o.topStringMatchesAll = f.topStringMatchesAll;
  o.maxRounds = f.maxRounds;
  if (f.singleThread)
    o.threads = 1;
  return o;
}

std::vector<std::string> splitDumpList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty())
      out.push_back(item);
  return out;
}

void printDiags(const DiagSet& diags) {
  for (const Diag& d : diags)
    std::cerr << (d.severity == Severity::Warning ? "warning: " : "error: ")
              << d.site << ": " << d.message << '\n';
}

int runAnalyze(const std::string& dir, const std::string& outDir,
               const Flags& flags) {
  std::vector<std::string> extra = splitDumpList(flags.dumpList);
  for (const std::string& name : extra)
    if (relation_by_name(name) == kNumRelations) {
      std::cerr << "error: unknown relation '" << name << "'\n";
      return 2;
    }

  Program prog = load_program(dir);
  SolveResult res = solve(prog, toOptions(flags));
  printDiags(res.diags);

  std::optional<CheckResult> chk;
  if (prog.hasExpectations)
    chk = run_check(res);
  write_dumps(res, outDir, extra, chk ? &*chk : nullptr);

  std::cout << "reachable methods: " << res.rels[RelId::kReachable].size()
            << "\ncall-graph edges: " << unified_call_graph(res).size()
            << "\nrounds: " << res.stats.rounds << "\nwrote " << outDir
            << '\n';
  return 0;
}

int runCheck(const std::string& dir, const Flags& flags) {
  Program prog = load_program(dir);
  if (!prog.hasExpectations) {
    std::cerr << "error: " << dir
              << ": no ExpectedReachable.facts or ExpectedUnreachable.facts\n";
    return 2;
  }
  SolveResult res = solve(prog, toOptions(flags));
  printDiags(res.diags);

  CheckResult chk = run_check(res);
  size_t width = 6;
  for (const auto& [method, mc] : chk.rows)
    width = std::max(width, method.size());
  for (const auto& [method, mc] : chk.rows) {
    const char* mark = mc == MethodCheck::Ok          ? "✓"
                       : mc == MethodCheck::Missing   ? "✗"
                                                      : "over-approx";
    std::cout << std::left << std::setw(static_cast<int>(width) + 2) << method
              << mark << '\n';
  }
  bool ok = chk.pass(flags.allowOverApprox);
  std::cout << (ok ? "check passed" : "check failed") << '\n';
  return ok ? 0 : 1;
}

int runCorpusList(bool asJson) {
  std::vector<CorpusEntry> entries = list_corpus(default_corpus_dir());
  if (asJson) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const CorpusEntry& e : entries)
      arr.push_back({{"name", e.name},
                     {"description", e.description},
                     {"expectedReachable", e.expectedReachable},
                     {"expectedUnreachable", e.expectedUnreachable}});
    std::cout << arr.dump(2) << '\n';
    return 0;
  }
  size_t width = 4;
  for (const CorpusEntry& e : entries)
    width = std::max(width, e.name.size());
  for (const CorpusEntry& e : entries)
    std::cout << std::left << std::setw(static_cast<int>(width) + 2) << e.name
              << "+" << e.expectedReachable << "/-" << e.expectedUnreachable
              << "  " << e.description << '\n';
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"points-to and call-graph analysis for invokedynamic-heavy "
               "programs, from fact files"};
  app.require_subcommand(1);

  Flags flags;
  std::string factsDir;
  std::string outDir = "dynapt-out";

  CLI::App* analyze =
      app.add_subcommand("analyze", "run the analysis and write dump files");
  analyze->add_option("facts", factsDir, "facts directory")->required();
  analyze->add_option("--out", outDir, "output directory");
  analyze->add_option("--dump", flags.dumpList,
                      "comma-separated extra relations to dump");
  addAnalysisFlags(analyze, flags);

  CLI::App* check = app.add_subcommand(
      "check", "compare reachability against the expectation facts");
  check->add_option("facts", factsDir, "facts directory")->required();
  check->add_flag("--allow-overapprox", flags.allowOverApprox,
                  "tolerate expected-unreachable methods found reachable");
  addAnalysisFlags(check, flags);

  CLI::App* corpus = app.add_subcommand("corpus", "bundled example programs");
  corpus->require_subcommand(1);
  bool asJson = false;
  CLI::App* list = corpus->add_subcommand("list", "list bundled programs");
  list->add_flag("--json", asJson, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (analyze->parsed())
      return runAnalyze(factsDir, outDir, flags);
    if (check->parsed())
      return runCheck(factsDir, flags);
    if (list->parsed())
      return runCorpusList(asJson);
  } catch (const LoadError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const SolveLimitError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
