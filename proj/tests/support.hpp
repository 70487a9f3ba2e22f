/*
 * Copyright (c) 2026 dynapt contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <initializer_list>
#include <set>
#include <string>
#include <vector>

#include "dynapt/analysis.hpp"
#include "dynapt/facts.hpp"
#include "dynapt/solver.hpp"

namespace dynapt::test {

inline constexpr const char* kFactFiles[] = {
    "Type",      "Method", "FormalParam", "ThisVar",     "ReturnVar",
    "Alloc",     "Move",   "StoreField",  "LoadField",   "StoreArray",
    "LoadArray", "Const",  "Call",        "ActualParam", "InvokeDynamic",
    "BootArg",   "EntryPoint",
};

// Assembles an in-memory fact directory with every required file present, so
// tests only spell the rows they care about.
class Facts {
public:
  Facts() {
    for (const char* f : kFactFiles)
      src_.files[std::string(f) + ".facts"];
  }

  Facts& row(const std::string& file, std::initializer_list<std::string> fs) {
    std::string line;
    for (const std::string& f : fs) {
      if (!line.empty())
        line += '\t';
      line += f;
    }
    src_.files[file + ".facts"] += line + "\n";
    return *this;
  }

  Facts& raw(const std::string& file, const std::string& text) {
    src_.files[file + ".facts"] += text;
    return *this;
  }

  Facts& drop(const std::string& file) {
    src_.files.erase(file + ".facts");
    return *this;
  }

  // java.lang.Object / String / void, the floor every program stands on.
  Facts& jdkBase() {
    row("Type", {"java.lang.Object", "class", "-", "-"});
    row("Type", {"java.lang.String", "class", "java.lang.Object", "-"});
    row("Type", {"void", "primitive", "-", "-"});
    return *this;
  }

  // The invoke-package types handle and call-site programs reference.
  Facts& invokeCore() {
    row("Type", {"java.lang.invoke.MethodHandles.Lookup", "class",
                 "java.lang.Object", "-"});
    row("Type", {"java.lang.invoke.MethodHandle", "class", "java.lang.Object",
                 "-"});
    row("Type", {"java.lang.invoke.MethodType", "class", "java.lang.Object",
                 "-"});
    row("Type", {"java.lang.invoke.CallSite", "class", "java.lang.Object",
                 "-"});
    row("Type", {"java.lang.invoke.ConstantCallSite", "class",
                 "java.lang.invoke.CallSite", "-"});
    return *this;
  }

  // Declares the metafactory bootstrap the way javac-produced facts would.
  Facts& metafactory() {
    const std::string t = "java.lang.invoke.LambdaMetafactory";
    const std::string m = t + ".metafactory";
    row("Type", {t, "class", "java.lang.Object", "-"});
    row("Method",
        {m, t, "metafactory", "java.lang.invoke.CallSite",
         "java.lang.invoke.MethodHandles.Lookup,java.lang.String,"
         "java.lang.invoke.MethodType,java.lang.invoke.MethodType,"
         "java.lang.invoke.MethodHandle,java.lang.invoke.MethodType",
         "static"});
    for (int i = 0; i < 6; ++i)
      row("FormalParam", {m, std::to_string(i), m + "/a" + std::to_string(i)});
    row("ReturnVar", {m, m + "/ret"});
    return *this;
  }

  // Method declaration plus the formal/this/return rows the loader demands.
  Facts& method(const std::string& id, const std::string& decl,
                const std::string& name, const std::string& ret,
                const std::vector<std::string>& params, const std::string& flag,
                const std::vector<std::string>& formals = {},
                const std::string& thisVar = "",
                const std::string& retVar = "") {
    std::string plist;
    for (const std::string& p : params)
      plist += (plist.empty() ? "" : ",") + p;
    row("Method", {id, decl, name, ret, plist.empty() ? "-" : plist, flag});
    for (size_t i = 0; i < formals.size(); ++i)
      row("FormalParam", {id, std::to_string(i), id + "/" + formals[i]});
    if (!thisVar.empty())
      row("ThisVar", {id, id + "/" + thisVar});
    if (!retVar.empty())
      row("ReturnVar", {id, id + "/" + retVar});
    return *this;
  }

  const MemoryFactSource& src() const { return src_; }
  Program load() const { return load_program(src_); }

private:
  MemoryFactSource src_;
};

inline std::set<std::string> rel(const SolveResult& res,
                                 const std::string& name) {
  return render_relations(res).at(name);
}

inline bool has(const SolveResult& res, const std::string& relName,
                const std::string& tuple) {
  return rel(res, relName).count(tuple) != 0;
}

inline std::set<std::string> reachableSet(const SolveResult& res) {
  auto v = reachable_methods(res);
  return {v.begin(), v.end()};
}

inline bool hasDiag(const SolveResult& res, const std::string& fragment) {
  for (const Diag& d : res.diags)
    if (d.message.find(fragment) != std::string::npos)
      return true;
  return false;
}

inline std::string corpusDir() {
#ifdef DYNAPT_CORPUS_DIR
  return DYNAPT_CORPUS_DIR;
#else
  return "corpus";
#endif
}

} // namespace dynapt::test
