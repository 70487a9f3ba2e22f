/*
 * Copyright (c) 2026 dynapt contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "dynapt/solver.hpp"

#include <atomic>
#include <thread>

#include "dynapt/rules.hpp"

namespace dynapt {

RulePack build_rule_pack(const AnalysisOptions& opts) {
  RulePack pack;
  register_base_rules(pack);
  register_invoke_rules(pack);
  register_indy_rules(pack);
  if (opts.lambdaRules)
    register_lambda_rules(pack);
  return pack;
}

namespace {

struct Task {
  RelId rel;
  HandlerFn fn;
};

// One round: every handler sees every in-play tuple of its relation. The
// in-play set (delta or full relation) is frozen; inserts go to pending and
// become visible at the commit barrier that follows.
void run_round(SolverContext& ctx, const std::vector<Task>& tasks, bool naive,
               unsigned threads) {
  auto runTask = [&](const Task& t) {
    const Relation& rel = ctx.rels[t.rel];
    if (naive) {
      for (const Key& k : rel.all())
        t.fn(ctx, k);
    } else {
      for (const Key& k : rel.delta())
        t.fn(ctx, k);
    }
  };

  if (threads <= 1 || tasks.size() <= 1) {
    for (const Task& t : tasks)
      runTask(t);
    return;
  }

  std::atomic<size_t> next{0};
  std::exception_ptr err;
  std::mutex errMu;
  auto worker = [&]() {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= tasks.size())
        return;
      try {
        runTask(tasks[i]);
      } catch (...) {
        std::lock_guard<std::mutex> g(errMu);
        if (!err)
          err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  unsigned n = static_cast<unsigned>(
      std::min<size_t>(threads, tasks.size()));
  pool.reserve(n);
  for (unsigned i = 0; i < n; ++i)
    pool.emplace_back(worker);
  for (auto& t : pool)
    t.join();
  if (err)
    std::rethrow_exception(err);
}

SolveResult solve_impl(const Program& prog, const AnalysisOptions& opts,
                       bool naive) {
  SolveResult res;
  res.prog = &prog;
  res.values = std::make_unique<ValueStore>(prog);

  RulePack pack = build_rule_pack(opts);
  std::vector<Task> tasks;
  for (unsigned r = 0; r < kNumRelations; ++r)
    for (HandlerFn fn : pack.onDelta[r])
      tasks.push_back(Task{static_cast<RelId>(r), fn});

  unsigned threads = opts.threads;
  if (threads == 0) {
    unsigned hw = std::thread::hardware_concurrency();
    threads = hw ? std::min(hw, 4u) : 1;
  }

  SolverContext ctx(prog, opts, *res.values, res.rels);
  for (SeedFn s : pack.seeds)
    s(ctx);
  res.rels.commitAll();

  u32 round = 0;
  while (true) {
    if (round >= opts.maxRounds)
      throw SolveLimitError("fixpoint did not converge within " +
                                std::to_string(opts.maxRounds) + " rounds",
                            res.rels.growingRelationNames());
    ++round;
    run_round(ctx, tasks, naive, threads);
    if (res.rels.commitAll() == 0)
      break;
  }

  res.stats.rounds = round;
  res.stats.tuples = res.rels.totalTuples();
  res.diags = std::move(ctx.diags);
  res.unmodeledApi = std::move(ctx.unmodeledApi);
  return res;
}

} // namespace

SolveResult solve(const Program& prog, const AnalysisOptions& opts) {
  return solve_impl(prog, opts, false);
}

SolveResult naive_solve(const Program& prog, const AnalysisOptions& opts) {
  return solve_impl(prog, opts, true);
}

} // namespace dynapt
