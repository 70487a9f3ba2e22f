/*
 * Copyright (c) 2026 dynapt contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "dynapt/corpus.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

#ifndef DYNAPT_BUNDLED_CORPUS_DIR
#define DYNAPT_BUNDLED_CORPUS_DIR ""
#endif

namespace dynapt {

namespace {

// Data rows in a fact file: not blank, not a '#' comment.
size_t countRows(const std::filesystem::path& file) {
  std::ifstream f(file, std::ios::binary);
  size_t n = 0;
  std::string line;
  while (std::getline(f, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
      line.pop_back();
    if (line.empty() || line[0] == '#')
      continue;
    ++n;
  }
  return n;
}

} // namespace

std::vector<CorpusEntry> list_corpus(const std::filesystem::path& root) {
  std::vector<CorpusEntry> out;
  std::error_code ec;
  if (!std::filesystem::is_directory(root, ec))
    return out;
  for (const auto& e : std::filesystem::directory_iterator(root, ec)) {
    if (!e.is_directory())
      continue;
    CorpusEntry ce;
    ce.name = e.path().filename().string();
    ce.dir = e.path();
    std::ifstream d(e.path() / "description.txt", std::ios::binary);
    std::getline(d, ce.description);
    while (!ce.description.empty() && (ce.description.back() == '\r' ||
                                       ce.description.back() == '\n'))
      ce.description.pop_back();
    ce.expectedReachable = countRows(e.path() / "ExpectedReachable.facts");
    ce.expectedUnreachable = countRows(e.path() / "ExpectedUnreachable.facts");
    out.push_back(std::move(ce));
  }
  std::sort(out.begin(), out.end(),
            [](const CorpusEntry& a, const CorpusEntry& b) {
              return a.name < b.name;
            });
  return out;
}

std::filesystem::path default_corpus_dir() {
  if (const char* env = std::getenv("DYNAPT_CORPUS_DIR"); env && *env)
    return env;
  return DYNAPT_BUNDLED_CORPUS_DIR;
}

} // namespace dynapt
