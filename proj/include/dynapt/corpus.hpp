/*
 * Copyright (c) 2026 dynapt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <filesystem>
#include <string>
#include <vector>

// Discovery of the bundled example programs. A corpus directory contains one
// subdirectory per program, each holding a fact set plus description.txt and
// the expectation tables.

namespace dynapt {

struct CorpusEntry {
  std::string name;            // directory basename
  std::filesystem::path dir;
  std::string description;     // first line of description.txt, may be empty
  size_t expectedReachable = 0;
  size_t expectedUnreachable = 0;
};

// Entries sorted by name. A missing or empty root yields an empty list.
std::vector<CorpusEntry> list_corpus(const std::filesystem::path& root);

// Default corpus root: DYNAPT_CORPUS_DIR env var if set, else the build-time
// location of the bundled corpus.
std::filesystem::path default_corpus_dir();

}  // namespace dynapt
