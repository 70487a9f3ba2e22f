/*
 * Copyright (c) 2026 dynapt contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "dynapt/program.hpp"

namespace dynapt {

// Where fact files come from. The directory-backed source is the normal path;
// the in-memory source keeps tests free of temp-file churn.
class FactSource {
public:
  virtual ~FactSource() = default;
  // File content, or nullopt if the file does not exist.
  virtual std::optional<std::string> read(const std::string& name) const = 0;
  virtual std::string origin() const = 0;
};

class DirFactSource : public FactSource {
public:
  explicit DirFactSource(std::filesystem::path dir) : dir_(std::move(dir)) {}
  std::optional<std::string> read(const std::string& name) const override;
  std::string origin() const override { return dir_.string(); }

private:
  std::filesystem::path dir_;
};

class MemoryFactSource : public FactSource {
public:
  std::map<std::string, std::string> files;

  std::optional<std::string> read(const std::string& name) const override {
    auto it = files.find(name);
    if (it == files.end())
      return std::nullopt;
    return it->second;
  }
  std::string origin() const override { return "<memory>"; }
};

// Parses and validates a fact directory into an immutable Program.
// Throws LoadError with "file:line: message" context on the first problem.
Program load_program(const std::filesystem::path& dir);
Program load_program(const FactSource& source);

} // namespace dynapt
