//===--- SequentialOracle.h - Reference interpreter ---------------*- C++ -*-===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Executes the source program directly on the AST with the documented
// semantics: every team runs the target body over its own locals, mapped
// buffers are shared, a bare parallel body runs once per worker, and a
// parallel for hands iterations out cyclically across the whole worker pool.
// Race-free programs must end with the same mapped state as the simulator.
//
//===----------------------------------------------------------------------===//

#ifndef OMPLAB_SEQUENTIAL_ORACLE_H
#define OMPLAB_SEQUENTIAL_ORACLE_H

#include "omplab/Dsl.h"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace omplab {

struct OracleOptions {
  int Teams = -1;   // -1: take the program's launch clause, else 1
  int Workers = -1; // -1: take the program's launch clause, else 32
  int64_t StepLimit = 100'000'000;
  std::map<std::string, std::vector<int64_t>> GlobalOverrides;
};

struct OracleResult {
  bool Failed = false;
  std::string Error;
  /// Final mapped-buffer state, flattened like the simulator's globals.
  std::map<std::string, std::vector<int64_t>> Globals;

  bool ok() const { return !Failed; }
};

OracleResult runSequentialOracle(const ProgramAst &Ast,
                                 const OracleOptions &Opts);

} // namespace omplab

#endif // OMPLAB_SEQUENTIAL_ORACLE_H
