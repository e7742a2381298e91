//===--- Compiler.h - Source-to-machine driver --------------------*- C++ -*-===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Runs the full stack in order: parse, attribute resolution, IR lowering,
// outlining and the master/worker split, then the frame-lowering pipeline.
// Each stage's module is verified before the next consumes it.
//
//===----------------------------------------------------------------------===//

#ifndef OMPLAB_COMPILER_H
#define OMPLAB_COMPILER_H

#include "omplab/DeviceRuntime.h"
#include "omplab/Dsl.h"
#include "omplab/IR.h"
#include "omplab/LoweringPasses.h"

#include <map>
#include <optional>
#include <string>

namespace omplab {

struct CompileOptions {
  PipelineKind Pipeline = PipelineKind::Default;
  bool DumpAst = false;
  /// "frontend", "codegen", or a pass name; fills Dumps.
  std::string DumpAfter;
  int PreallocEntries = DefaultPreallocEntries; // recorded in the manifest
};

struct CompileResult {
  bool Ok = false;
  DiagList Diags;

  std::optional<ProgramAst> Ast;
  SharingInfo Info;
  std::string KernelStem;

  Module PreCodegen;  // straight from the frontend
  Module PostCodegen; // outlined master/worker form
  Module Machine;     // after the frame pipeline

  std::string AstJson;                      // when DumpAst
  std::map<std::string, std::string> Dumps; // stage name -> .sir text
};

CompileResult compileSource(const std::string &Text, const std::string &Stem,
                            const CompileOptions &Opts);

/// Per-kernel shared-memory ledger as JSON: depot slots, totals, the
/// preallocated shared-args list, and the runtime-private span.
std::string manifestJson(const Module &Machine, int PreallocEntries);

} // namespace omplab

#endif // OMPLAB_COMPILER_H
