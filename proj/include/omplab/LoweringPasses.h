//===--- LoweringPasses.h - Frame lowering pass pipeline --------*- C++ -*-===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Takes the post-codegen module to machine form: allocas become frame indices
// against a per-group depot layout, shared variables are rebased onto the
// team-visible depot mirror, and disjoint local slots are merged.
//
// Pass order is load-bearing. Slot merging reasons about the uses of a frame
// index value without looking through casts, so it must run after shared
// rebasing has dissolved the cast round-trips; running it earlier can fold a
// live local variable into a slot that later turns shared. validatePlan
// rejects such plans unless the hazard is explicitly acknowledged (the
// miscompile demo does exactly that).
//
//===----------------------------------------------------------------------===//

#ifndef OMPLAB_LOWERING_PASSES_H
#define OMPLAB_LOWERING_PASSES_H

#include "omplab/IR.h"

#include <map>
#include <set>

namespace omplab {

enum class PassId {
  DetectShared,         // standalone shared-variable detection
  InsertCastRoundTrips, // shield shared allocas behind cast pairs
  BuildDepots,          // frame groups and slot assignment
  ToMachine,            // alloca -> frameindex
  LowerSharedFrames,    // rebase shared slots onto the depot mirror
  ColorStack,           // merge disjoint local slots
  RepackOffsets,        // drop dead slots, renumber, recompute offsets
};

const char *passName(PassId P);

enum class PipelineKind { Default, O0, BadOrderDemo };

struct PassPlan {
  std::vector<PassId> Passes;
  /// Must be set to run a plan that colors before shared rebasing.
  bool AcknowledgeHazard = false;
};

PassPlan planFor(PipelineKind K);

/// Structural checks on a plan; findings use the "pipeline-order" rule.
DiagList validatePlan(const PassPlan &Plan);

/// Allocas whose address escapes through a store, per function. This is the
/// set of variables that must be visible to workers.
std::map<std::string, std::set<std::string>> detectSharedVariables(
    const Module &M);

struct PipelineResult {
  Module M;
  DiagList Diags;

  bool ok() const { return Diags.empty(); }
};

PipelineResult runPasses(Module M, const PassPlan &Plan);
PipelineResult runPipeline(Module M, PipelineKind K);

/// Machine-form audits: shared/local slot overlaps ("layout-overlap"),
/// frame-index values with conflicting residency evidence
/// ("ambiguous-residency"), and depot mirror size drift ("mirror-mismatch").
DiagList auditMachineModule(const Module &M);

} // namespace omplab

#endif // OMPLAB_LOWERING_PASSES_H
