//===--- Compiler.cpp - Source-to-machine driver ---------------------------===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "omplab/Compiler.h"

#include "omplab/AstLowering.h"
#include "omplab/Codegen.h"
#include "omplab/DeviceRuntime.h"
#include "omplab/IRPrinter.h"
#include "omplab/SharingAnalysis.h"
#include "omplab/Verifier.h"

#include <json.hpp>

namespace omplab {

using nlohmann::json;

static bool verifyStage(CompileResult &R, const Module &M,
                        const std::string &Stage) {
  DiagList Ds = validate(M);
  for (Diagnostic &D : Ds) {
    D.Message = Stage + ": " + D.Message;
    R.Diags.push_back(std::move(D));
  }
  return Ds.empty();
}

CompileResult compileSource(const std::string &Text, const std::string &Stem,
                            const CompileOptions &Opts) {
  CompileResult R;
  R.KernelStem = Stem;

  DslParseResult P = parseDsl(Text);
  for (const Diagnostic &D : P.Diags)
    R.Diags.push_back(D);
  if (!P.ok())
    return R;
  R.Ast = std::move(P.Ast);

  SharingResult S = analyzeSharing(*R.Ast);
  for (const Diagnostic &D : S.Diags)
    R.Diags.push_back(D);
  R.Info = std::move(S.Info);
  if (!S.Diags.empty())
    return R;

  if (Opts.DumpAst)
    R.AstJson = dumpAst(*R.Ast, &R.Info);

  R.PreCodegen = lowerToIr(*R.Ast, R.Info, Stem);
  if (!verifyStage(R, R.PreCodegen, "after frontend lowering"))
    return R;
  if (Opts.DumpAfter == "frontend")
    R.Dumps["frontend"] = printModule(R.PreCodegen);

  R.PostCodegen = runCodegen(R.PreCodegen);
  if (!verifyStage(R, R.PostCodegen, "after region outlining"))
    return R;
  if (Opts.DumpAfter == "codegen")
    R.Dumps["codegen"] = printModule(R.PostCodegen);

  PassPlan Plan = planFor(Opts.Pipeline);
  DiagList PlanDiags = validatePlan(Plan);
  if (!PlanDiags.empty()) {
    for (Diagnostic &D : PlanDiags)
      R.Diags.push_back(std::move(D));
    return R;
  }

  PipelineResult PR = runPasses(R.PostCodegen, Plan);
  for (const Diagnostic &D : PR.Diags)
    R.Diags.push_back(D);
  if (!PR.ok())
    return R;
  R.Machine = std::move(PR.M);
  if (!verifyStage(R, R.Machine, "after frame lowering"))
    return R;

  if (!Opts.DumpAfter.empty() && Opts.DumpAfter != "frontend" &&
      Opts.DumpAfter != "codegen") {
    PassPlan Prefix;
    Prefix.AcknowledgeHazard = true;
    bool Found = false;
    for (PassId Id : Plan.Passes) {
      Prefix.Passes.push_back(Id);
      if (passName(Id) == Opts.DumpAfter) {
        Found = true;
        break;
      }
    }
    if (!Found) {
      Diagnostic D;
      D.Rule = "unknown-stage";
      D.Message = "no stage named '" + Opts.DumpAfter + "' in this pipeline";
      R.Diags.push_back(std::move(D));
      return R;
    }
    PipelineResult Partial = runPasses(R.PostCodegen, Prefix);
    if (Partial.ok())
      R.Dumps[Opts.DumpAfter] = printModule(Partial.M);
  }

  R.Ok = true;
  return R;
}

std::string manifestJson(const Module &Machine, int PreallocEntries) {
  json J;
  const Function *K = Machine.kernel();
  J["kernel"] = K ? K->Name : "";
  LaunchDefaults L = Machine.Launch.value_or(LaunchDefaults{});
  J["launch"] = {{"teams", L.Teams}, {"workers", L.Workers}};

  const DepotLayout *Layout = nullptr;
  if (K) {
    const FrameGroup *G = Machine.groupOf(K->Name);
    if (G)
      Layout = Machine.layoutFor(G->Root);
  }

  json Slots = json::array();
  int64_t TotalLocal = 0, TotalShared = 0;
  bool Mirrored = false;
  if (Layout) {
    for (const DepotSlot &S : Layout->Slots) {
      json Js;
      Js["offset"] = S.Offset;
      Js["size"] = S.Size;
      Js["align"] = S.Align;
      Js["shared"] = S.SharedResident;
      Js["owners"] = S.Owners;
      Slots.push_back(std::move(Js));
    }
    TotalLocal = Layout->TotalLocal;
    TotalShared = Layout->TotalShared;
    Mirrored = Layout->HasSharedDepot;
  }
  J["depot"] = {{"slots", std::move(Slots)},
                {"total_local", TotalLocal},
                {"total_shared", TotalShared},
                {"mirrored", Mirrored}};
  J["stack_bytes"] = TotalLocal;
  J["prealloc_entries"] = PreallocEntries;
  J["prealloc_bytes"] = int64_t{PreallocEntries} * SharedArgEntryBytes;
  J["runtime_bytes"] = RuntimePrivateBytes;
  J["shared_footprint"] = TotalShared +
                          int64_t{PreallocEntries} * SharedArgEntryBytes +
                          RuntimePrivateBytes;
  return J.dump(2) + "\n";
}

} // namespace omplab
