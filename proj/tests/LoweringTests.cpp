//===--- LoweringTests.cpp - Frame lowering and pass-order tests ------------===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "omplab/LoweringPasses.h"
#include "omplab/IRPrinter.h"
#include "support/TestUtil.h"

#include <doctest.h>

using namespace omplab;
using namespace omplab::test;

namespace {

bool hasRule(const DiagList &Diags, const std::string &Rule) {
  for (const auto &D : Diags)
    if (D.Rule == Rule)
      return true;
  return false;
}

const DepotLayout &kernelLayout(const Module &M) {
  const Function *K = M.kernel();
  REQUIRE(K != nullptr);
  const DepotLayout *L = M.layoutFor(K->Name);
  REQUIRE(L != nullptr);
  return *L;
}

} // namespace

TEST_CASE("kernel depots carry the pinned stack footprints") {
  for (auto [Stem, Stack] : {std::pair<const char *, int64_t>{"seq_only", 16},
                             {"shared_scalar", 24},
                             {"private_inner", 16},
                             {"two_regions", 24},
                             {"firstprivate", 24},
                             {"mixed_captures", 72},
                             {"coloring_demo", 32}}) {
    CAPTURE(Stem);
    CompileResult R = compileProgram(Stem);
    REQUIRE(R.Ok);
    CHECK(kernelLayout(R.Machine).stackBytes() == Stack);
  }
}

TEST_CASE("scalar capture depots grow by one slot per variable") {
  for (int N : {1, 2, 4, 8, 16, 32, 64}) {
    CAPTURE(N);
    CompileResult R = compileProgram("scalars_" + std::to_string(N));
    REQUIRE(R.Ok);
    const DepotLayout &L = kernelLayout(R.Machine);
    CHECK(L.stackBytes() == 8 * N + 16);
    CHECK(L.HasSharedDepot);
    CHECK(L.TotalShared == L.TotalLocal);
  }
}

TEST_CASE("array capture depots keep exact element sizes") {
  for (int K : {1, 2, 3, 4}) {
    CAPTURE(K);
    CompileResult R = compileProgram("arrays_" + std::to_string(K));
    REQUIRE(R.Ok);
    const DepotLayout &L = kernelLayout(R.Machine);
    CHECK(L.stackBytes() == 384 * K + 24);
    bool SawArray = false;
    for (const auto &S : L.Slots)
      if (S.Size == 384)
        SawArray = true;
    CHECK(SawArray);
  }
}

TEST_CASE("every mirrored depot keeps local and shared sizes equal") {
  for (const char *Stem : {"shared_scalar", "mixed_captures", "two_regions",
                           "arrays_4", "scalars_64", "coloring_demo"}) {
    CAPTURE(Stem);
    CompileResult R = compileProgram(Stem);
    REQUIRE(R.Ok);
    for (const auto &[Root, L] : R.Machine.Layouts) {
      CAPTURE(Root);
      CHECK(L.TotalShared == L.TotalLocal);
    }
  }
}

TEST_CASE("shared detection is pipeline independent") {
  for (const char *Stem : {"shared_scalar", "mixed_captures", "two_regions"}) {
    CAPTURE(Stem);
    CompileOptions Def, O0;
    O0.Pipeline = PipelineKind::O0;
    CompileResult A = compileProgram(Stem, Def);
    CompileResult B = compileProgram(Stem, O0);
    REQUIRE(A.Ok);
    REQUIRE(B.Ok);
    CHECK(detectSharedVariables(A.PostCodegen) ==
          detectSharedVariables(B.PostCodegen));
    // Launch results agree too; O0 merely skips slot merging.
    CHECK(kernelLayout(A.Machine).TotalShared ==
          kernelLayout(B.Machine).TotalShared);
  }
}

TEST_CASE("escaping allocas are exactly the worker-visible set") {
  CompileResult R = compileProgram("mixed_captures");
  REQUIRE(R.Ok);
  auto Shared = detectSharedVariables(R.PostCodegen);
  const auto &K = Shared[R.PostCodegen.kernel()->Name];
  CHECK(K == std::set<std::string>{"c1", "c2", "c3", "c4", "c5", "c6", "c7"});
}

TEST_CASE("machine form has no allocas and no cast round-trips") {
  for (const char *Stem : {"shared_scalar", "mixed_captures", "arrays_2"}) {
    CAPTURE(Stem);
    CompileResult R = compileProgram(Stem);
    REQUIRE(R.Ok);
    for (const auto &F : R.Machine.Functions)
      for (const auto &B : F.Blocks)
        for (size_t I = 0; I < B.Instrs.size(); ++I) {
          CHECK(B.Instrs[I].Op != Opcode::Alloca);
          // A cast of a cast straight back is the shield pattern; frame
          // lowering must have dissolved all of them.
          if (I + 1 < B.Instrs.size() &&
              B.Instrs[I].Op == Opcode::AddrSpaceCast &&
              B.Instrs[I + 1].Op == Opcode::AddrSpaceCast) {
            CHECK(B.Instrs[I + 1].Ops[0].Name != B.Instrs[I].Result);
          }
        }
  }
}

TEST_CASE("pass plans that color before rebasing are rejected") {
  PassPlan Bad;
  Bad.Passes = {PassId::DetectShared, PassId::InsertCastRoundTrips,
                PassId::BuildDepots, PassId::ToMachine, PassId::ColorStack,
                PassId::LowerSharedFrames, PassId::RepackOffsets};
  CHECK(hasRule(validatePlan(Bad), "pipeline-order"));
  Bad.AcknowledgeHazard = true;
  CHECK(validatePlan(Bad).empty());

  PassPlan Good = planFor(PipelineKind::Default);
  CHECK(validatePlan(Good).empty());
  PassPlan Demo = planFor(PipelineKind::BadOrderDemo);
  CHECK(Demo.AcknowledgeHazard);
  CHECK(validatePlan(Demo).empty());
}

TEST_CASE("coloring merges disjoint locals only after rebasing") {
  CompileOptions Def;
  CompileResult Good = compileProgram("coloring_demo", Def);
  REQUIRE(Good.Ok);
  // c shared, t local, both keep distinct slots.
  CHECK(kernelLayout(Good.Machine).stackBytes() == 32);
  CHECK(auditMachineModule(Good.Machine).empty());
  CHECK_FALSE(kernelLayout(Good.Machine).findSharedLocalOverlap().has_value());

  CompileOptions Bad;
  Bad.Pipeline = PipelineKind::BadOrderDemo;
  CompileResult Wrong = compileProgram("coloring_demo", Bad);
  REQUIRE(Wrong.Ok);
  // The myopic merge folds t into c's interval, then rebasing drags the
  // merged slot shared: one slot now hosts a worker-visible variable and a
  // master-private one.
  DiagList Audit = auditMachineModule(Wrong.Machine);
  CHECK(hasRule(Audit, "layout-overlap"));
  auto Overlap = kernelLayout(Wrong.Machine).findSharedLocalOverlap();
  REQUIRE(Overlap.has_value());
  CHECK(Overlap->find("%c") != std::string::npos);
  CHECK(Overlap->find("%t") != std::string::npos);
  CHECK(kernelLayout(Wrong.Machine).stackBytes() == 24);
}

TEST_CASE("coloring never merges pinned or overlapping slots") {
  // two_regions keeps c live across both regions; wf.addr and args.addr are
  // address-taken call arguments. Nothing may merge.
  CompileResult R = compileProgram("two_regions");
  REQUIRE(R.Ok);
  for (const auto &S : kernelLayout(R.Machine).Slots)
    CHECK(S.Owners.size() == 1);
}

TEST_CASE("O0 skips merging but still lowers frames") {
  CompileOptions O0;
  O0.Pipeline = PipelineKind::O0;
  CompileResult R = compileProgram("coloring_demo", O0);
  REQUIRE(R.Ok);
  CHECK(kernelLayout(R.Machine).stackBytes() == 32);
  CHECK(auditMachineModule(R.Machine).empty());
}

TEST_CASE("audits catch a mirror that drifted out of sync") {
  CompileResult R = compileProgram("shared_scalar");
  REQUIRE(R.Ok);
  Module M = R.Machine;
  DepotLayout *L = M.layoutFor(M.kernel()->Name);
  REQUIRE(L != nullptr);
  L->TotalShared += 8;
  CHECK(hasRule(auditMachineModule(M), "mirror-mismatch"));
}

TEST_CASE("dump-after exposes each stage on request") {
  CompileOptions Opts;
  Opts.DumpAfter = "color-stack";
  CompileResult R = compileProgram("coloring_demo", Opts);
  REQUIRE(R.Ok);
  REQUIRE(R.Dumps.count("color-stack") == 1);
  CHECK(R.Dumps.at("color-stack").find("frameindex") != std::string::npos);
}
